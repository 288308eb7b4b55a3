#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uplnc/ast.hpp"
#include "uplnc/diagnostics.hpp"

// Linear intermediate representation over virtual temporaries, the form
// shared by lowering, the interpreter and the assembly emitter.
namespace uplnc::ir {

enum class Op {
  Const,         // dst = a
  Move,          // dst = a
  AddrGlobal,    // dst = &name
  AddrFrame,     // dst = frame base + offset
  Load,          // dst = *(width bytes)a
  Store,         // *(width bytes)a = b
  Add, Sub, Mul, Div, Mod, And, Or, Xor, Shl, Shr,  // dst = a op b
  Not,           // dst = ~a
  Neg,           // dst = -a
  Cmp,           // dst = (a cond b) ? 1 : 0
  Jump,          // goto name
  BranchIfZero,  // if a == 0 goto name
  Label,         // name:
  PushArg,       // push a (arguments go right to left)
  Call,          // dst = name(pushed args); caller pops arg_count words
  Return,        // return a
};

enum class Cond { Eq, Ne, Lt, Le, Gt, Ge, LtU, LeU, GtU, GeU };

struct Temp {
  int id = 0;
  friend bool operator==(const Temp&, const Temp&) = default;
};

// Empty, a virtual temporary, or a 32-bit constant.
using Operand = std::variant<std::monostate, Temp, std::int32_t>;

struct Instr {
  Op op = Op::Label;
  int dst = -1;  // temp id, -1 for none
  Operand a;
  Operand b;
  std::string name;  // label, global or callee
  int width = 4;     // Load/Store: 1 or 4
  Cond cond = Cond::Eq;
  std::int32_t offset = 0;  // AddrFrame
  int arg_count = 0;        // Call
};

struct IrFunction {
  std::string name;
  std::int32_t frame_size = 0;
  int param_count = 0;
  std::vector<std::int32_t> param_offsets;
  int temp_count = 0;
  std::vector<Instr> body;
};

struct IrGlobal {
  std::string name;
  std::int64_t size = 0;
  bool is_extern = false;
};

struct IrString {
  std::string label;
  std::string bytes;  // without the terminating NUL
};

struct IrModule {
  std::vector<IrFunction> functions;
  std::vector<IrGlobal> globals;
  std::vector<IrString> strings;
  std::vector<std::string> extern_functions;  // called but not defined here

  const IrFunction* find_function(std::string_view name) const;
};

const char* op_name(Op op);
const char* cond_name(Cond c);

// Human-readable listing, one instruction per line.
std::string to_string(const IrModule& m);
std::string to_string(const Instr& in);

// Checks structural invariants: labels resolve within their function, the
// entry label is first, link names are unique, temps are in range.
// Returns the list of problems (empty when valid).
std::vector<std::string> validate(const IrModule& m);

// Lowers a module that passed resolve_and_check.
IrModule lower(const Module& module);

struct RunResult {
  int exit_code = 0;  // low 8 bits of main's value, as a process sees it
  std::string stdout_text;
};

struct InterpOptions {
  std::uint32_t memory_bytes = 8u << 20;
  std::uint64_t max_steps = 500'000'000;
  std::string stdin_text;
};

class RuntimeFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs `entry` over a simulated 32-bit byte-addressed memory. Built-in
// externs: printf (%d %u %x %c %s %%, with `-`/`0` flags and width),
// putchar, getchar, exit. `argv` becomes main's (argc, argv). Throws
// RuntimeFault on bad memory access, unknown externs, division by zero and
// step-limit exhaustion.
RunResult interpret(const IrModule& ir, std::string_view entry,
                    std::span<const std::string> argv = {}, const InterpOptions& options = {});

}  // namespace uplnc::ir
