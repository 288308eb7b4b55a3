#include "uplnc/codegen.hpp"

#include <cstdio>

namespace uplnc::codegen {

namespace {

using ir::Cond;
using ir::Instr;
using ir::Op;
using ir::Operand;
using ir::Temp;

constexpr int kRegisterTemps = 3;
constexpr const char* kTempRegs[kRegisterTemps] = {"%ebx", "%esi", "%edi"};

std::string escape(const std::string& bytes) {
  std::string s;
  for (unsigned char c : bytes) {
    if (c == '"' || c == '\\') {
      s += '\\';
      s += static_cast<char>(c);
    } else if (c >= 0x20 && c < 0x7f) {
      s += static_cast<char>(c);
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\%03o", c);
      s += buf;
    }
  }
  return s;
}

const char* set_cc(Cond c) {
  switch (c) {
    case Cond::Eq: return "sete";
    case Cond::Ne: return "setne";
    case Cond::Lt: return "setl";
    case Cond::Le: return "setle";
    case Cond::Gt: return "setg";
    case Cond::Ge: return "setge";
    case Cond::LtU: return "setb";
    case Cond::LeU: return "setbe";
    case Cond::GtU: return "seta";
    case Cond::GeU: return "setae";
  }
  return "sete";
}

class FunctionEmitter {
 public:
  FunctionEmitter(const ir::IrFunction& f, std::size_t index, std::string& out, Diagnostics& diags)
      : f_(f), prefix_(".L" + std::to_string(index) + "_"), out_(out), diags_(diags) {
    int spills = f.temp_count > kRegisterTemps ? f.temp_count - kRegisterTemps : 0;
    total_ = f.frame_size + 4 * spills;
  }

  void emit() {
    line("\t.globl " + f_.name);
    line("\t.type " + f_.name + ", @function");
    line(f_.name + ":");
    line("\tpushl %ebp");
    line("\tmovl %esp, %ebp");
    if (total_ > 0) line("\tsubl $" + std::to_string(total_) + ", %esp");
    line("\tpushl %ebx");
    line("\tpushl %esi");
    line("\tpushl %edi");
    if (f_.frame_size > 0) {
      // Locals start zeroed, as in the interpreter.
      line("\tleal " + std::to_string(-f_.frame_size) + "(%ebp), %edi");
      line("\tmovl $" + std::to_string(f_.frame_size / 4) + ", %ecx");
      line("\txorl %eax, %eax");
      line("\trep stosl");
    }
    for (const auto& in : f_.body) instr(in);
    line(prefix_ + "ret:");
    line("\tleal " + std::to_string(-(total_ + 12)) + "(%ebp), %esp");
    line("\tpopl %edi");
    line("\tpopl %esi");
    line("\tpopl %ebx");
    line("\tleave");
    line("\tret");
    line("\t.size " + f_.name + ", .-" + f_.name);
  }

 private:
  void line(const std::string& s) {
    out_ += s;
    out_ += '\n';
  }

  std::string temp_loc(int id) const {
    if (id < kRegisterTemps) return kTempRegs[id];
    return std::to_string(-(f_.frame_size + 4 * (id - kRegisterTemps + 1))) + "(%ebp)";
  }

  std::string operand(const Operand& o) {
    if (const auto* t = std::get_if<Temp>(&o)) return temp_loc(t->id);
    if (const auto* c = std::get_if<std::int32_t>(&o)) return "$" + std::to_string(*c);
    internal("missing operand");
    return "$0";
  }

  void load(const Operand& o, const char* reg) { line("\tmovl " + operand(o) + ", " + reg); }
  void store_eax(int dst) {
    if (dst >= 0) line("\tmovl %eax, " + temp_loc(dst));
  }

  void internal(const std::string& what) {
    diags_.error(diags_.default_file(), 0, 0, "internal error: " + f_.name + ": " + what);
  }

  void instr(const Instr& in) {
    switch (in.op) {
      case Op::Label:
        line(prefix_ + in.name + ":");
        return;
      case Op::Const:
      case Op::Move:
        load(in.a, "%eax");
        store_eax(in.dst);
        return;
      case Op::AddrGlobal:
        line("\tmovl $" + in.name + ", %eax");
        store_eax(in.dst);
        return;
      case Op::AddrFrame:
        line("\tleal " + std::to_string(in.offset) + "(%ebp), %eax");
        store_eax(in.dst);
        return;
      case Op::Load:
        load(in.a, "%ecx");
        line(in.width == 1 ? "\tmovzbl (%ecx), %eax" : "\tmovl (%ecx), %eax");
        store_eax(in.dst);
        return;
      case Op::Store:
        load(in.a, "%ecx");
        load(in.b, "%eax");
        line(in.width == 1 ? "\tmovb %al, (%ecx)" : "\tmovl %eax, (%ecx)");
        return;
      case Op::Add: binary(in, "\taddl %ecx, %eax"); return;
      case Op::Sub: binary(in, "\tsubl %ecx, %eax"); return;
      case Op::Mul: binary(in, "\timull %ecx, %eax"); return;
      case Op::And: binary(in, "\tandl %ecx, %eax"); return;
      case Op::Or: binary(in, "\torl %ecx, %eax"); return;
      case Op::Xor: binary(in, "\txorl %ecx, %eax"); return;
      case Op::Shl: binary(in, "\tsall %cl, %eax"); return;
      case Op::Shr: binary(in, "\tsarl %cl, %eax"); return;
      case Op::Div:
        binary(in, "\tcltd\n\tidivl %ecx");
        return;
      case Op::Mod:
        binary(in, "\tcltd\n\tidivl %ecx\n\tmovl %edx, %eax");
        return;
      case Op::Not:
        load(in.a, "%eax");
        line("\tnotl %eax");
        store_eax(in.dst);
        return;
      case Op::Neg:
        load(in.a, "%eax");
        line("\tnegl %eax");
        store_eax(in.dst);
        return;
      case Op::Cmp:
        load(in.a, "%eax");
        load(in.b, "%ecx");
        line("\tcmpl %ecx, %eax");
        line(std::string("\t") + set_cc(in.cond) + " %al");
        line("\tmovzbl %al, %eax");
        store_eax(in.dst);
        return;
      case Op::Jump:
        line("\tjmp " + prefix_ + in.name);
        return;
      case Op::BranchIfZero:
        load(in.a, "%eax");
        line("\ttestl %eax, %eax");
        line("\tje " + prefix_ + in.name);
        return;
      case Op::PushArg:
        line("\tpushl " + operand(in.a));
        return;
      case Op::Call:
        line("\tcall " + in.name);
        if (in.arg_count > 0) line("\taddl $" + std::to_string(4 * in.arg_count) + ", %esp");
        store_eax(in.dst);
        return;
      case Op::Return:
        load(in.a, "%eax");
        line("\tjmp " + prefix_ + "ret");
        return;
    }
    internal(std::string("no encoding for IR op '") + ir::op_name(in.op) + "'");
  }

  void binary(const Instr& in, const std::string& body) {
    load(in.a, "%eax");
    load(in.b, "%ecx");
    line(body);
    store_eax(in.dst);
  }

  const ir::IrFunction& f_;
  std::string prefix_;
  std::string& out_;
  Diagnostics& diags_;
  std::int32_t total_ = 0;
};

}  // namespace

AsmUnit emit_assembly(const ir::IrModule& ir, Diagnostics& diags, const CodegenOptions& options) {
  AsmUnit unit;
  for (const auto& s : ir.strings) {
    unit.rodata += s.label + ":\n\t.string \"" + escape(s.bytes) + "\"\n";
  }
  for (const auto& g : ir.globals) {
    if (g.is_extern) continue;
    const std::string size = std::to_string(g.size);
    unit.bss += "\t.globl " + g.name + "\n\t.align 4\n\t.type " + g.name + ", @object\n\t.size " +
                g.name + ", " + size + "\n" + g.name + ":\n\t.zero " + size + "\n";
  }
  for (std::size_t i = 0; i < ir.functions.size(); ++i) {
    const auto& f = ir.functions[i];
    if (f.frame_size > options.max_frame_bytes) {
      diags.error(diags.default_file(), 0, 0,
                  "frame of '" + f.name + "' is " + std::to_string(f.frame_size) +
                      " bytes, above the " + std::to_string(options.max_frame_bytes) +
                      "-byte limit");
      continue;
    }
    FunctionEmitter(f, i, unit.text, diags).emit();
  }
  unit.full = "\t.section .rodata\n" + unit.rodata + "\t.bss\n" + unit.bss + "\t.text\n" +
              unit.text + "\t.section .note.GNU-stack,\"\",@progbits\n";
  return unit;
}

}  // namespace uplnc::codegen
