#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uplnc/diagnostics.hpp"
#include "uplnc/types.hpp"

namespace uplnc {

struct FuncDef;

enum class Storage { GlobalDefined, Extern, Local, Parameter, Member, Method };

const char* storage_name(Storage s);

struct Symbol {
  std::string name;
  Storage storage = Storage::Local;
  TypeExpr type;
  // Locals and parameters: byte offset from the frame base (locals are
  // negative, parameters start at +8). Members: offset in the structure.
  std::int32_t offset = 0;
  std::string link_name;  // globals, externs, functions and methods
  SourcePos pos;
  bool is_function = false;
  FuncDef* function = nullptr;  // the definition, when this module has one
};

enum class ExprKind { Number, String, Ident, This, Unary, Binary, Assign, IncDec, Call, Index, Member };
enum class UnaryOp { Neg, LogNot, BitNot, Deref, AddrOf };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, And, Or, Xor, Shl, Shr, Eq, Ne, Lt, Le, Gt, Ge, LogAnd, LogOr };

const char* binary_op_spelling(BinaryOp op);

struct Expr {
  ExprKind kind = ExprKind::Number;
  SourcePos pos;

  std::int32_t number = 0;
  std::string text;  // identifier, member name, or decoded string bytes
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  std::optional<BinaryOp> compound;  // `a op= b`
  bool increment = true;             // IncDec
  bool prefix = false;               // IncDec
  bool arrow = false;                // Member via `->`

  std::unique_ptr<Expr> lhs;  // operand, callee, indexed base, structure
  std::unique_ptr<Expr> rhs;
  std::vector<std::unique_ptr<Expr>> args;

  // Filled by resolve_and_check.
  std::optional<TypeExpr> type;
  Symbol* symbol = nullptr;  // Ident, Member (the member), Call (the callee)
  bool method_call = false;  // Call: pass the instance address first
  std::unique_ptr<Expr> instance;  // Call on a method: the structure object
  bool instance_is_pointer = false;
};

enum class StmtKind { Block, VarDecl, If, While, For, Return, Break, Continue, ExprStmt, Empty };

struct Stmt {
  StmtKind kind = StmtKind::Empty;
  SourcePos pos;
  std::vector<std::unique_ptr<Stmt>> body;       // Block
  std::vector<std::unique_ptr<Symbol>> decls;    // VarDecl
  std::unique_ptr<Expr> init, cond, step, value; // For parts, If/While cond, Return/ExprStmt value
  std::unique_ptr<Stmt> then_branch, else_branch, loop_body;
};

struct FuncDef {
  std::string name;
  SourcePos pos;
  std::vector<std::unique_ptr<Symbol>> params;
  TypeExpr return_type;
  std::unique_ptr<Stmt> body;
  StructDef* owner = nullptr;  // methods
  std::unique_ptr<Symbol> this_param;
  Symbol* symbol = nullptr;
  std::vector<Symbol*> locals;  // in frame order, after resolve
  std::int32_t frame_size = 0;
};

struct StructDef {
  std::string name;
  SourcePos pos;
  std::vector<std::unique_ptr<Symbol>> members;
  std::vector<std::unique_ptr<FuncDef>> methods;
  std::vector<std::unique_ptr<Symbol>> method_symbols;
  std::int64_t size = 0;
  bool complete = false;

  const Symbol* find_member(const std::string& n) const;
  const FuncDef* find_method(const std::string& n) const;
};

struct Module {
  std::vector<std::unique_ptr<Symbol>> globals;     // `var` at top level, in order
  std::vector<std::unique_ptr<StructDef>> structs;
  std::vector<std::unique_ptr<FuncDef>> functions;
  std::vector<std::unique_ptr<Symbol>> function_symbols;
  std::vector<std::unique_ptr<Symbol>> implicit_externs;  // undeclared callees

  // Global scope after resolve: name -> symbol.
  std::map<std::string, Symbol*> global_scope;

  const StructDef* find_struct(const std::string& n) const;
};

}  // namespace uplnc
