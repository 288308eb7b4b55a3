#include "uplnc/types.hpp"

#include "uplnc/ast.hpp"

namespace uplnc {

int TypeExpr::indirection_depth() const {
  int n = 0;
  for (const auto& c : ctors) {
    if (c.kind == TypeCtor::Kind::Pointer) ++n;
  }
  return n;
}

TypeExpr TypeExpr::element() const {
  TypeExpr t = *this;
  if (!t.ctors.empty()) t.ctors.erase(t.ctors.begin());
  return t;
}

TypeExpr TypeExpr::pointer_to() const {
  TypeExpr t = *this;
  t.ctors.insert(t.ctors.begin(), TypeCtor{TypeCtor::Kind::Pointer, 0});
  return t;
}

TypeExpr TypeExpr::array_of(std::int32_t count) const {
  TypeExpr t = *this;
  t.ctors.insert(t.ctors.begin(), TypeCtor{TypeCtor::Kind::Array, count});
  return t;
}

std::int64_t TypeExpr::size_bytes() const {
  std::int64_t size = 0;
  switch (base) {
    case BaseKind::Int: size = 4; break;
    case BaseKind::Char: size = 1; break;
    case BaseKind::Struct: size = (record && record->complete) ? record->size : -1; break;
  }
  // Walk innermost to outermost; a pointer anywhere resets to 4 bytes.
  for (auto it = ctors.rbegin(); it != ctors.rend(); ++it) {
    if (it->kind == TypeCtor::Kind::Pointer) {
      size = 4;
    } else {
      if (size < 0) return -1;
      size *= it->count;
    }
  }
  return size;
}

std::string TypeExpr::to_string() const {
  std::string s;
  for (const auto& c : ctors) {
    if (c.kind == TypeCtor::Kind::Pointer) {
      s += '*';
    } else {
      s += "[" + std::to_string(c.count) + "]";
    }
  }
  switch (base) {
    case BaseKind::Int: s += "int"; break;
    case BaseKind::Char: s += "char"; break;
    case BaseKind::Struct: s += struct_name; break;
  }
  return s;
}

const char* storage_name(Storage s) {
  switch (s) {
    case Storage::GlobalDefined: return "global";
    case Storage::Extern: return "extern";
    case Storage::Local: return "local";
    case Storage::Parameter: return "parameter";
    case Storage::Member: return "member";
    case Storage::Method: return "method";
  }
  return "?";
}

const char* binary_op_spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::And: return "&";
    case BinaryOp::Or: return "|";
    case BinaryOp::Xor: return "^";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::LogAnd: return "&&";
    case BinaryOp::LogOr: return "||";
  }
  return "?";
}

const Symbol* StructDef::find_member(const std::string& n) const {
  for (const auto& m : members) {
    if (m->name == n) return m.get();
  }
  return nullptr;
}

const FuncDef* StructDef::find_method(const std::string& n) const {
  for (const auto& m : methods) {
    if (m->name == n) return m.get();
  }
  return nullptr;
}

const StructDef* Module::find_struct(const std::string& n) const {
  for (const auto& s : structs) {
    if (s->name == n) return s.get();
  }
  return nullptr;
}

}  // namespace uplnc
