#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uplnc {

struct StructDef;

enum class BaseKind { Int, Char, Struct };

struct TypeCtor {
  enum class Kind { Array, Pointer };
  Kind kind = Kind::Pointer;
  std::int32_t count = 0;  // arrays only

  friend bool operator==(const TypeCtor&, const TypeCtor&) = default;
};

// A UPLNC type: constructors applied outermost first to a base, so
// `[3]*char` is {array(3), pointer} over char.
struct TypeExpr {
  std::vector<TypeCtor> ctors;
  BaseKind base = BaseKind::Int;
  std::string struct_name;
  const StructDef* record = nullptr;  // filled once the structure is known

  static TypeExpr int_type() { return {}; }
  static TypeExpr char_type() {
    TypeExpr t;
    t.base = BaseKind::Char;
    return t;
  }

  bool is_pointer() const { return !ctors.empty() && ctors.front().kind == TypeCtor::Kind::Pointer; }
  bool is_array() const { return !ctors.empty() && ctors.front().kind == TypeCtor::Kind::Array; }
  bool is_struct() const { return ctors.empty() && base == BaseKind::Struct; }
  bool is_integer() const { return ctors.empty() && base != BaseKind::Struct; }
  bool is_char() const { return ctors.empty() && base == BaseKind::Char; }
  bool is_scalar() const { return is_integer() || is_pointer(); }
  int indirection_depth() const;

  // Type one constructor in: the pointee of a pointer, the element of an array.
  TypeExpr element() const;
  TypeExpr pointer_to() const;
  TypeExpr array_of(std::int32_t count) const;
  // Arrays decay to pointer-to-element in value position.
  TypeExpr decay() const { return is_array() ? element().pointer_to() : *this; }

  // i386 size: char 1, int 4, pointer 4, arrays N x element, structures the
  // sum of their members. Returns -1 for an incomplete structure.
  std::int64_t size_bytes() const;

  std::string to_string() const;

  friend bool operator==(const TypeExpr& a, const TypeExpr& b) {
    return a.ctors == b.ctors && a.base == b.base && a.struct_name == b.struct_name;
  }
};

}  // namespace uplnc
