#include <algorithm>
#include <map>
#include <set>

#include "uplnc/ir.hpp"

namespace uplnc::ir {

namespace {

int width_of(const TypeExpr& t) { return t.is_char() ? 1 : 4; }

Op arith_op(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return Op::Add;
    case BinaryOp::Sub: return Op::Sub;
    case BinaryOp::Mul: return Op::Mul;
    case BinaryOp::Div: return Op::Div;
    case BinaryOp::Mod: return Op::Mod;
    case BinaryOp::And: return Op::And;
    case BinaryOp::Or: return Op::Or;
    case BinaryOp::Xor: return Op::Xor;
    case BinaryOp::Shl: return Op::Shl;
    case BinaryOp::Shr: return Op::Shr;
    default: throw std::logic_error("not an arithmetic operator");
  }
}

Cond compare_cond(BinaryOp op, bool is_unsigned) {
  switch (op) {
    case BinaryOp::Eq: return Cond::Eq;
    case BinaryOp::Ne: return Cond::Ne;
    case BinaryOp::Lt: return is_unsigned ? Cond::LtU : Cond::Lt;
    case BinaryOp::Le: return is_unsigned ? Cond::LeU : Cond::Le;
    case BinaryOp::Gt: return is_unsigned ? Cond::GtU : Cond::Gt;
    case BinaryOp::Ge: return is_unsigned ? Cond::GeU : Cond::Ge;
    default: throw std::logic_error("not a comparison");
  }
}

std::int32_t elem_size(const TypeExpr& pointer) {
  return static_cast<std::int32_t>(std::max<std::int64_t>(1, pointer.element().size_bytes()));
}

class Lowerer {
 public:
  explicit Lowerer(const Module& m) : m_(m) {}

  IrModule run() {
    std::set<std::string> defined;
    for (const auto& g : m_.globals) {
      if (g->storage == Storage::GlobalDefined && defined.insert(g->link_name).second) {
        out_.globals.push_back({g->link_name, g->type.size_bytes(), false});
      }
    }
    for (const auto& g : m_.globals) {
      if (g->storage == Storage::Extern) note_extern_global(*g);
    }
    for (const auto& f : m_.functions) function(*f);
    for (const auto& s : m_.structs) {
      for (const auto& meth : s->methods) function(*meth);
    }
    for (const auto& e : m_.implicit_externs) note_extern_function(e->link_name);
    return std::move(out_);
  }

 private:
  void note_extern_global(const Symbol& s) {
    for (const auto& g : out_.globals) {
      if (g.name == s.link_name) return;
    }
    std::int64_t size = s.type.size_bytes();
    out_.globals.push_back({s.link_name, size < 0 ? 0 : size, true});
  }

  void note_extern_function(const std::string& name) {
    if (std::find(out_.extern_functions.begin(), out_.extern_functions.end(), name) ==
        out_.extern_functions.end()) {
      out_.extern_functions.push_back(name);
    }
  }

  // --- emission helpers ---------------------------------------------------

  int temp() {
    int t = next_temp_++;
    fn_->temp_count = std::max(fn_->temp_count, next_temp_);
    return t;
  }

  std::string label() { return "L" + std::to_string(next_label_++); }

  void emit(Instr in) { fn_->body.push_back(std::move(in)); }

  void emit_label(const std::string& name) { emit({.op = Op::Label, .name = name}); }
  void emit_jump(const std::string& name) { emit({.op = Op::Jump, .name = name}); }
  void emit_bz(int t, const std::string& name) {
    emit({.op = Op::BranchIfZero, .a = Temp{t}, .name = name});
  }

  int emit_const(std::int32_t v) {
    int t = temp();
    emit({.op = Op::Const, .dst = t, .a = v});
    return t;
  }

  int emit_op(Op op, Operand a, Operand b = {}) {
    int t = temp();
    emit({.op = op, .dst = t, .a = a, .b = b});
    return t;
  }

  int emit_load(int addr, int width) {
    int t = temp();
    emit({.op = Op::Load, .dst = t, .a = Temp{addr}, .width = width});
    return t;
  }

  void emit_store(int addr, int value, int width) {
    emit({.op = Op::Store, .a = Temp{addr}, .b = Temp{value}, .width = width});
  }

  int emit_frame_addr(std::int32_t offset) {
    int t = temp();
    emit({.op = Op::AddrFrame, .dst = t, .offset = offset});
    return t;
  }

  // --- functions and statements -------------------------------------------

  void function(const FuncDef& f) {
    IrFunction irf;
    irf.name = f.symbol->link_name;
    irf.frame_size = f.frame_size;
    if (f.this_param) irf.param_offsets.push_back(f.this_param->offset);
    for (const auto& p : f.params) irf.param_offsets.push_back(p->offset);
    irf.param_count = static_cast<int>(irf.param_offsets.size());
    fn_ = &irf;
    this_offset_ = f.this_param ? f.this_param->offset : 0;
    next_label_ = 0;
    next_temp_ = 0;
    emit_label("entry");
    statement(*f.body);
    next_temp_ = 0;
    int zero = emit_const(0);
    emit({.op = Op::Return, .a = Temp{zero}});
    out_.functions.push_back(std::move(irf));
    fn_ = nullptr;
  }

  void statement(const Stmt& s) {
    next_temp_ = 0;  // temporaries never live across statements
    switch (s.kind) {
      case StmtKind::Block:
        for (const auto& c : s.body) statement(*c);
        break;
      case StmtKind::VarDecl:
        for (const auto& d : s.decls) {
          if (d->storage == Storage::Extern) note_extern_global(*d);
        }
        break;
      case StmtKind::If: {
        std::string else_label = label();
        int c = value(*s.cond);
        emit_bz(c, else_label);
        statement(*s.then_branch);
        if (s.else_branch) {
          std::string end = label();
          emit_jump(end);
          emit_label(else_label);
          statement(*s.else_branch);
          emit_label(end);
        } else {
          emit_label(else_label);
        }
        break;
      }
      case StmtKind::While: {
        std::string top = label();
        std::string end = label();
        emit_label(top);
        next_temp_ = 0;
        emit_bz(value(*s.cond), end);
        loops_.push_back({end, top});
        statement(*s.loop_body);
        loops_.pop_back();
        emit_jump(top);
        emit_label(end);
        break;
      }
      case StmtKind::For: {
        std::string top = label();
        std::string step = label();
        std::string end = label();
        if (s.init) value(*s.init);
        emit_label(top);
        if (s.cond) {
          next_temp_ = 0;
          emit_bz(value(*s.cond), end);
        }
        loops_.push_back({end, step});
        statement(*s.loop_body);
        loops_.pop_back();
        emit_label(step);
        if (s.step) {
          next_temp_ = 0;
          value(*s.step);
        }
        emit_jump(top);
        emit_label(end);
        break;
      }
      case StmtKind::Return: {
        int v = s.value ? value(*s.value) : emit_const(0);
        emit({.op = Op::Return, .a = Temp{v}});
        break;
      }
      case StmtKind::Break:
        emit_jump(loops_.back().first);
        break;
      case StmtKind::Continue:
        emit_jump(loops_.back().second);
        break;
      case StmtKind::ExprStmt:
        value(*s.value);
        break;
      case StmtKind::Empty:
        break;
    }
  }

  // --- expressions --------------------------------------------------------

  int address(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Ident: {
        const Symbol& s = *e.symbol;
        if (s.storage == Storage::Local || s.storage == Storage::Parameter) {
          return emit_frame_addr(s.offset);
        }
        int t = temp();
        emit({.op = Op::AddrGlobal, .dst = t, .name = s.link_name});
        return t;
      }
      case ExprKind::Unary:
        return value(*e.lhs);  // Deref
      case ExprKind::Index: {
        int base = value(*e.lhs);
        int index = value(*e.rhs);
        std::int32_t size = elem_size(e.lhs->type->decay());
        int scaled = size == 1 ? index : emit_op(Op::Mul, Temp{index}, size);
        return emit_op(Op::Add, Temp{base}, Temp{scaled});
      }
      case ExprKind::Member: {
        int base = e.arrow ? value(*e.lhs) : address(*e.lhs);
        if (e.symbol->offset == 0) return base;
        return emit_op(Op::Add, Temp{base}, e.symbol->offset);
      }
      default:
        throw std::logic_error("lowering: expression is not addressable");
    }
  }

  int load_from(int addr, const TypeExpr& type) {
    if (type.is_array() || type.is_struct()) return addr;  // decays to its address
    return emit_load(addr, width_of(type));
  }

  int value(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Number:
        return emit_const(e.number);
      case ExprKind::String: {
        std::string name = ".LC" + std::to_string(out_.strings.size());
        out_.strings.push_back({name, e.text});
        int t = temp();
        emit({.op = Op::AddrGlobal, .dst = t, .name = name});
        return t;
      }
      case ExprKind::This:
        return emit_load(emit_frame_addr(this_offset_), 4);
      case ExprKind::Ident:
      case ExprKind::Index:
      case ExprKind::Member:
        return load_from(address(e), *e.type);
      case ExprKind::Unary:
        return unary(e);
      case ExprKind::Binary:
        return binary(e);
      case ExprKind::Assign:
        return assign(e);
      case ExprKind::IncDec:
        return incdec(e);
      case ExprKind::Call:
        return call(e);
    }
    throw std::logic_error("lowering: unknown expression");
  }

  int unary(const Expr& e) {
    switch (e.unary) {
      case UnaryOp::Neg: return emit_op(Op::Neg, Temp{value(*e.lhs)});
      case UnaryOp::BitNot: return emit_op(Op::Not, Temp{value(*e.lhs)});
      case UnaryOp::LogNot: {
        int v = value(*e.lhs);
        int t = temp();
        emit({.op = Op::Cmp, .dst = t, .a = Temp{v}, .b = std::int32_t{0}, .cond = Cond::Eq});
        return t;
      }
      case UnaryOp::Deref: return load_from(value(*e.lhs), *e.type);
      case UnaryOp::AddrOf: return address(*e.lhs);
    }
    throw std::logic_error("lowering: unknown unary operator");
  }

  int binary(const Expr& e) {
    if (e.binary == BinaryOp::LogAnd || e.binary == BinaryOp::LogOr) return logical(e);
    TypeExpr lt = e.lhs->type->decay();
    TypeExpr rt = e.rhs->type->decay();
    int l = value(*e.lhs);
    int r = value(*e.rhs);
    switch (e.binary) {
      case BinaryOp::Eq:
      case BinaryOp::Ne:
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge: {
        int t = temp();
        emit({.op = Op::Cmp, .dst = t, .a = Temp{l}, .b = Temp{r},
              .cond = compare_cond(e.binary, lt.is_pointer() || rt.is_pointer())});
        return t;
      }
      case BinaryOp::Add:
        if (lt.is_pointer() && rt.is_integer()) r = scale(r, elem_size(lt));
        if (lt.is_integer() && rt.is_pointer()) l = scale(l, elem_size(rt));
        return emit_op(Op::Add, Temp{l}, Temp{r});
      case BinaryOp::Sub:
        if (lt.is_pointer() && rt.is_pointer()) {
          int diff = emit_op(Op::Sub, Temp{l}, Temp{r});
          std::int32_t size = elem_size(lt);
          return size == 1 ? diff : emit_op(Op::Div, Temp{diff}, size);
        }
        if (lt.is_pointer()) r = scale(r, elem_size(lt));
        return emit_op(Op::Sub, Temp{l}, Temp{r});
      default:
        return emit_op(arith_op(e.binary), Temp{l}, Temp{r});
    }
  }

  int scale(int t, std::int32_t size) { return size == 1 ? t : emit_op(Op::Mul, Temp{t}, size); }

  int logical(const Expr& e) {
    int result = temp();
    std::string done = label();
    if (e.binary == BinaryOp::LogAnd) {
      std::string is_false = label();
      emit_bz(value(*e.lhs), is_false);
      emit_bz(value(*e.rhs), is_false);
      emit({.op = Op::Const, .dst = result, .a = std::int32_t{1}});
      emit_jump(done);
      emit_label(is_false);
      emit({.op = Op::Const, .dst = result, .a = std::int32_t{0}});
    } else {
      std::string try_rhs = label();
      std::string is_false = label();
      emit_bz(value(*e.lhs), try_rhs);
      emit({.op = Op::Const, .dst = result, .a = std::int32_t{1}});
      emit_jump(done);
      emit_label(try_rhs);
      emit_bz(value(*e.rhs), is_false);
      emit({.op = Op::Const, .dst = result, .a = std::int32_t{1}});
      emit_jump(done);
      emit_label(is_false);
      emit({.op = Op::Const, .dst = result, .a = std::int32_t{0}});
    }
    emit_label(done);
    return result;
  }

  int assign(const Expr& e) {
    const TypeExpr& lt = *e.lhs->type;
    const int width = width_of(lt);
    int addr = address(*e.lhs);
    int v;
    if (e.compound) {
      int old = emit_load(addr, width);
      int r = value(*e.rhs);
      BinaryOp op = *e.compound;
      if ((op == BinaryOp::Add || op == BinaryOp::Sub) && lt.is_pointer()) {
        r = scale(r, elem_size(lt));
      }
      v = emit_op(arith_op(op), Temp{old}, Temp{r});
    } else {
      v = value(*e.rhs);
    }
    emit_store(addr, v, width);
    return width == 1 ? emit_load(addr, 1) : v;
  }

  int incdec(const Expr& e) {
    const TypeExpr& t = *e.lhs->type;
    const int width = width_of(t);
    std::int32_t step = t.is_pointer() ? elem_size(t) : 1;
    int addr = address(*e.lhs);
    int old = emit_load(addr, width);
    int updated = emit_op(e.increment ? Op::Add : Op::Sub, Temp{old}, step);
    emit_store(addr, updated, width);
    if (!e.prefix) return old;
    return width == 1 ? emit_load(addr, 1) : updated;
  }

  int call(const Expr& e) {
    for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) {
      int v = value(**it);
      emit({.op = Op::PushArg, .a = Temp{v}});
    }
    int argc = static_cast<int>(e.args.size());
    if (e.method_call) {
      int inst = e.instance_is_pointer ? value(*e.instance) : address(*e.instance);
      emit({.op = Op::PushArg, .a = Temp{inst}});
      ++argc;
    }
    int t = temp();
    emit({.op = Op::Call, .dst = t, .name = e.symbol->link_name, .arg_count = argc});
    return t;
  }

  const Module& m_;
  IrModule out_;
  IrFunction* fn_ = nullptr;
  std::int32_t this_offset_ = 0;
  int next_temp_ = 0;
  int next_label_ = 0;
  std::vector<std::pair<std::string, std::string>> loops_;  // (break, continue)
};

}  // namespace

IrModule lower(const Module& module) { return Lowerer(module).run(); }

}  // namespace uplnc::ir
