#include <functional>
#include <limits>

#include "uplnc/frontend.hpp"

namespace uplnc {

namespace {

constexpr std::int64_t kMaxObjectSize = std::numeric_limits<std::int32_t>::max();

std::int32_t align4(std::int64_t n) { return static_cast<std::int32_t>((n + 3) & ~std::int64_t{3}); }

class Resolver {
 public:
  Resolver(Module& m, Diagnostics& d) : m_(m), diags_(d) {}

  void run() {
    for (auto& s : m_.structs) layout_struct(*s);
    declare_globals();
    for (auto& f : m_.functions) check_function(*f);
    for (auto& s : m_.structs) {
      for (auto& meth : s->methods) check_function(*meth);
    }
  }

 private:
  // --- declarations -------------------------------------------------------

  StructDef* lookup_struct(const std::string& name) {
    for (auto& s : m_.structs) {
      if (s->name == name) return s.get();
    }
    return nullptr;
  }

  // Binds structure references; `need_complete` demands a known size.
  bool resolve_type(TypeExpr& t, SourcePos pos, bool need_complete) {
    if (t.base == BaseKind::Struct) {
      t.record = lookup_struct(t.struct_name);
      if (!t.record) {
        diags_.error(pos, "unknown structure '" + t.struct_name + "'");
        return false;
      }
    }
    if (need_complete) {
      std::int64_t size = t.size_bytes();
      if (size < 0) {
        diags_.error(pos, "incomplete type '" + t.to_string() + "'");
        return false;
      }
      if (size > kMaxObjectSize) {
        diags_.error(pos, "type '" + t.to_string() + "' is too large");
        return false;
      }
    }
    return true;
  }

  void layout_struct(StructDef& s) {
    std::int64_t offset = 0;
    for (auto& mem : s.members) {
      if (!resolve_type(mem->type, mem->pos, true)) continue;
      mem->offset = static_cast<std::int32_t>(offset);
      offset += mem->type.size_bytes();
      if (offset > kMaxObjectSize) {
        diags_.error(s.pos, "structure '" + s.name + "' is too large");
        offset = 0;
      }
    }
    s.size = offset;
    s.complete = true;
    for (auto& meth : s.methods) {
      auto sym = std::make_unique<Symbol>();
      sym->name = meth->name;
      sym->storage = Storage::Method;
      sym->link_name = s.name + "__" + meth->name;
      sym->pos = meth->pos;
      sym->is_function = true;
      sym->function = meth.get();
      meth->symbol = sym.get();
      if (s.find_member(meth->name)) {
        diags_.error(meth->pos, "method '" + meth->name + "' has the same name as a member");
      }
      s.method_symbols.push_back(std::move(sym));
    }
  }

  void declare_globals() {
    for (auto& g : m_.globals) {
      resolve_type(g->type, g->pos, g->storage != Storage::Extern);
      g->link_name = g->name;
      auto [it, inserted] = m_.global_scope.emplace(g->name, g.get());
      // Repeated extern declarations and an extern completed by a
      // definition were accepted by the parser; the definition wins.
      if (!inserted && g->storage == Storage::GlobalDefined) it->second = g.get();
    }
    for (auto& f : m_.functions) {
      auto sym = std::make_unique<Symbol>();
      sym->name = f->name;
      sym->storage = Storage::GlobalDefined;
      sym->link_name = f->name;
      sym->pos = f->pos;
      sym->is_function = true;
      sym->function = f.get();
      sym->type = f->return_type;
      f->symbol = sym.get();
      auto it = m_.global_scope.find(f->name);
      if (it != m_.global_scope.end()) {
        diags_.error(f->pos, it->second->is_function
                                 ? "redefinition of function '" + f->name + "'"
                                 : "'" + f->name + "' redeclared as a function");
      } else {
        m_.global_scope.emplace(f->name, sym.get());
      }
      m_.function_symbols.push_back(std::move(sym));
    }
    for (auto& s : m_.structs) {
      for (auto& ms : s->method_symbols) {
        auto it = m_.global_scope.find(ms->link_name);
        if (it != m_.global_scope.end()) {
          diags_.error(ms->pos, "method link name '" + ms->link_name +
                                    "' collides with a global of the same name");
        }
      }
    }
  }

  // --- function bodies ----------------------------------------------------

  struct FunctionContext {
    FuncDef* fn = nullptr;
    StructDef* owner = nullptr;
    std::vector<std::map<std::string, Symbol*>> scopes;
    std::int64_t frame = 0;
    int loop_depth = 0;
  };

  void check_function(FuncDef& f) {
    FunctionContext ctx;
    ctx.fn = &f;
    ctx.owner = f.owner;
    ctx.scopes.emplace_back();
    ctx_ = &ctx;

    resolve_type(f.return_type, f.pos, false);
    if (!f.return_type.is_scalar()) {
      diags_.error(f.pos, "function '" + f.name + "' must return a scalar");
    }

    std::int32_t offset = 8;
    if (f.owner) {
      f.this_param = std::make_unique<Symbol>();
      f.this_param->name = "this";
      f.this_param->storage = Storage::Parameter;
      f.this_param->type.base = BaseKind::Struct;
      f.this_param->type.struct_name = f.owner->name;
      f.this_param->type.record = f.owner;
      f.this_param->type = f.this_param->type.pointer_to();
      f.this_param->offset = offset;
      offset += 4;
    }
    for (auto& p : f.params) {
      resolve_type(p->type, p->pos, false);
      if (p->type.is_array()) p->type = p->type.decay();
      if (p->type.is_struct()) {
        diags_.error(p->pos, "structure parameter '" + p->name + "' must be passed by address");
      }
      p->offset = offset;
      offset += 4;
      ctx.scopes.back()[p->name] = p.get();
    }
    for (auto& s : f.body->body) statement(*s);
    f.frame_size = align4(ctx.frame);
    ctx_ = nullptr;
  }

  void statement(Stmt& s) {
    auto& ctx = *ctx_;
    switch (s.kind) {
      case StmtKind::Block:
        ctx.scopes.emplace_back();
        for (auto& c : s.body) statement(*c);
        ctx.scopes.pop_back();
        break;
      case StmtKind::VarDecl:
        for (auto& d : s.decls) {
          if (d->storage == Storage::Extern) {
            resolve_type(d->type, d->pos, false);
            d->link_name = d->name;
          } else if (resolve_type(d->type, d->pos, true)) {
            ctx.frame += align4(d->type.size_bytes());
            if (ctx.frame > kMaxObjectSize) {
              diags_.error(d->pos, "local variables exceed the frame limit");
              ctx.frame = 0;
            }
            d->offset = static_cast<std::int32_t>(-ctx.frame);
            ctx.fn->locals.push_back(d.get());
          }
          ctx.scopes.back()[d->name] = d.get();
        }
        break;
      case StmtKind::If:
        value(*s.cond);
        statement(*s.then_branch);
        if (s.else_branch) statement(*s.else_branch);
        break;
      case StmtKind::While:
        value(*s.cond);
        ++ctx.loop_depth;
        statement(*s.loop_body);
        --ctx.loop_depth;
        break;
      case StmtKind::For:
        if (s.init) expr(*s.init);
        if (s.cond) value(*s.cond);
        if (s.step) expr(*s.step);
        ++ctx.loop_depth;
        statement(*s.loop_body);
        --ctx.loop_depth;
        break;
      case StmtKind::Return:
        if (s.value) value(*s.value);
        break;
      case StmtKind::Break:
      case StmtKind::Continue:
        if (ctx.loop_depth == 0) {
          diags_.error(s.pos, std::string(s.kind == StmtKind::Break ? "'break'" : "'continue'") +
                                  " outside of a loop");
        }
        break;
      case StmtKind::ExprStmt:
        expr(*s.value);
        break;
      case StmtKind::Empty:
        break;
    }
  }

  Symbol* lookup_local(const std::string& name) {
    for (auto it = ctx_->scopes.rbegin(); it != ctx_->scopes.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return nullptr;
  }

  Symbol* lookup_global(const std::string& name) {
    auto it = m_.global_scope.find(name);
    return it == m_.global_scope.end() ? nullptr : it->second;
  }

  Symbol* find_method_symbol(const StructDef& s, const std::string& name) {
    for (auto& ms : s.method_symbols) {
      if (ms->name == name) return ms.get();
    }
    return nullptr;
  }

  // --- expressions --------------------------------------------------------

  static bool is_lvalue(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Ident:
      case ExprKind::Index:
      case ExprKind::Member:
        return true;
      case ExprKind::Unary:
        return e.unary == UnaryOp::Deref;
      default:
        return false;
    }
  }

  void set_error_type(Expr& e) { e.type = TypeExpr::int_type(); }

  // Checks `e` in value position and returns its decayed type.
  TypeExpr value(Expr& e) {
    expr(e);
    TypeExpr t = e.type->decay();
    if (t.is_struct()) {
      diags_.error(e.pos, "structure value used where a scalar is required");
      return TypeExpr::int_type();
    }
    return t;
  }

  std::unique_ptr<Expr> make_this(SourcePos pos) {
    auto t = std::make_unique<Expr>();
    t->kind = ExprKind::This;
    t->pos = pos;
    t->text = "this";
    return t;
  }

  void expr(Expr& e) {
    switch (e.kind) {
      case ExprKind::Number:
        e.type = TypeExpr::int_type();
        return;
      case ExprKind::String:
        e.type = TypeExpr::char_type().pointer_to();
        return;
      case ExprKind::This:
        if (!ctx_->fn->this_param) {
          diags_.error(e.pos, "'this' used outside of a method");
          set_error_type(e);
        } else {
          e.symbol = ctx_->fn->this_param.get();
          e.type = e.symbol->type;
        }
        return;
      case ExprKind::Ident:
        identifier(e);
        return;
      case ExprKind::Unary:
        unary(e);
        return;
      case ExprKind::Binary:
        binary(e);
        return;
      case ExprKind::Assign:
        assign(e);
        return;
      case ExprKind::IncDec: {
        expr(*e.lhs);
        if (!is_lvalue(*e.lhs) || !e.lhs->type->is_scalar()) {
          diags_.error(e.pos, "increment or decrement of non-assignable expression");
        } else if (e.lhs->type->is_pointer()) {
          pointee_size(*e.lhs->type, e.pos);
        }
        e.type = e.lhs->type->is_scalar() ? *e.lhs->type : TypeExpr::int_type();
        return;
      }
      case ExprKind::Call:
        call(e);
        return;
      case ExprKind::Index: {
        TypeExpr base = value(*e.lhs);
        TypeExpr index = value(*e.rhs);
        if (!base.is_pointer()) {
          diags_.error(e.pos, "subscripted value is not an array or pointer");
          set_error_type(e);
          return;
        }
        if (!index.is_integer()) diags_.error(e.rhs->pos, "array index is not an integer");
        e.type = base.element();
        pointee_size(base, e.pos);
        return;
      }
      case ExprKind::Member:
        member(e);
        return;
    }
  }

  void identifier(Expr& e) {
    if (Symbol* s = lookup_local(e.text)) {
      e.symbol = s;
      e.type = s->type;
      return;
    }
    if (ctx_->owner) {
      if (ctx_->owner->find_member(e.text)) {
        // Bare member inside a method: same as `this->member`.
        e.kind = ExprKind::Member;
        e.arrow = true;
        e.lhs = make_this(e.pos);
        member(e);
        return;
      }
      if (ctx_->owner->find_method(e.text)) {
        diags_.error(e.pos, "method '" + e.text + "' used as a value");
        set_error_type(e);
        return;
      }
    }
    Symbol* g = lookup_global(e.text);
    if (!g) {
      diags_.error(e.pos, "undeclared identifier '" + e.text + "'");
      set_error_type(e);
      return;
    }
    if (g->is_function) {
      diags_.error(e.pos, "function '" + e.text + "' used as a value");
      set_error_type(e);
      return;
    }
    e.symbol = g;
    e.type = g->type;
  }

  void member(Expr& e) {
    expr(*e.lhs);
    TypeExpr obj = *e.lhs->type;
    if (e.arrow) {
      obj = obj.decay();
      if (!obj.is_pointer() || !obj.element().is_struct()) {
        diags_.error(e.pos, "member access '->" + e.text + "' on non-structure pointer");
        set_error_type(e);
        return;
      }
      obj = obj.element();
    } else if (!obj.is_struct()) {
      diags_.error(e.pos, "member access '." + e.text + "' on non-structure");
      set_error_type(e);
      return;
    }
    const StructDef* s = obj.record;
    const Symbol* mem = s ? s->find_member(e.text) : nullptr;
    if (!mem) {
      if (s && s->find_method(e.text)) {
        diags_.error(e.pos, "method '" + e.text + "' used as a value");
      } else {
        diags_.error(e.pos, "no member named '" + e.text + "' in '" + obj.struct_name + "'");
      }
      set_error_type(e);
      return;
    }
    e.symbol = const_cast<Symbol*>(mem);
    e.type = mem->type;
  }

  std::int64_t pointee_size(const TypeExpr& ptr, SourcePos pos) {
    std::int64_t n = ptr.element().size_bytes();
    if (n < 0) {
      diags_.error(pos, "arithmetic on pointer to incomplete type");
      return 1;
    }
    return n;
  }

  void unary(Expr& e) {
    switch (e.unary) {
      case UnaryOp::Neg:
      case UnaryOp::BitNot: {
        TypeExpr t = value(*e.lhs);
        if (!t.is_integer()) {
          diags_.error(e.pos, std::string("invalid operand to unary '") +
                                  (e.unary == UnaryOp::Neg ? "-" : "~") + "'");
        }
        e.type = TypeExpr::int_type();
        return;
      }
      case UnaryOp::LogNot:
        value(*e.lhs);
        e.type = TypeExpr::int_type();
        return;
      case UnaryOp::Deref: {
        TypeExpr t = value(*e.lhs);
        if (!t.is_pointer()) {
          diags_.error(e.pos, "dereference of non-pointer");
          set_error_type(e);
          return;
        }
        e.type = t.element();
        return;
      }
      case UnaryOp::AddrOf:
        expr(*e.lhs);
        if (!is_lvalue(*e.lhs)) {
          diags_.error(e.pos, "cannot take the address of this expression");
          set_error_type(e);
          return;
        }
        e.type = e.lhs->type->pointer_to();
        return;
    }
  }

  void binary(Expr& e) {
    TypeExpr l = value(*e.lhs);
    TypeExpr r = value(*e.rhs);
    auto bad = [&] {
      diags_.error(e.pos, std::string("invalid operands to binary '") +
                              binary_op_spelling(e.binary) + "'");
      e.type = TypeExpr::int_type();
    };
    switch (e.binary) {
      case BinaryOp::Add:
        if (l.is_pointer() && r.is_integer()) {
          pointee_size(l, e.pos);
          e.type = l;
        } else if (l.is_integer() && r.is_pointer()) {
          pointee_size(r, e.pos);
          e.type = r;
        } else if (l.is_integer() && r.is_integer()) {
          e.type = TypeExpr::int_type();
        } else {
          bad();
        }
        return;
      case BinaryOp::Sub:
        if (l.is_pointer() && r.is_integer()) {
          pointee_size(l, e.pos);
          e.type = l;
        } else if (l.is_pointer() && r.is_pointer()) {
          if (l.element().size_bytes() != r.element().size_bytes()) {
            diags_.error(e.pos, "difference of pointers to incompatible types");
          }
          pointee_size(l, e.pos);
          e.type = TypeExpr::int_type();
        } else if (l.is_integer() && r.is_integer()) {
          e.type = TypeExpr::int_type();
        } else {
          bad();
        }
        return;
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
      case BinaryOp::And:
      case BinaryOp::Or:
      case BinaryOp::Xor:
      case BinaryOp::Shl:
      case BinaryOp::Shr:
        if (!l.is_integer() || !r.is_integer()) {
          bad();
          return;
        }
        e.type = TypeExpr::int_type();
        return;
      default:  // comparisons and logical operators
        e.type = TypeExpr::int_type();
        return;
    }
  }

  void assign(Expr& e) {
    expr(*e.lhs);
    TypeExpr r = value(*e.rhs);
    const TypeExpr& l = *e.lhs->type;
    if (!is_lvalue(*e.lhs) || !l.is_scalar()) {
      diags_.error(e.pos, l.is_struct() ? "assignment to non-assignable expression (structure)"
                                        : "assignment to non-assignable expression");
      e.type = TypeExpr::int_type();
      return;
    }
    if (e.compound) {
      BinaryOp op = *e.compound;
      bool pointer_step = (op == BinaryOp::Add || op == BinaryOp::Sub) && l.is_pointer();
      if (pointer_step) {
        if (!r.is_integer()) diags_.error(e.pos, "pointer compound assignment needs an integer");
        pointee_size(l, e.pos);
      } else if (!l.is_integer() || !r.is_integer()) {
        diags_.error(e.pos, std::string("invalid operands to '") + binary_op_spelling(op) + "='");
      }
    }
    e.type = l;
  }

  void call(Expr& e) {
    Expr& callee = *e.lhs;
    e.type = TypeExpr::int_type();
    callee.type = TypeExpr::int_type();
    const FuncDef* target = nullptr;

    if (callee.kind == ExprKind::Ident) {
      if (Symbol* local = lookup_local(callee.text)) {
        diags_.error(callee.pos, "called object '" + callee.text + "' is not a function");
        (void)local;
      } else if (ctx_->owner && ctx_->owner->find_method(callee.text)) {
        e.symbol = find_method_symbol(*ctx_->owner, callee.text);
        e.method_call = true;
        e.instance = make_this(callee.pos);
        e.instance_is_pointer = true;
        expr(*e.instance);
        target = e.symbol->function;
      } else if (ctx_->owner && ctx_->owner->find_member(callee.text)) {
        diags_.error(callee.pos, "called object '" + callee.text + "' is not a function");
      } else if (Symbol* g = lookup_global(callee.text)) {
        if (!g->is_function) {
          diags_.error(callee.pos, "called object '" + callee.text + "' is not a function");
        } else {
          e.symbol = g;
          target = g->function;
        }
      } else {
        // Undeclared callee: an extern function returning int.
        auto ext = std::make_unique<Symbol>();
        ext->name = callee.text;
        ext->storage = Storage::Extern;
        ext->link_name = callee.text;
        ext->pos = callee.pos;
        ext->is_function = true;
        e.symbol = ext.get();
        m_.global_scope.emplace(callee.text, ext.get());
        m_.implicit_externs.push_back(std::move(ext));
      }
    } else if (callee.kind == ExprKind::Member) {
      expr(*callee.lhs);
      TypeExpr obj = *callee.lhs->type;
      bool via_pointer = callee.arrow;
      if (via_pointer) obj = obj.decay();
      const bool ok = via_pointer ? (obj.is_pointer() && obj.element().is_struct()) : obj.is_struct();
      if (!ok) {
        diags_.error(callee.pos, "method call on non-structure");
      } else {
        const StructDef* s = via_pointer ? obj.element().record : obj.record;
        Symbol* ms = s ? find_method_symbol(*s, callee.text) : nullptr;
        if (!ms) {
          diags_.error(callee.pos, "no method named '" + callee.text + "' in '" + s->name + "'");
        } else {
          e.symbol = ms;
          e.method_call = true;
          e.instance = std::move(callee.lhs);
          e.instance_is_pointer = via_pointer;
          if (!via_pointer && !is_lvalue(*e.instance)) {
            diags_.error(callee.pos, "method call needs an addressable structure");
          }
          target = ms->function;
          // Keep the callee node well-formed after moving the object out.
          callee.kind = ExprKind::Ident;
        }
      }
    } else {
      expr(callee);
      diags_.error(callee.pos, "called object is not a function");
    }

    for (auto& a : e.args) value(*a);
    if (target) {
      e.type = target->return_type.is_scalar() ? target->return_type : TypeExpr::int_type();
      if (target->params.size() != e.args.size()) {
        diags_.error(e.pos, "wrong number of arguments to '" + target->name + "': expected " +
                                std::to_string(target->params.size()) + ", got " +
                                std::to_string(e.args.size()));
      }
    }
  }

  Module& m_;
  Diagnostics& diags_;
  FunctionContext* ctx_ = nullptr;
};

bool expr_typed(const Expr& e) {
  if (!e.type) return false;
  if (e.lhs && !expr_typed(*e.lhs)) return false;
  if (e.rhs && !expr_typed(*e.rhs)) return false;
  if (e.instance && !expr_typed(*e.instance)) return false;
  for (const auto& a : e.args) {
    if (!expr_typed(*a)) return false;
  }
  return true;
}

bool stmt_typed(const Stmt& s) {
  for (const auto* e : {s.init.get(), s.cond.get(), s.step.get(), s.value.get()}) {
    if (e && !expr_typed(*e)) return false;
  }
  for (const auto* c : {s.then_branch.get(), s.else_branch.get(), s.loop_body.get()}) {
    if (c && !stmt_typed(*c)) return false;
  }
  for (const auto& c : s.body) {
    if (!stmt_typed(*c)) return false;
  }
  return true;
}

}  // namespace

bool resolve_and_check(Module& module, Diagnostics& diags) {
  const std::size_t before = diags.count();
  Resolver(module, diags).run();
  return diags.count() == before;
}

bool all_expressions_typed(const Module& module) {
  for (const auto& f : module.functions) {
    if (f->body && !stmt_typed(*f->body)) return false;
  }
  for (const auto& s : module.structs) {
    for (const auto& m : s->methods) {
      if (m->body && !stmt_typed(*m->body)) return false;
    }
  }
  return true;
}

}  // namespace uplnc
