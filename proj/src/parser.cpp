#include <map>

#include "uplnc/frontend.hpp"

namespace uplnc {

namespace {

struct ParseError {};

struct DeclInfo {
  TypeExpr type;
  bool is_extern = false;
};

class Parser {
 public:
  Parser(std::span<const Token> tokens, Diagnostics& diags, std::set<std::string> structs = {})
      : toks_(tokens), diags_(diags), struct_names_(std::move(structs)) {
    scopes_.emplace_back();
  }

  std::size_t cursor() const { return pos_; }
  void set_cursor(std::size_t c) { pos_ = c; }

  Module program() {
    Module m;
    while (!at_end()) {
      std::size_t before = pos_;
      try {
        if (peek().is_keyword("var")) {
          for (auto& s : var_declaration(Storage::GlobalDefined)) {
            m.globals.push_back(std::make_unique<Symbol>(std::move(s)));
          }
        } else if (peek().is_keyword("proc")) {
          m.functions.push_back(function(nullptr));
        } else if (peek().is_keyword("struct")) {
          m.structs.push_back(structure());
        } else {
          error_here("expected 'var', 'proc' or 'struct' declaration");
        }
      } catch (const ParseError&) {
        recover(before);
      }
    }
    return m;
  }

  std::vector<Symbol> var_declaration(Storage storage) {
    SourcePos start = expect_keyword("var").pos();
    bool leading_extern = false;
    while (peek().is_keyword("extern")) {
      advance();
      leading_extern = true;
    }
    struct Name {
      std::string text;
      SourcePos pos;
      bool is_extern;
    };
    std::vector<Name> names;
    auto parse_names = [&] {
      do {
        bool ext = false;
        while (peek().is_keyword("extern")) {
          advance();
          ext = true;
        }
        const Token& t = expect_identifier("variable name");
        names.push_back({t.text, t.pos(), ext});
      } while (accept_punct(","));
    };

    bool type_extern = false;
    TypeExpr type;
    if (starts_type(pos_)) {
      type = parse_type(type_extern, false);
      expect_punct(":");
      parse_names();
    } else {
      parse_names();
      expect_punct(":");
      type = parse_type(type_extern, true);
    }
    expect_punct(";");
    (void)start;

    std::vector<Symbol> out;
    std::map<std::string, bool> seen;
    for (const auto& n : names) {
      Symbol s;
      s.name = n.text;
      s.pos = n.pos;
      s.type = type;
      s.storage = (leading_extern || type_extern || n.is_extern) ? Storage::Extern : storage;
      if (!declare(s)) continue;
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  // --- declarations -------------------------------------------------------

  bool declare(const Symbol& s) {
    auto& scope = scopes_.back();
    const bool ext = s.storage == Storage::Extern;
    auto it = scope.find(s.name);
    if (it != scope.end()) {
      // An extern declaration may be repeated or completed by a definition
      // of the same type; anything else conflicts.
      if (!(it->second.type == s.type && (ext || it->second.is_extern) &&
            s.storage != Storage::Local && s.storage != Storage::Parameter)) {
        diags_.error(s.pos, "conflicting redeclaration of '" + s.name + "'");
        return false;
      }
      if (!ext) it->second.is_extern = false;
      return true;
    }
    scope[s.name] = {s.type, ext};
    return true;
  }

  bool starts_type(std::size_t at) const {
    while (at < toks_.size() && toks_[at].is_keyword("extern")) ++at;
    if (at >= toks_.size()) return false;
    const Token& t = toks_[at];
    if (t.is_punct("[") || t.is_punct("*") || t.is_keyword("int") || t.is_keyword("char")) {
      return true;
    }
    return t.kind == TokenKind::Identifier && struct_names_.count(t.text) != 0;
  }

  TypeExpr parse_type(bool& is_extern, bool allow_unknown_struct) {
    TypeExpr t;
    while (true) {
      const Token& tok = peek();
      if (tok.is_keyword("extern")) {
        advance();
        is_extern = true;
      } else if (tok.is_punct("[")) {
        advance();
        bool negative = accept_punct("-");
        const Token& n = peek();
        if (n.kind != TokenKind::Number) error_here("expected array dimension");
        advance();
        std::int64_t count = parse_number(n);
        if (negative) count = -count;
        if (count <= 0) {
          diags_.error(n.pos(), "array dimension must be positive");
          count = 1;
        }
        expect_punct("]");
        t.ctors.push_back({TypeCtor::Kind::Array, static_cast<std::int32_t>(count)});
      } else if (tok.is_punct("*")) {
        advance();
        t.ctors.push_back({TypeCtor::Kind::Pointer, 0});
      } else if (tok.is_keyword("int")) {
        advance();
        t.base = BaseKind::Int;
        break;
      } else if (tok.is_keyword("char")) {
        advance();
        t.base = BaseKind::Char;
        break;
      } else if (tok.kind == TokenKind::Identifier &&
                 (allow_unknown_struct || struct_names_.count(tok.text))) {
        advance();
        t.base = BaseKind::Struct;
        t.struct_name = tok.text;
        break;
      } else {
        error_here("expected type");
      }
    }
    while (peek().is_keyword("extern")) {
      advance();
      is_extern = true;
    }
    return t;
  }

  std::unique_ptr<FuncDef> function(StructDef* owner) {
    expect_keyword("proc");
    auto f = std::make_unique<FuncDef>();
    const Token& name = expect_identifier("function name");
    f->name = name.text;
    f->pos = name.pos();
    f->owner = owner;
    scopes_.emplace_back();
    expect_punct("(");
    if (!peek().is_punct(")")) {
      do {
        auto p = std::make_unique<Symbol>();
        p->storage = Storage::Parameter;
        bool ext = false;
        if (starts_type(pos_)) {
          p->type = parse_type(ext, false);
          expect_punct(":");
          const Token& pn = expect_identifier("parameter name");
          p->name = pn.text;
          p->pos = pn.pos();
        } else {
          const Token& pn = expect_identifier("parameter name");
          p->name = pn.text;
          p->pos = pn.pos();
          if (accept_punct(":")) p->type = parse_type(ext, true);
        }
        if (ext) diags_.error(p->pos, "parameter '" + p->name + "' cannot be extern");
        if (declare(*p)) f->params.push_back(std::move(p));
      } while (accept_punct(","));
    }
    expect_punct(")");
    if (accept_punct(":")) {
      bool ext = false;
      f->return_type = parse_type(ext, true);
    }
    // The body shares the parameter scope.
    f->body = block(false);
    scopes_.pop_back();
    return f;
  }

  std::unique_ptr<StructDef> structure() {
    expect_keyword("struct");
    auto s = std::make_unique<StructDef>();
    const Token& name = expect_identifier("structure name");
    s->name = name.text;
    s->pos = name.pos();
    if (struct_names_.count(s->name)) {
      diags_.error(s->pos, "redefinition of structure '" + s->name + "'");
    }
    struct_names_.insert(s->name);
    expect_punct("{");
    scopes_.emplace_back();
    while (!at_end() && !peek().is_punct("}")) {
      std::size_t before = pos_;
      try {
        if (peek().is_keyword("var")) {
          for (auto& m : var_declaration(Storage::Member)) {
            if (m.storage == Storage::Extern) {
              diags_.error(m.pos, "structure member '" + m.name + "' cannot be extern");
            }
            m.storage = Storage::Member;
            s->members.push_back(std::make_unique<Symbol>(std::move(m)));
          }
        } else if (peek().is_keyword("proc")) {
          auto fn = function(s.get());
          auto& scope = scopes_.back();
          if (scope.count(fn->name)) {
            diags_.error(fn->pos, "conflicting redeclaration of '" + fn->name + "'");
          } else {
            scope[fn->name] = {};
          }
          s->methods.push_back(std::move(fn));
        } else {
          error_here("expected 'var' or 'proc' in structure body");
        }
      } catch (const ParseError&) {
        recover(before);
      }
    }
    scopes_.pop_back();
    expect_punct("}");
    accept_punct(";");
    return s;
  }

  // --- statements ---------------------------------------------------------

  std::unique_ptr<Stmt> block(bool new_scope) {
    auto b = std::make_unique<Stmt>();
    b->kind = StmtKind::Block;
    b->pos = expect_punct("{").pos();
    if (new_scope) scopes_.emplace_back();
    while (!at_end() && !peek().is_punct("}")) {
      std::size_t before = pos_;
      try {
        b->body.push_back(statement());
      } catch (const ParseError&) {
        recover(before);
      }
    }
    if (new_scope) scopes_.pop_back();
    expect_punct("}");
    return b;
  }

  std::unique_ptr<Stmt> statement() {
    const Token& t = peek();
    auto s = std::make_unique<Stmt>();
    s->pos = t.pos();
    if (t.is_punct("{")) return block(true);
    if (t.is_keyword("var")) {
      s->kind = StmtKind::VarDecl;
      for (auto& d : var_declaration(Storage::Local)) {
        s->decls.push_back(std::make_unique<Symbol>(std::move(d)));
      }
      return s;
    }
    if (t.is_keyword("if")) {
      advance();
      s->kind = StmtKind::If;
      expect_punct("(");
      s->cond = expression();
      expect_punct(")");
      s->then_branch = statement();
      if (peek().is_keyword("else")) {
        advance();
        s->else_branch = statement();
      }
      return s;
    }
    if (t.is_keyword("while")) {
      advance();
      s->kind = StmtKind::While;
      expect_punct("(");
      s->cond = expression();
      expect_punct(")");
      s->loop_body = statement();
      return s;
    }
    if (t.is_keyword("for")) {
      advance();
      s->kind = StmtKind::For;
      expect_punct("(");
      if (!peek().is_punct(";")) s->init = expression();
      expect_punct(";");
      if (!peek().is_punct(";")) s->cond = expression();
      expect_punct(";");
      if (!peek().is_punct(")")) s->step = expression();
      expect_punct(")");
      s->loop_body = statement();
      return s;
    }
    if (t.is_keyword("return")) {
      advance();
      s->kind = StmtKind::Return;
      if (!peek().is_punct(";")) s->value = expression();
      expect_punct(";");
      return s;
    }
    if (t.is_keyword("break") || t.is_keyword("continue")) {
      s->kind = t.is_keyword("break") ? StmtKind::Break : StmtKind::Continue;
      advance();
      expect_punct(";");
      return s;
    }
    if (t.is_punct(";")) {
      advance();
      s->kind = StmtKind::Empty;
      return s;
    }
    s->kind = StmtKind::ExprStmt;
    s->value = expression();
    expect_punct(";");
    return s;
  }

  // --- expressions --------------------------------------------------------

  std::unique_ptr<Expr> expression() { return assignment(); }

  std::unique_ptr<Expr> assignment() {
    auto lhs = binary(1);
    static const std::pair<const char*, std::optional<BinaryOp>> kAssignOps[] = {
        {"=", std::nullopt},         {"+=", BinaryOp::Add}, {"-=", BinaryOp::Sub},
        {"*=", BinaryOp::Mul},       {"/=", BinaryOp::Div}, {"%=", BinaryOp::Mod},
        {"&=", BinaryOp::And},       {"|=", BinaryOp::Or},  {"^=", BinaryOp::Xor},
        {"<<=", BinaryOp::Shl},      {">>=", BinaryOp::Shr},
    };
    for (const auto& [spelling, op] : kAssignOps) {
      if (peek().is_punct(spelling)) {
        auto e = make(ExprKind::Assign, peek().pos());
        advance();
        e->compound = op;
        e->lhs = std::move(lhs);
        e->rhs = assignment();
        return e;
      }
    }
    return lhs;
  }

  static int precedence(const Token& t, BinaryOp& op) {
    if (t.kind != TokenKind::Punct) return 0;
    static const std::pair<const char*, std::pair<BinaryOp, int>> kOps[] = {
        {"||", {BinaryOp::LogOr, 1}}, {"&&", {BinaryOp::LogAnd, 2}}, {"|", {BinaryOp::Or, 3}},
        {"^", {BinaryOp::Xor, 4}},    {"&", {BinaryOp::And, 5}},     {"==", {BinaryOp::Eq, 6}},
        {"!=", {BinaryOp::Ne, 6}},    {"<", {BinaryOp::Lt, 7}},      {"<=", {BinaryOp::Le, 7}},
        {">", {BinaryOp::Gt, 7}},     {">=", {BinaryOp::Ge, 7}},     {"<<", {BinaryOp::Shl, 8}},
        {">>", {BinaryOp::Shr, 8}},   {"+", {BinaryOp::Add, 9}},     {"-", {BinaryOp::Sub, 9}},
        {"*", {BinaryOp::Mul, 10}},   {"/", {BinaryOp::Div, 10}},    {"%", {BinaryOp::Mod, 10}},
    };
    for (const auto& [spelling, info] : kOps) {
      if (t.text == spelling) {
        op = info.first;
        return info.second;
      }
    }
    return 0;
  }

  std::unique_ptr<Expr> binary(int min_prec) {
    auto lhs = unary();
    while (true) {
      BinaryOp op{};
      int prec = precedence(peek(), op);
      if (prec == 0 || prec < min_prec) return lhs;
      auto e = make(ExprKind::Binary, peek().pos());
      advance();
      e->binary = op;
      e->lhs = std::move(lhs);
      e->rhs = binary(prec + 1);
      lhs = std::move(e);
    }
  }

  std::unique_ptr<Expr> unary() {
    const Token& t = peek();
    if (t.kind == TokenKind::Punct) {
      static const std::pair<const char*, UnaryOp> kUnary[] = {
          {"-", UnaryOp::Neg},    {"!", UnaryOp::LogNot}, {"~", UnaryOp::BitNot},
          {"*", UnaryOp::Deref},  {"&", UnaryOp::AddrOf},
      };
      for (const auto& [spelling, op] : kUnary) {
        if (t.text == spelling) {
          auto e = make(ExprKind::Unary, t.pos());
          advance();
          e->unary = op;
          e->lhs = unary();
          return e;
        }
      }
      if (t.text == "++" || t.text == "--") {
        auto e = make(ExprKind::IncDec, t.pos());
        e->increment = t.text == "++";
        e->prefix = true;
        advance();
        e->lhs = unary();
        return e;
      }
    }
    return postfix();
  }

  std::unique_ptr<Expr> postfix() {
    auto e = primary();
    while (true) {
      const Token& t = peek();
      if (t.is_punct("[")) {
        auto ix = make(ExprKind::Index, t.pos());
        advance();
        ix->lhs = std::move(e);
        ix->rhs = expression();
        expect_punct("]");
        e = std::move(ix);
      } else if (t.is_punct("(")) {
        auto call = make(ExprKind::Call, t.pos());
        advance();
        call->lhs = std::move(e);
        if (!peek().is_punct(")")) {
          do {
            call->args.push_back(assignment());
          } while (accept_punct(","));
        }
        expect_punct(")");
        e = std::move(call);
      } else if (t.is_punct(".") || t.is_punct("->")) {
        auto m = make(ExprKind::Member, t.pos());
        m->arrow = t.is_punct("->");
        advance();
        m->text = expect_identifier("member name").text;
        m->lhs = std::move(e);
        e = std::move(m);
      } else if (t.is_punct("++") || t.is_punct("--")) {
        auto inc = make(ExprKind::IncDec, t.pos());
        inc->increment = t.is_punct("++");
        inc->prefix = false;
        advance();
        inc->lhs = std::move(e);
        e = std::move(inc);
      } else {
        return e;
      }
    }
  }

  std::unique_ptr<Expr> primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: {
        auto e = make(ExprKind::Number, t.pos());
        e->number = static_cast<std::int32_t>(static_cast<std::uint32_t>(parse_number(t)));
        advance();
        return e;
      }
      case TokenKind::Char: {
        auto e = make(ExprKind::Number, t.pos());
        e->number = static_cast<unsigned char>(decode_literal(t.text).front());
        advance();
        return e;
      }
      case TokenKind::String: {
        auto e = make(ExprKind::String, t.pos());
        while (peek().kind == TokenKind::String) {
          e->text += decode_literal(peek().text);
          advance();
        }
        return e;
      }
      case TokenKind::Identifier: {
        auto e = make(t.text == "this" ? ExprKind::This : ExprKind::Ident, t.pos());
        e->text = t.text;
        advance();
        return e;
      }
      default:
        break;
    }
    if (t.is_punct("(")) {
      advance();
      auto e = expression();
      expect_punct(")");
      return e;
    }
    error_here("expected expression");
  }

  // --- token helpers ------------------------------------------------------

  std::unique_ptr<Expr> make(ExprKind kind, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->pos = pos;
    return e;
  }

  std::int64_t parse_number(const Token& t) {
    std::uint64_t value = 0;
    bool hex = t.text.size() > 2 && (t.text[1] == 'x' || t.text[1] == 'X');
    for (std::size_t i = hex ? 2 : 0; i < t.text.size(); ++i) {
      char c = t.text[i];
      unsigned digit = (c >= '0' && c <= '9') ? unsigned(c - '0') : unsigned((c | 0x20) - 'a' + 10);
      value = value * (hex ? 16 : 10) + digit;
      if (value > 0xFFFFFFFFull) {
        diags_.error(t.pos(), "number '" + t.text + "' does not fit in 32 bits");
        return 0;
      }
    }
    return static_cast<std::int64_t>(value);
  }

  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& peek() const {
    static const Token kEnd{TokenKind::Punct, "", 0, 0};
    return at_end() ? kEnd : toks_[pos_];
  }

  void advance() {
    if (!at_end()) ++pos_;
  }

  bool accept_punct(std::string_view p) {
    if (peek().is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }

  std::string describe_current() const {
    if (at_end()) return "end of input";
    return "'" + peek().text + "'";
  }

  SourcePos current_pos() const {
    if (!at_end()) return peek().pos();
    if (!toks_.empty()) {
      const Token& last = toks_.back();
      return {last.line, last.col + static_cast<int>(last.text.size())};
    }
    return {1, 1};
  }

  [[noreturn]] void error_here(const std::string& what) {
    diags_.error(current_pos(), what + " before " + describe_current());
    throw ParseError{};
  }

  const Token& expect_punct(std::string_view p) {
    if (!peek().is_punct(p)) error_here("expected '" + std::string(p) + "'");
    const Token& t = toks_[pos_];
    advance();
    return t;
  }

  const Token& expect_keyword(std::string_view k) {
    if (!peek().is_keyword(k)) error_here("expected '" + std::string(k) + "'");
    const Token& t = toks_[pos_];
    advance();
    return t;
  }

  const Token& expect_identifier(const std::string& what) {
    if (peek().kind != TokenKind::Identifier || at_end()) error_here("expected " + what);
    const Token& t = toks_[pos_];
    advance();
    return t;
  }

  // Skips to just after the next `;`, or up to the next `}`.
  void recover(std::size_t before) {
    if (pos_ == before) advance();
    while (!at_end()) {
      if (peek().is_punct(";")) {
        advance();
        return;
      }
      if (peek().is_punct("}")) return;
      advance();
    }
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
  Diagnostics& diags_;
  std::set<std::string> struct_names_;
  std::vector<std::map<std::string, DeclInfo>> scopes_;
};

}  // namespace

VarDeclResult parse_var_declaration(std::span<const Token> tokens, std::size_t cursor,
                                    Diagnostics& diags, Storage default_storage,
                                    const std::set<std::string>& struct_names) {
  Parser p(tokens, diags, struct_names);
  p.set_cursor(cursor);
  VarDeclResult r;
  try {
    r.symbols = p.var_declaration(default_storage);
  } catch (const ParseError&) {
  }
  r.cursor = p.cursor();
  return r;
}

Module parse_program(std::span<const Token> tokens, Diagnostics& diags) {
  return Parser(tokens, diags).program();
}

}  // namespace uplnc
