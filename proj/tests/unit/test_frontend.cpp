#include <functional>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "uplnc/frontend.hpp"
#include "uplnc/token.hpp"

using namespace uplnc;

namespace {

struct Parsed {
  Diagnostics diags;
  std::vector<Token> tokens;
  Module module;
  bool checked = false;
};

std::unique_ptr<Parsed> parse(const std::string& text, bool check = true) {
  auto p = std::make_unique<Parsed>();
  p->tokens = tokenize(text, p->diags);
  p->module = parse_program(p->tokens, p->diags);
  if (check && !p->diags.has_errors()) p->checked = resolve_and_check(p->module, p->diags);
  return p;
}

const Symbol* global(const Module& m, const std::string& name) {
  for (const auto& g : m.globals) {
    if (g->name == name) return g.get();
  }
  return nullptr;
}

const FuncDef* method(const Module& m, const std::string& s, const std::string& name) {
  const StructDef* sd = m.find_struct(s);
  return sd ? sd->find_method(name) : nullptr;
}

void walk(const Expr* e, const std::function<void(const Expr&)>& f) {
  if (!e) return;
  f(*e);
  walk(e->lhs.get(), f);
  walk(e->rhs.get(), f);
  walk(e->instance.get(), f);
  for (const auto& a : e->args) walk(a.get(), f);
}

void walk(const Stmt* s, const std::function<void(const Expr&)>& f) {
  if (!s) return;
  for (const auto& b : s->body) walk(b.get(), f);
  for (const Expr* e : {s->init.get(), s->cond.get(), s->step.get(), s->value.get()}) walk(e, f);
  walk(s->then_branch.get(), f);
  walk(s->else_branch.get(), f);
  walk(s->loop_body.get(), f);
}

const char* kDeclarationListing =
    "var a,b,c:[3]*char;\n"
    "var [3]*char:d,e,f;\n"
    "var extern a1,a2:int;\n"
    "var extern int:a3;\n"
    "var int extern:a4;\n"
    "var a5:extern int;\n"
    "var a6:int extern;\n"
    "var extern a7:extern int extern;\n"
    "var extern **int extern: extern a8;\n";

}  // namespace

TEST_CASE("tokenizing a declaration") {
  Diagnostics d;
  auto toks = tokenize("var a,b,c:[3]*char;", d);
  CHECK_FALSE(d.has_errors());
  const std::vector<std::pair<TokenKind, std::string>> expected = {
      {TokenKind::Keyword, "var"}, {TokenKind::Identifier, "a"}, {TokenKind::Punct, ","},
      {TokenKind::Identifier, "b"}, {TokenKind::Punct, ","},    {TokenKind::Identifier, "c"},
      {TokenKind::Punct, ":"},     {TokenKind::Punct, "["},     {TokenKind::Number, "3"},
      {TokenKind::Punct, "]"},     {TokenKind::Punct, "*"},     {TokenKind::Keyword, "char"},
      {TokenKind::Punct, ";"}};
  REQUIRE(toks.size() == expected.size());
  for (std::size_t i = 0; i < toks.size(); ++i) {
    CHECK(toks[i].kind == expected[i].first);
    CHECK(toks[i].text == expected[i].second);
  }
  CHECK(toks[0].line == 1);
  CHECK(toks[0].col == 1);
  CHECK(toks[8].col == 12);
}

TEST_CASE("longest match for multi-character punctuators") {
  Diagnostics d;
  auto toks = tokenize("i++$ a<<=b->c", d);
  CHECK(d.has_errors());  // `$` is not a token
  d.clear();
  toks = tokenize("i++ a<<=b->c!=d&&e", d);
  CHECK_FALSE(d.has_errors());
  std::vector<std::string> spell;
  for (const auto& t : toks) spell.push_back(t.text);
  CHECK(spell == std::vector<std::string>{"i", "++", "a", "<<=", "b", "->", "c", "!=", "d", "&&",
                                          "e"});
}

TEST_CASE("lexical errors") {
  Diagnostics d;
  tokenize("x = 12ab;", d);
  CHECK(d.count() == 1);
  d.clear();
  tokenize("s = \"open", d);
  CHECK(d.count() == 1);
  d.clear();
  tokenize("c = 'ab';", d);
  CHECK(d.count() == 1);
}

TEST_CASE("literal decoding") {
  CHECK(decode_literal("\"a\\n\\t\\\\\\\"\"") == "a\n\t\\\"");
  CHECK(decode_literal("'\\0'") == std::string(1, '\0'));
  CHECK(decode_literal("'x'") == "x");
}

TEST_CASE("detokenize then tokenize is the identity on token sequences") {
  auto same = [](const std::vector<Token>& a, const std::vector<Token>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].kind != b[i].kind || a[i].text != b[i].text) return false;
    }
    return true;
  };
  Diagnostics d;
  for (const char* name : {"primes_canonical.e", "structs.e", "pointers.e", "recursion.e"}) {
    std::string src = testsupport::read_corpus(name);
    // Strip directives and comments the lexer never sees.
    std::string body;
    for (std::size_t p = 0; p < src.size();) {
      std::size_t e = src.find('\n', p);
      if (e == std::string::npos) e = src.size();
      std::string line = src.substr(p, e - p);
      if (line.rfind("#", 0) != 0) body += line + "\n";
      p = e + 1;
    }
    for (std::size_t c; (c = body.find("/*")) != std::string::npos;) {
      body.erase(c, body.find("*/", c) + 2 - c);
    }
    auto toks = tokenize(body, d);
    REQUIRE_MESSAGE(!d.has_errors(), name << ": " << d.format());
    CHECK(same(tokenize(detokenize(toks), d), toks));
  }

  // Random sequences drawn from every token class, including pairs like
  // `+` `+` and `-` `>` that must not fuse.
  std::mt19937 rng(12345);
  std::vector<std::string> pool{"x", "_y1", "var", "proc", "0", "4096", "\"s\\n\"", "'c'", "'\\''"};
  for (auto p : punctuator_spellings()) pool.emplace_back(p);
  for (int round = 0; round < 300; ++round) {
    std::vector<Token> toks;
    std::string text;
    const int len = 1 + static_cast<int>(rng() % 25);
    for (int i = 0; i < len; ++i) text += pool[rng() % pool.size()] + " ";
    toks = tokenize(text, d);
    REQUIRE(!d.has_errors());
    CHECK(same(tokenize(detokenize(toks), d), toks));
  }
}

TEST_CASE("the nine declaration styles agree") {
  auto p = parse(kDeclarationListing);
  REQUIRE_MESSAGE(!p->diags.has_errors(), p->diags.format());
  REQUIRE(p->checked);

  const Symbol* a = global(p->module, "a");
  REQUIRE(a);
  CHECK(a->type.to_string() == "[3]*char");
  CHECK(a->type.size_bytes() == 12);
  REQUIRE(a->type.ctors.size() == 2);
  CHECK(a->type.ctors[0].kind == TypeCtor::Kind::Array);
  CHECK(a->type.ctors[0].count == 3);
  CHECK(a->type.ctors[1].kind == TypeCtor::Kind::Pointer);
  CHECK(a->type.base == BaseKind::Char);
  for (const char* n : {"a", "b", "c", "d", "e", "f"}) {
    const Symbol* s = global(p->module, n);
    REQUIRE(s);
    CHECK(s->type == a->type);
    CHECK(s->storage == Storage::GlobalDefined);
  }
  for (const char* n : {"a1", "a2", "a3", "a4", "a5", "a6", "a7"}) {
    const Symbol* s = global(p->module, n);
    REQUIRE_MESSAGE(s, n);
    CHECK(s->storage == Storage::Extern);
    CHECK(s->type == TypeExpr::int_type());
  }
  const Symbol* a8 = global(p->module, "a8");
  REQUIRE(a8);
  CHECK(a8->storage == Storage::Extern);
  CHECK(a8->type == TypeExpr::int_type().pointer_to().pointer_to());
}

TEST_CASE("parse_var_declaration reports where it stopped") {
  Diagnostics d;
  auto toks = tokenize("var x,y:*int; var z:char;", d);
  auto r = parse_var_declaration(toks, 0, d);
  CHECK_FALSE(d.has_errors());
  CHECK(r.symbols.size() == 2);
  CHECK(r.cursor == 8);
  CHECK(r.symbols[1].type.is_pointer());
}

TEST_CASE("type sizes") {
  auto p = parse(
      "struct P { var x,y:int; var tag:char; }\n"
      "var s:P; var ps:[2]P; var pp:*P; var m:[2][3]int; var cs:[5]char;\n");
  REQUIRE_MESSAGE(!p->diags.has_errors(), p->diags.format());
  CHECK(global(p->module, "s")->type.size_bytes() == 9);
  CHECK(global(p->module, "ps")->type.size_bytes() == 18);
  CHECK(global(p->module, "pp")->type.size_bytes() == 4);
  CHECK(global(p->module, "m")->type.size_bytes() == 24);
  CHECK(global(p->module, "cs")->type.size_bytes() == 5);
}

TEST_CASE("declaration errors") {
  CHECK(parse("var x:[0]int;")->diags.has_errors());
  CHECK(parse("var x:int; var x:char;")->diags.has_errors());
  CHECK_FALSE(parse("var extern x:int; var x:int;")->diags.has_errors());
  CHECK(parse("var x:Unknown;")->diags.has_errors());
}

TEST_CASE("the canonical primes program") {
  auto src = testsupport::read_corpus("primes_canonical.e");
  Diagnostics d;
  preproc::Options o;
  o.file_name = (testsupport::corpus_dir() / "primes_canonical.e").string();
  auto text = preproc::preprocess(src, d, o).text;
  auto p = parse(text);
  REQUIRE_MESSAGE(p->checked, p->diags.format());
  const Symbol* tab = global(p->module, "tab");
  REQUIRE(tab);
  CHECK(tab->type == TypeExpr::int_type().array_of(1001));
  REQUIRE(p->module.functions.size() == 2);
  CHECK(p->module.functions[0]->name == "doprimes");
  CHECK(p->module.functions[1]->name == "main");
  CHECK(all_expressions_typed(p->module));

  // tab[i] is an int.
  int seen = 0;
  walk(p->module.functions[0]->body.get(), [&](const Expr& e) {
    if (e.kind == ExprKind::Index) {
      REQUIRE(e.type);
      CHECK(*e.type == TypeExpr::int_type());
      ++seen;
    }
  });
  CHECK(seen == 3);
}

TEST_CASE("empty input is an empty module") {
  auto p = parse("");
  CHECK_FALSE(p->diags.has_errors());
  CHECK(p->module.globals.empty());
  CHECK(p->module.functions.empty());
  CHECK(p->module.structs.empty());
}

TEST_CASE("every expression is typed after checking") {
  for (const char* name : {"structs.e", "pointers.e", "recursion.e", "wordcount.e", "scaling.e"}) {
    Diagnostics d;
    auto text = preproc::preprocess(testsupport::read_corpus(name), d).text;
    auto p = parse(text);
    REQUIRE_MESSAGE(p->checked, name << ": " << p->diags.format());
    CHECK_MESSAGE(all_expressions_typed(p->module), name);
  }
}

TEST_CASE("bare member and this-qualified member bind to the same symbol") {
  auto p = parse(
      "struct Box { var w,h:int;\n"
      "  proc bare():int { return w*h; }\n"
      "  proc qualified():int { return this->w*this->h; }\n"
      "  proc setw(v:int) { w=v; } }\n");
  REQUIRE_MESSAGE(p->checked, p->diags.format());
  auto members_of = [&](const char* m) {
    std::vector<const Symbol*> out;
    const FuncDef* f = method(p->module, "Box", m);
    REQUIRE(f);
    walk(f->body.get(), [&](const Expr& e) {
      if (e.kind == ExprKind::Member) {
        CHECK(e.arrow);
        REQUIRE(e.lhs);
        CHECK(e.lhs->kind == ExprKind::This);
        out.push_back(e.symbol);
      }
    });
    return out;
  };
  auto bare = members_of("bare");
  auto qualified = members_of("qualified");
  REQUIRE(bare.size() == 2);
  CHECK(bare == qualified);
  CHECK(bare[0]->name == "w");
  CHECK(bare[0]->storage == Storage::Member);
  CHECK(bare[1]->offset == 4);
}

TEST_CASE("locals shadow members and globals") {
  auto p = parse(
      "var w:char;\n"
      "struct S { var w:int; proc m() { var w:*int; return w; } }\n");
  REQUIRE_MESSAGE(p->checked, p->diags.format());
  const FuncDef* m = method(p->module, "S", "m");
  walk(m->body.get(), [&](const Expr& e) {
    if (e.kind == ExprKind::Ident) CHECK(e.symbol->storage == Storage::Local);
    CHECK(e.kind != ExprKind::Member);
  });
}

TEST_CASE("semantic diagnostics") {
  SUBCASE("undeclared variable is named once") {
    auto p = parse("proc main() { return nope + 1; }");
    REQUIRE(p->diags.count() == 1);
    CHECK(p->diags.all()[0].message.find("'nope'") != std::string::npos);
  }
  SUBCASE("member access on a non-structure") {
    CHECK(parse("var x:int; proc main() { return x.y; }")->diags.has_errors());
  }
  SUBCASE("assignment to a non-assignable expression") {
    auto p = parse("var x:int; proc main() { x+1=2; }");
    REQUIRE(p->diags.has_errors());
    CHECK(p->diags.all()[0].message.find("non-assignable") != std::string::npos);
  }
  SUBCASE("break and continue outside loops") {
    CHECK(parse("proc main() { break; }")->diags.count() == 1);
    CHECK(parse("proc main() { continue; }")->diags.count() == 1);
    CHECK_FALSE(parse("proc main() { while(1) { if(1) break; continue; } }")->diags.has_errors());
  }
  SUBCASE("unknown member") {
    CHECK(parse("struct S { var a:int; } var s:S; proc main() { return s.b; }")
              ->diags.has_errors());
  }
  SUBCASE("wrong argument count to a defined function") {
    CHECK(parse("proc f(a:int) { return a; } proc main() { return f(1,2); }")
              ->diags.has_errors());
  }
  SUBCASE("undeclared callee becomes an implicit extern") {
    auto p = parse("proc main() { puts(\"hi\"); return 0; }");
    CHECK_FALSE(p->diags.has_errors());
    REQUIRE(p->module.implicit_externs.size() == 1);
    CHECK(p->module.implicit_externs[0]->name == "puts");
  }
}

TEST_CASE("syntax errors carry positions and the parser recovers") {
  auto p = parse("var x:int\nproc main() { x = ; y = 2 }\nproc g() { return 1; }", false);
  REQUIRE(p->diags.count() >= 2);
  for (const auto& d : p->diags.all()) CHECK(d.line >= 1);
  CHECK(p->diags.all()[0].message.find("expected") != std::string::npos);
}

TEST_CASE("if/else, while, compound assignment and shifts parse and type") {
  auto p = parse(
      "proc main() { var i,s:int; i=0; s=1;\n"
      "  while(i<8) { if(i%2==0) s<<=1; else s+=i; i++; }\n"
      "  return s>>1 | ~0 & 3 ^ -i; }");
  REQUIRE_MESSAGE(p->checked, p->diags.format());
  CHECK(all_expressions_typed(p->module));
}
