#include <map>
#include <random>
#include <regex>

#include "doctest.h"
#include "test_support.hpp"
#include "uplnc/grapher.hpp"

using namespace uplnc;
using Edge = std::pair<std::string, std::string>;

namespace {

grapher::RefGraph graph_of(const std::string& src, const std::string& name = "test.e") {
  auto c = testsupport::compile(src, name);
  REQUIRE_MESSAGE(c.ok(), c.diags.format());
  return grapher::build_ref_graph(c.unit->module);
}

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

// Reads the script back: label positions, then arrows as name pairs.
std::set<Edge> arrows_in(const std::string& script) {
  std::map<std::string, std::string> at;
  std::regex label(R"re(set label \d+ "([^"]+)" at (-?\d+),(-?\d+))re");
  for (auto it = std::sregex_iterator(script.begin(), script.end(), label);
       it != std::sregex_iterator(); ++it) {
    at[(*it)[2].str() + "," + (*it)[3].str()] = (*it)[1];
  }
  std::set<Edge> out;
  std::regex arrow(R"(set arrow \d+ from (-?\d+,-?\d+) to (-?\d+,-?\d+))");
  for (auto it = std::sregex_iterator(script.begin(), script.end(), arrow);
       it != std::sregex_iterator(); ++it) {
    out.insert({at.at((*it)[1]), at.at((*it)[2])});
  }
  return out;
}

}  // namespace

TEST_CASE("primes program graph") {
  const auto path = testsupport::corpus_dir() / "primes_redefined.e";
  auto g = graph_of(testsupport::read_corpus("primes_redefined.e"), path.string());
  CHECK(g.nodes == std::vector<std::string>{"doprimes", "main", "printf", "tab"});
  CHECK(g.edges == std::set<Edge>{{"main", "doprimes"}, {"doprimes", "printf"},
                                  {"doprimes", "tab"}});
  const std::string gp = grapher::emit_gnuplot(g);
  CHECK(count_of(gp, "set arrow") == 3);
  for (const char* n : {"\"doprimes\"", "\"main\"", "\"printf\"", "\"tab\""}) {
    CHECK(count_of(gp, n) == 1);
  }
  CHECK(arrows_in(gp) == g.edges);
  CHECK(grapher::emit_gnuplot(graph_of(testsupport::read_corpus("primes_redefined.e"),
                                       path.string())) == gp);
}

TEST_CASE("a lone global is an isolated node") {
  auto g = graph_of("var only:int;");
  CHECK(g.nodes == std::vector<std::string>{"only"});
  CHECK(g.edges.empty());
}

TEST_CASE("direct recursion is a self-edge") {
  auto g = graph_of("proc f(n:int) { if(n) return f(n-1); return 0; }");
  CHECK(g.edges == std::set<Edge>{{"f", "f"}});
  CHECK(count_of(grapher::emit_gnuplot(g), "set arrow") == 1);
}

TEST_CASE("locals, parameters and members contribute nothing") {
  auto g = graph_of(
      "var x:int;\n"
      "struct S { var x:int; proc m() { return x; } }\n"
      "proc f(x:int) { var y:int; y=x; return y; }\n"
      "proc h() { var s:S; return s.m(); }\n");
  CHECK(g.nodes == std::vector<std::string>{"S.m", "f", "h", "x"});
  CHECK(g.edges == std::set<Edge>{{"h", "S.m"}});
}

TEST_CASE("duplicate references collapse") {
  auto g = graph_of("var t:int; proc f() { t=t+t; return t; }");
  CHECK(g.edges.size() == 1);
}

TEST_CASE("empty graph script") {
  const std::string gp = grapher::emit_gnuplot({});
  CHECK(gp.rfind("#", 0) == 0);
  CHECK(count_of(gp, "set label") == 0);
  CHECK(count_of(gp, "set arrow") == 0);
  CHECK(gp.find("plot") != std::string::npos);
}

TEST_CASE("two nodes, one edge") {
  grapher::RefGraph g{{"a", "b"}, {{"a", "b"}}};
  const std::string gp = grapher::emit_gnuplot(g);
  CHECK(count_of(gp, "set label") == 2);
  CHECK(count_of(gp, "set arrow") == 1);
  CHECK(gp.find("set arrow 1 from 0,0 to 0,-1") != std::string::npos);
}

TEST_CASE("grid layout wraps after eight rows") {
  grapher::RefGraph g;
  for (int i = 0; i < 10; ++i) g.nodes.push_back("n" + std::to_string(i));
  const std::string gp = grapher::emit_gnuplot(g);
  CHECK(gp.find("\"n7\" at 0,-7") != std::string::npos);
  CHECK(gp.find("\"n8\" at 4,0") != std::string::npos);
  CHECK(gp.find("\"n9\" at 4,-1") != std::string::npos);
}

TEST_CASE("random programs: arrows match a text scan for global names") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 60; ++round) {
    const int ng = 1 + static_cast<int>(rng() % 5);
    const int nf = 1 + static_cast<int>(rng() % 5);
    std::vector<std::string> globals, funcs, bodies;
    for (int i = 0; i < ng; ++i) globals.push_back("g" + std::to_string(i));
    for (int i = 0; i < nf; ++i) funcs.push_back("fn" + std::to_string(i));

    std::string src;
    for (const auto& g : globals) src += "var " + g + ":int;\n";
    for (int f = 0; f < nf; ++f) {
      std::string body;
      const int stmts = static_cast<int>(rng() % 4);
      for (int s = 0; s < stmts; ++s) {
        switch (rng() % 4) {
          case 0:
            body += "  " + globals[rng() % ng] + " = " + globals[rng() % ng] + " + loc;\n";
            break;
          case 1: body += "  loc = " + funcs[rng() % nf] + "(x);\n"; break;
          case 2: body += "  printf(\"%d\", " + globals[rng() % ng] + ");\n"; break;
          default: body += "  loc = x * 2;\n";
        }
      }
      bodies.push_back(body);
      src += "proc " + funcs[f] + "(x:int)\n{\n  var loc:int;\n" + body + "  return loc;\n}\n";
    }

    // Oracle: word-boundary scan of each body for every global name.
    std::vector<std::string> names = globals;
    names.insert(names.end(), funcs.begin(), funcs.end());
    names.push_back("printf");
    std::set<Edge> expected;
    std::set<std::string> nodes(globals.begin(), globals.end());
    nodes.insert(funcs.begin(), funcs.end());
    for (int f = 0; f < nf; ++f) {
      for (const auto& n : names) {
        if (std::regex_search(bodies[f], std::regex("\\b" + n + "\\b"))) {
          expected.insert({funcs[f], n});
          nodes.insert(n);
        }
      }
    }

    auto g = graph_of(src);
    CHECK_MESSAGE(g.edges == expected, src);
    CHECK(g.nodes == std::vector<std::string>(nodes.begin(), nodes.end()));
    CHECK(arrows_in(grapher::emit_gnuplot(g)) == expected);
  }
}
