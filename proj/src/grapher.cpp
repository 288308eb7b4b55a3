#include "uplnc/grapher.hpp"

#include <algorithm>
#include <map>

namespace uplnc::grapher {

namespace {

constexpr int kRowsPerColumn = 8;
constexpr int kColumnSpacing = 4;

std::string node_name(const Symbol& s) {
  if (s.storage == Storage::Method && s.function && s.function->owner) {
    return s.function->owner->name + "." + s.name;
  }
  return s.name;
}

bool is_global(const Symbol& s) {
  return s.storage == Storage::GlobalDefined || s.storage == Storage::Extern ||
         s.storage == Storage::Method;
}

class Collector {
 public:
  Collector(RefGraph& g, std::set<std::string>& nodes) : g_(g), nodes_(nodes) {}

  void body(const std::string& from, const Stmt& s) {
    from_ = from;
    stmt(s);
  }

 private:
  void ref(const Symbol* s) {
    if (!s || !is_global(*s)) return;
    std::string to = node_name(*s);
    nodes_.insert(to);
    g_.edges.emplace(from_, to);
  }

  void stmt(const Stmt& s) {
    for (const auto* e : {s.init.get(), s.cond.get(), s.step.get(), s.value.get()}) {
      if (e) expr(*e);
    }
    for (const auto* c : {s.then_branch.get(), s.else_branch.get(), s.loop_body.get()}) {
      if (c) stmt(*c);
    }
    for (const auto& c : s.body) stmt(*c);
  }

  void expr(const Expr& e) {
    if (e.kind == ExprKind::Ident || e.kind == ExprKind::Call) ref(e.symbol);
    // The callee of a call was already recorded through the call's symbol.
    if (e.lhs && e.kind != ExprKind::Call) expr(*e.lhs);
    if (e.rhs) expr(*e.rhs);
    if (e.instance) expr(*e.instance);
    for (const auto& a : e.args) expr(*a);
  }

  RefGraph& g_;
  std::set<std::string>& nodes_;
  std::string from_;
};

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

}  // namespace

RefGraph build_ref_graph(const Module& module) {
  RefGraph g;
  std::set<std::string> nodes;
  for (const auto& v : module.globals) {
    if (v->storage == Storage::GlobalDefined) nodes.insert(v->name);
  }
  Collector c(g, nodes);
  for (const auto& f : module.functions) {
    nodes.insert(f->name);
    if (f->body) c.body(f->name, *f->body);
  }
  for (const auto& s : module.structs) {
    for (const auto& m : s->methods) {
      std::string name = s->name + "." + m->name;
      nodes.insert(name);
      if (m->body) c.body(name, *m->body);
    }
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  return g;
}

std::string emit_gnuplot(const RefGraph& graph) {
  const int n = static_cast<int>(graph.nodes.size());
  const int columns = (n + kRowsPerColumn - 1) / kRowsPerColumn;
  const int rows = std::min(n, kRowsPerColumn);

  std::map<std::string, std::pair<int, int>> at;
  for (int i = 0; i < n; ++i) {
    at[graph.nodes[static_cast<std::size_t>(i)]] = {kColumnSpacing * (i / kRowsPerColumn),
                                                    -(i % kRowsPerColumn)};
  }

  std::string s;
  s += "# symbol reference graph: " + std::to_string(n) + " nodes, " +
       std::to_string(graph.edges.size()) + " edges\n";
  s += "unset key\nunset border\nunset xtics\nunset ytics\n";
  s += "set xrange [-2:" + std::to_string(columns > 0 ? kColumnSpacing * (columns - 1) + 2 : 2) +
       "]\n";
  s += "set yrange [" + std::to_string(-(rows > 0 ? rows : 1)) + ":1]\n";
  for (int i = 0; i < n; ++i) {
    const auto& name = graph.nodes[static_cast<std::size_t>(i)];
    auto [x, y] = at[name];
    s += "set label " + std::to_string(i + 1) + " " + quote(name) + " at " + std::to_string(x) +
         "," + std::to_string(y) + " center\n";
  }
  int k = 0;
  for (const auto& [from, to] : graph.edges) {
    auto [x1, y1] = at[from];
    auto [x2, y2] = at[to];
    s += "set arrow " + std::to_string(++k) + " from " + std::to_string(x1) + "," +
         std::to_string(y1) + " to " + std::to_string(x2) + "," + std::to_string(y2) +
         " head filled\n";
  }
  s += "plot NaN notitle\n";
  return s;
}

}  // namespace uplnc::grapher
