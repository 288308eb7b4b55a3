#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uplnc/ast.hpp"

namespace uplnc::grapher {

// Global names of one module and which definitions refer to which names.
struct RefGraph {
  std::vector<std::string> nodes;                        // sorted, unique
  std::set<std::pair<std::string, std::string>> edges;   // (from, to)
};

// Nodes are the module's defined globals, functions and methods (as
// `Struct.method`) plus every extern it references. An edge A -> B means
// the body of A mentions global B at least once. Locals, parameters and
// members contribute nothing.
RefGraph build_ref_graph(const Module& module);

// A gnuplot script: nodes on a grid (columns of at most 8, 4 units apart,
// rows 1 unit apart), one `set label` per node, one `set arrow` per edge,
// no axes, fixed ranges.
std::string emit_gnuplot(const RefGraph& graph);

}  // namespace uplnc::grapher
