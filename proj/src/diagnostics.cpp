#include "uplnc/diagnostics.hpp"

namespace uplnc {

void Diagnostics::error(std::string file, int line, int col, std::string message) {
  items_.push_back({std::move(file), line, col, std::move(message)});
}

void Diagnostics::remap(const LineMap& map, const std::string& preprocessed_file) {
  for (auto& d : items_) {
    if (d.file != preprocessed_file) continue;
    if (d.line >= 1 && static_cast<std::size_t>(d.line) <= map.size()) {
      const auto& origin = map[static_cast<std::size_t>(d.line) - 1];
      d.file = origin.file;
      d.line = origin.line;
    }
  }
}

std::string Diagnostics::format() const {
  std::string out;
  for (const auto& d : items_) {
    out += d.file;
    // Configuration problems have no source position.
    if (d.line > 0) out += ":" + std::to_string(d.line) + ":" + std::to_string(d.col);
    out += ": " + d.message + "\n";
  }
  return out;
}

}  // namespace uplnc
