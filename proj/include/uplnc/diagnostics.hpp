#pragma once

#include <string>
#include <vector>

namespace uplnc {

struct SourcePos {
  int line = 0;
  int col = 0;
};

struct LineOrigin {
  std::string file;
  int line = 0;
};

/// Maps each line of preprocessed text (index 0 is line 1) back to where it
/// came from.
using LineMap = std::vector<LineOrigin>;

struct Diagnostic {
  std::string file;
  int line = 0;
  int col = 0;
  std::string message;
};

// Collects errors from every stage. Stages keep going after an error where
// they can, so one run reports as much as possible.
class Diagnostics {
 public:
  void error(std::string file, int line, int col, std::string message);
  void error(SourcePos pos, std::string message) {
    error(default_file_, pos.line, pos.col, std::move(message));
  }

  void set_default_file(std::string file) { default_file_ = std::move(file); }
  const std::string& default_file() const { return default_file_; }

  bool has_errors() const { return !items_.empty(); }
  std::size_t count() const { return items_.size(); }
  const std::vector<Diagnostic>& all() const { return items_; }
  void clear() { items_.clear(); }

  // Rewrites positions of diagnostics that point into preprocessed text
  // (file == `preprocessed_file`) to their original file and line.
  void remap(const LineMap& map, const std::string& preprocessed_file);

  // One `file:line:col: message` line per diagnostic (`file: message` when
  // there is no position).
  std::string format() const;

 private:
  std::string default_file_ = "<input>";
  std::vector<Diagnostic> items_;
};

}  // namespace uplnc
