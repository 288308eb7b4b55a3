#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uplnc/diagnostics.hpp"

// Line-oriented preprocessing: object-like macros, `#include "file"`,
// comment stripping, and syntax-element redefinition (`#syntax`).
namespace uplnc::preproc {

struct MacroDef {
  std::string name;
  std::string replacement;
};

enum class SyntaxElement { LParen, RParen, LBrace, RBrace, FuncKeyword };

struct SyntaxRule {
  SyntaxElement element;
  std::string surface;
};

struct PreprocOutput {
  std::string text;
  LineMap line_map;  // one entry per line of `text`
  std::vector<SyntaxRule> syntax_rules;  // collected from `#syntax` lines
};

struct Options {
  std::string file_name = "<stdin>";
  // Directory `#include "name"` is resolved against. Empty means the
  // directory of `file_name`.
  std::filesystem::path include_dir;
  int max_expansion_depth = 64;
  int max_include_depth = 16;
};

std::string_view element_name(SyntaxElement element);
std::string_view canonical_spelling(SyntaxElement element);
std::optional<SyntaxElement> element_from_name(std::string_view name);

// Handles directives, strips comments, and expands macros with rescanning.
// `#syntax` lines are recorded in the result and replaced by empty lines;
// their surfaces are copied through untouched by macro expansion.
PreprocOutput expand_text(std::string_view source, std::span<const MacroDef> initial_macros,
                          Diagnostics& diags, const Options& options = {});

// Replaces every rule surface outside literals by the element's canonical
// spelling, longest surface first. `#syntax` lines still present in `source`
// are consumed and override `rules` for the same element. Line structure is
// preserved.
std::string apply_syntax_redefinitions(std::string_view source, std::span<const SyntaxRule> rules,
                                       Diagnostics& diags,
                                       const std::string& file_name = "<stdin>");

// expand_text followed by apply_syntax_redefinitions.
PreprocOutput preprocess(std::string_view source, Diagnostics& diags, const Options& options = {},
                         std::span<const MacroDef> initial_macros = {});

}  // namespace uplnc::preproc
