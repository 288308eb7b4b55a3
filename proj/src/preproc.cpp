#include "uplnc/preproc.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "uplnc/token.hpp"

namespace uplnc::preproc {

namespace {

struct ElementInfo {
  SyntaxElement element;
  std::string_view name;
  std::string_view canonical;
};

constexpr ElementInfo kElements[] = {
    {SyntaxElement::LParen, "lparen", "("},
    {SyntaxElement::RParen, "rparen", ")"},
    {SyntaxElement::LBrace, "lbrace", "{"},
    {SyntaxElement::RBrace, "rbrace", "}"},
    {SyntaxElement::FuncKeyword, "func-keyword", "proc"},
};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\f\v";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

// Splits off the first whitespace-delimited word.
std::string_view take_word(std::string_view& rest) {
  rest = trim(rest);
  std::size_t e = 0;
  while (e < rest.size() && !is_space(rest[e])) ++e;
  std::string_view word = rest.substr(0, e);
  rest = trim(rest.substr(e));
  return word;
}

// Index just past a string/char literal starting at `i`, or npos when the
// literal is not closed on this line.
std::size_t skip_literal(std::string_view s, std::size_t i) {
  const char quote = s[i++];
  while (i < s.size()) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      i += 2;
      continue;
    }
    if (s[i] == quote) return i + 1;
    ++i;
  }
  return std::string_view::npos;
}

struct RecursiveMacro {
  std::string name;
};

class Expander {
 public:
  Expander(Diagnostics& diags, const Options& options, std::span<const MacroDef> initial)
      : diags_(diags), options_(options) {
    for (const auto& m : initial) macros_[m.name] = m.replacement;
  }

  PreprocOutput run(std::string_view source) {
    std::filesystem::path dir = options_.include_dir;
    if (dir.empty()) dir = std::filesystem::path(options_.file_name).parent_path();
    process(source, options_.file_name, dir, 0);
    std::string text;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      if (i) text += '\n';
      text += lines_[i];
    }
    if (lines_.empty()) out_.line_map.push_back({options_.file_name, 1});
    out_.text = std::move(text);
    return std::move(out_);
  }

 private:
  void process(std::string_view source, const std::string& file,
               const std::filesystem::path& dir, int depth) {
    bool in_comment = false;
    int comment_line = 0;
    int comment_col = 0;
    int ln = 0;
    for (std::string_view raw : split_lines(source)) {
      ++ln;
      if (!in_comment) {
        std::string_view t = trim(raw);
        if (!t.empty() && t.front() == '#') {
          directive(raw, file, dir, ln, depth);
          continue;
        }
      }
      std::string code;
      strip_comments(raw, file, ln, in_comment, comment_line, comment_col, code);
      emit(expand_line(code, file, ln), file, ln);
    }
    if (in_comment) diags_.error(file, comment_line, comment_col, "unterminated comment");
  }

  void emit(std::string line, const std::string& file, int ln) {
    lines_.push_back(std::move(line));
    out_.line_map.push_back({file, ln});
  }

  // Copies `raw` minus comments into `code`. A comment becomes one space.
  void strip_comments(std::string_view raw, const std::string& file, int ln, bool& in_comment,
                      int& comment_line, int& comment_col, std::string& code) {
    std::size_t i = 0;
    while (i < raw.size()) {
      if (in_comment) {
        if (raw.compare(i, 2, "*/") == 0) {
          in_comment = false;
          i += 2;
        } else {
          ++i;
        }
        continue;
      }
      char c = raw[i];
      if (c == '"' || c == '\'') {
        std::size_t end = skip_literal(raw, i);
        if (end == std::string_view::npos) {
          diags_.error(file, ln, static_cast<int>(i) + 1,
                       c == '"' ? "unterminated string literal" : "unterminated character literal");
          code.append(raw.substr(i));
          return;
        }
        code.append(raw.substr(i, end - i));
        i = end;
        continue;
      }
      if (raw.compare(i, 2, "/*") == 0) {
        in_comment = true;
        comment_line = ln;
        comment_col = static_cast<int>(i) + 1;
        code += ' ';
        i += 2;
        continue;
      }
      code += c;
      ++i;
    }
  }

  void directive(std::string_view raw, const std::string& file, const std::filesystem::path& dir,
                 int ln, int depth) {
    std::string stripped;
    bool in_comment = false;
    int cl = 0, cc = 0;
    strip_comments(raw, file, ln, in_comment, cl, cc, stripped);
    if (in_comment) diags_.error(file, cl, cc, "comment in directive is not closed on its line");

    std::string_view rest = trim(stripped);
    rest.remove_prefix(1);  // '#'
    std::string_view name = take_word(rest);
    const int col = static_cast<int>(raw.find('#')) + 1;

    if (name == "define") {
      std::string_view macro = take_word(rest);
      if (!is_valid_identifier(macro)) {
        diags_.error(file, ln, col, "invalid macro name '" + std::string(macro) + "'");
        return;
      }
      macros_[std::string(macro)] = std::string(rest);
    } else if (name == "syntax") {
      std::string_view element = take_word(rest);
      std::string_view surface = take_word(rest);
      auto e = element_from_name(element);
      if (!e) {
        diags_.error(file, ln, col, "unknown syntax element '" + std::string(element) + "'");
      } else if (surface.empty() || !rest.empty()) {
        diags_.error(file, ln, col, "expected '#syntax <element> <surface>'");
      } else {
        std::erase_if(out_.syntax_rules, [&](const SyntaxRule& r) { return r.element == *e; });
        out_.syntax_rules.push_back({*e, std::string(surface)});
      }
    } else if (name == "include") {
      include(rest, file, dir, ln, col, depth);
    } else {
      diags_.error(file, ln, col, "unknown directive '#" + std::string(name) + "'");
    }
  }

  void include(std::string_view arg, const std::string& file, const std::filesystem::path& dir,
               int ln, int col, int depth) {
    if (arg.size() < 2 || arg.front() != '"' || arg.back() != '"') {
      diags_.error(file, ln, col, "expected '#include \"file\"'");
      return;
    }
    if (depth + 1 > options_.max_include_depth) {
      diags_.error(file, ln, col, "#include nested too deeply");
      return;
    }
    std::filesystem::path path = dir / std::string(arg.substr(1, arg.size() - 2));
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      diags_.error(file, ln, col, "cannot open include file '" + path.string() + "'");
      return;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();
    if (!content.empty() && content.back() == '\n') content.pop_back();
    process(content, path.string(), path.parent_path(), depth + 1);
  }

  std::string expand_line(std::string_view code, const std::string& file, int ln) {
    std::string out;
    scan(code, 0, out, [&](const std::string& word, std::size_t at) {
      try {
        return expand_macro(word, 1);
      } catch (const RecursiveMacro&) {
        diags_.error(file, ln, static_cast<int>(at) + 1, "recursive macro '" + word + "'");
        return word;
      }
    });
    return out;
  }

  std::string expand_macro(const std::string& name, int depth) {
    if (depth > options_.max_expansion_depth) throw RecursiveMacro{name};
    std::string out;
    scan(macros_.at(name), depth, out,
         [&](const std::string& word, std::size_t) { return expand_macro(word, depth + 1); });
    return out;
  }

  // Walks `text`, copying literals, numbers, syntax surfaces and
  // non-macro identifiers verbatim and handing macro names to `on_macro`.
  template <typename OnMacro>
  void scan(std::string_view text, int, std::string& out, OnMacro&& on_macro) {
    std::size_t i = 0;
    while (i < text.size()) {
      char c = text[i];
      if (c == '"' || c == '\'') {
        std::size_t end = skip_literal(text, i);
        if (end == std::string_view::npos) end = text.size();
        out.append(text.substr(i, end - i));
        i = end;
        continue;
      }
      if (std::size_t n = surface_at(text, i)) {
        out.append(text.substr(i, n));
        i += n;
        continue;
      }
      if (is_ident_char(c) && !is_ident_start(c)) {
        std::size_t e = i;
        while (e < text.size() && is_ident_char(text[e])) ++e;
        out.append(text.substr(i, e - i));
        i = e;
        continue;
      }
      if (is_ident_start(c)) {
        std::size_t e = i;
        while (e < text.size() && is_ident_char(text[e])) ++e;
        std::string word(text.substr(i, e - i));
        if (macros_.count(word)) {
          out += on_macro(word, i);
        } else {
          out += word;
        }
        i = e;
        continue;
      }
      out += c;
      ++i;
    }
  }

  std::size_t surface_at(std::string_view text, std::size_t i) const {
    std::size_t best = 0;
    for (const auto& r : out_.syntax_rules) {
      if (r.surface.size() > best && text.compare(i, r.surface.size(), r.surface) == 0) {
        best = r.surface.size();
      }
    }
    return best;
  }

  Diagnostics& diags_;
  const Options& options_;
  std::map<std::string, std::string> macros_;
  std::vector<std::string> lines_;
  PreprocOutput out_;
};

bool is_core_spelling(std::string_view s) {
  const auto& kw = keyword_spellings();
  const auto& pu = punctuator_spellings();
  return std::find(kw.begin(), kw.end(), s) != kw.end() ||
         std::find(pu.begin(), pu.end(), s) != pu.end();
}

// True when a proper suffix of `a` equals a proper prefix of `b`; such
// surfaces make leftmost matching depend on context.
bool suffix_prefix_overlap(std::string_view a, std::string_view b) {
  for (std::size_t n = 1; n < a.size() && n < b.size(); ++n) {
    if (a.substr(a.size() - n) == b.substr(0, n)) return true;
  }
  return false;
}

bool validate_rules(std::span<const SyntaxRule> rules, Diagnostics& diags,
                    const std::string& file) {
  bool ok = true;
  auto fail = [&](std::string msg) {
    diags.error(file, 0, 0, std::move(msg));
    ok = false;
  };
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& s = rules[i].surface;
    const std::string quoted = "'" + s + "'";
    if (s.empty()) {
      fail("empty surface for syntax element '" + std::string(element_name(rules[i].element)) +
           "'");
      continue;
    }
    if (std::any_of(s.begin(), s.end(), [](char c) {
          return is_space(c) || c == '\n' || c == '"' || c == '\'';
        })) {
      fail("syntax surface " + quoted + " may not contain whitespace or quotes");
    }
    if (is_core_spelling(s)) fail("syntax surface " + quoted + " collides with a core token");
    for (std::size_t j = 0; j < rules.size(); ++j) {
      if (i == j) continue;
      const auto& t = rules[j].surface;
      if (rules[i].element == rules[j].element && i < j) {
        fail("more than one rule for syntax element '" +
             std::string(element_name(rules[i].element)) + "'");
      }
      if (s == t && i < j) fail("syntax surface " + quoted + " is used for two elements");
      if (s != t && suffix_prefix_overlap(s, t)) {
        fail("syntax surfaces " + quoted + " and '" + t + "' overlap");
      }
    }
  }
  return ok;
}

}  // namespace

std::string_view element_name(SyntaxElement element) {
  for (const auto& e : kElements) {
    if (e.element == element) return e.name;
  }
  return "?";
}

std::string_view canonical_spelling(SyntaxElement element) {
  for (const auto& e : kElements) {
    if (e.element == element) return e.canonical;
  }
  return "";
}

std::optional<SyntaxElement> element_from_name(std::string_view name) {
  for (const auto& e : kElements) {
    if (e.name == name) return e.element;
  }
  return std::nullopt;
}

PreprocOutput expand_text(std::string_view source, std::span<const MacroDef> initial_macros,
                          Diagnostics& diags, const Options& options) {
  for (const auto& m : initial_macros) {
    if (!is_valid_identifier(m.name)) {
      diags.error(options.file_name, 0, 0, "invalid macro name '" + m.name + "'");
    }
  }
  return Expander(diags, options, initial_macros).run(source);
}

std::string apply_syntax_redefinitions(std::string_view source, std::span<const SyntaxRule> rules,
                                       Diagnostics& diags, const std::string& file_name) {
  std::vector<SyntaxRule> merged(rules.begin(), rules.end());
  std::vector<SyntaxRule> in_file;
  std::string text;
  int ln = 0;
  for (std::string_view line : split_lines(source)) {
    ++ln;
    if (ln > 1) text += '\n';
    std::string_view t = trim(line);
    if (t.starts_with("#")) {
      std::string_view rest = trim(t.substr(1));
      if (take_word(rest) == "syntax") {
        std::string_view element = take_word(rest);
        std::string_view surface = take_word(rest);
        auto e = element_from_name(element);
        if (!e || surface.empty() || !rest.empty()) {
          diags.error(file_name, ln, 1, "malformed #syntax directive");
        } else {
          in_file.push_back({*e, std::string(surface)});
        }
        continue;
      }
    }
    text.append(line);
  }
  for (const auto& r : in_file) {
    std::erase_if(merged, [&](const SyntaxRule& m) { return m.element == r.element; });
  }
  merged.insert(merged.end(), in_file.begin(), in_file.end());
  if (merged.empty()) return text;
  if (!validate_rules(merged, diags, file_name)) return text;

  std::stable_sort(merged.begin(), merged.end(), [](const SyntaxRule& a, const SyntaxRule& b) {
    return a.surface.size() > b.surface.size();
  });

  std::string out;
  out.reserve(text.size());
  int line = 1;
  std::size_t line_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      out += c;
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t end = i + 1;
      while (end < text.size() && text[end] != '\n') {
        if (text[end] == '\\' && end + 1 < text.size() && text[end + 1] != '\n') {
          end += 2;
          continue;
        }
        if (text[end++] == c) break;
      }
      out.append(text, i, end - i);
      i = end;
      continue;
    }
    const SyntaxRule* hit = nullptr;
    for (const auto& r : merged) {
      if (text.compare(i, r.surface.size(), r.surface) == 0) {
        hit = &r;
        break;
      }
    }
    if (!hit) {
      out += c;
      ++i;
      continue;
    }
    const std::size_t end = i + hit->surface.size();
    const bool touches_before = is_ident_char(hit->surface.front()) && i > 0 &&
                                is_ident_char(text[i - 1]);
    const bool touches_after = is_ident_char(hit->surface.back()) && end < text.size() &&
                               is_ident_char(text[end]);
    if (touches_before || touches_after) {
      diags.error(file_name, line, static_cast<int>(i - line_start) + 1,
                  "syntax surface '" + hit->surface + "' is ambiguous next to an identifier");
      out.append(hit->surface);
      i = end;
      continue;
    }
    std::string_view canon = canonical_spelling(hit->element);
    const bool word = is_ident_char(canon.front());
    if (word && !out.empty() && is_ident_char(out.back())) out += ' ';
    out.append(canon);
    if (word && end < text.size() && is_ident_char(text[end])) out += ' ';
    i = end;
  }
  return out;
}

PreprocOutput preprocess(std::string_view source, Diagnostics& diags, const Options& options,
                         std::span<const MacroDef> initial_macros) {
  PreprocOutput out = expand_text(source, initial_macros, diags, options);
  out.text = apply_syntax_redefinitions(out.text, out.syntax_rules, diags, options.file_name);
  return out;
}

}  // namespace uplnc::preproc
