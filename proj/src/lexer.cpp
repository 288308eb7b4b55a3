#include <algorithm>

#include "uplnc/token.hpp"

namespace uplnc {

namespace {

const std::vector<std::string_view> kKeywords = {
    "var", "proc", "struct", "if", "else", "while", "for",
    "return", "break", "continue", "int", "char", "extern",
};

// Ordered longest first so the first hit is the longest match.
const std::vector<std::string_view> kPunctuators = {
    "<<=", ">>=", "++", "--", "==", "!=", "<=", ">=", "&&", "||", "->", "+=", "-=",
    "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", ">>", "+",  "-",  "*",  "/",  "%",
    "&",   "|",   "^",  "!",  "~",  "<",  ">",  "=",  "(",  ")",  "[",  "]",  "{",
    "}",   ",",   ";",  ":",  ".",
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string-literal";
    case TokenKind::Char: return "char-literal";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Punct: return "punctuator";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

const std::vector<std::string_view>& keyword_spellings() { return kKeywords; }
const std::vector<std::string_view>& punctuator_spellings() { return kPunctuators; }

bool is_valid_identifier(std::string_view text) {
  if (text.empty() || !is_ident_start(text.front())) return false;
  return std::all_of(text.begin(), text.end(), is_ident_char);
}

std::vector<Token> tokenize(std::string_view text, Diagnostics& diags) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;
  auto col_of = [&](std::size_t at) { return static_cast<int>(at - line_start) + 1; };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    const int col = col_of(start);

    if (is_ident_start(c)) {
      while (i < text.size() && is_ident_char(text[i])) ++i;
      std::string word(text.substr(start, i - start));
      TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
      out.push_back({kind, std::move(word), line, col});
      continue;
    }

    if (is_digit(c)) {
      bool ok = true;
      if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
        i += 2;
        std::size_t digits = i;
        while (i < text.size() && is_hex_digit(text[i])) ++i;
        ok = i > digits;
      } else {
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      // A number running straight into letters (`12ab`) is malformed.
      if (i < text.size() && is_ident_char(text[i])) {
        ok = false;
        while (i < text.size() && is_ident_char(text[i])) ++i;
      }
      std::string spelling(text.substr(start, i - start));
      if (!ok) {
        diags.error({line, col}, "malformed number '" + spelling + "'");
        continue;
      }
      out.push_back({TokenKind::Number, std::move(spelling), line, col});
      continue;
    }

    if (c == '"' || c == '\'') {
      const char quote = c;
      ++i;
      bool closed = false;
      while (i < text.size() && text[i] != '\n') {
        if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] != '\n') {
          i += 2;
          continue;
        }
        if (text[i] == quote) {
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) {
        diags.error({line, col}, quote == '"' ? "unterminated string literal"
                                              : "unterminated character literal");
        continue;
      }
      std::string spelling(text.substr(start, i - start));
      if (quote == '\'' && decode_literal(spelling).size() != 1) {
        diags.error({line, col}, "character literal must hold exactly one character");
        continue;
      }
      out.push_back({quote == '"' ? TokenKind::String : TokenKind::Char, std::move(spelling),
                     line, col});
      continue;
    }

    bool matched = false;
    for (std::string_view p : kPunctuators) {
      if (text.substr(i, p.size()) == p) {
        out.push_back({TokenKind::Punct, std::string(p), line, col});
        i += p.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;

    diags.error({line, col}, std::string("unknown character '") + c + "'");
    ++i;
  }
  return out;
}

std::string detokenize(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

std::string decode_literal(std::string_view spelling) {
  std::string out;
  if (spelling.size() < 2) return out;
  std::string_view body = spelling.substr(1, spelling.size() - 2);
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\' || i + 1 >= body.size()) {
      out += c;
      continue;
    }
    char e = body[++i];
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case 'a': out += '\a'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case 'v': out += '\v'; break;
      case 'x': {
        int value = 0;
        std::size_t n = 0;
        while (i + 1 < body.size() && n < 2 && is_hex_digit(body[i + 1])) {
          char h = body[++i];
          value = value * 16 + (is_digit(h) ? h - '0' : (h | 0x20) - 'a' + 10);
          ++n;
        }
        out += static_cast<char>(value);
        break;
      }
      default:
        if (e >= '0' && e <= '7') {
          int value = e - '0';
          std::size_t n = 1;
          while (i + 1 < body.size() && n < 3 && body[i + 1] >= '0' && body[i + 1] <= '7') {
            value = value * 8 + (body[++i] - '0');
            ++n;
          }
          out += static_cast<char>(value);
        } else {
          out += e;  // \\ \' \" and unknown escapes
        }
    }
  }
  return out;
}

}  // namespace uplnc
