#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uplnc/diagnostics.hpp"

namespace uplnc {

enum class TokenKind { Identifier, Number, String, Char, Keyword, Punct };

struct Token {
  TokenKind kind = TokenKind::Punct;
  std::string text;  // raw spelling, literals keep their quotes and escapes
  int line = 0;
  int col = 0;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
  SourcePos pos() const { return {line, col}; }
};

const char* token_kind_name(TokenKind kind);

bool is_keyword(std::string_view word);
const std::vector<std::string_view>& keyword_spellings();
const std::vector<std::string_view>& punctuator_spellings();

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_valid_identifier(std::string_view text);

// Longest-match tokenizer over canonical (preprocessed) text. Errors go to
// `diags` with positions in that text; scanning resumes after the bad
// character.
std::vector<Token> tokenize(std::string_view text, Diagnostics& diags);

// Spellings joined by single spaces; re-tokenizes to the same sequence.
std::string detokenize(std::span<const Token> tokens);

// Decodes the escapes of a string or character literal (quotes included).
std::string decode_literal(std::string_view spelling);

}  // namespace uplnc
