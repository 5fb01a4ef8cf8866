#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace polydawg::bql {

enum class TokenKind {
  Ident,
  Integer,
  Float,
  String,       // single-quoted, text holds the unescaped contents
  QuotedIdent,  // double-quoted
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Dot,
  Star,
  Plus,
  Minus,
  Slash,
  Percent,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  End,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t offset = 0;  // byte offset of the first character
  std::size_t length = 0;  // bytes consumed in the source

  bool operator==(const Token&) const = default;
};

/// Splits BQL text into tokens. The final token is always End, positioned at
/// the end of the input. Throws Error(UnterminatedString | IllegalCharacter).
std::vector<Token> tokenize(std::string_view text);

}  // namespace polydawg::bql
