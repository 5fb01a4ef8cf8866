#include "polydawg/bql/lexer.hpp"

#include <cctype>

#include "polydawg/error.hpp"

namespace polydawg::bql {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Integer: return "integer";
    case TokenKind::Float: return "number";
    case TokenKind::String: return "string";
    case TokenKind::QuotedIdent: return "quoted identifier";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Percent: return "'%'";
    case TokenKind::Eq: return "'='";
    case TokenKind::Ne: return "'<>'";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Ge: return "'>='";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{TokenKind::End, "", text_.size(), 0});
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Token make(TokenKind kind, std::size_t start, std::string text) {
    return Token{kind, std::move(text), start, pos_ - start};
  }

  Token quoted(char quote, TokenKind kind) {
    const std::size_t start = pos_++;
    std::string body;
    while (true) {
      if (pos_ >= text_.size()) {
        throw Error(ErrorCode::UnterminatedString, "unterminated quoted text", start);
      }
      const char c = text_[pos_++];
      if (c == quote) {
        if (pos_ < text_.size() && text_[pos_] == quote) {
          body += quote;
          ++pos_;
          continue;
        }
        return make(kind, start, std::move(body));
      }
      body += c;
    }
  }

  Token number() {
    const std::size_t start = pos_;
    bool is_float = false;
    while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && digit(text_[pos_ + 1])) {
      is_float = true;
      ++pos_;
      while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && digit(text_[p])) {
        is_float = true;
        pos_ = p;
        while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
      }
    }
    if (pos_ < text_.size() && ident_start(text_[pos_])) {
      throw Error(ErrorCode::IllegalCharacter, "malformed number", start);
    }
    return make(is_float ? TokenKind::Float : TokenKind::Integer, start,
                std::string(text_.substr(start, pos_ - start)));
  }

  Token next() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (ident_start(c)) {
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      return make(TokenKind::Ident, start, std::string(text_.substr(start, pos_ - start)));
    }
    if (digit(c)) return number();
    if (c == '\'') return quoted('\'', TokenKind::String);
    if (c == '"') return quoted('"', TokenKind::QuotedIdent);

    auto single = [&](TokenKind kind) {
      ++pos_;
      return make(kind, start, std::string(1, c));
    };
    auto peek_is = [&](char n) { return pos_ + 1 < text_.size() && text_[pos_ + 1] == n; };
    auto pair = [&](TokenKind kind) {
      pos_ += 2;
      return make(kind, start, std::string(text_.substr(start, 2)));
    };

    switch (c) {
      case '(': return single(TokenKind::LParen);
      case ')': return single(TokenKind::RParen);
      case '{': return single(TokenKind::LBrace);
      case '}': return single(TokenKind::RBrace);
      case '[': return single(TokenKind::LBracket);
      case ']': return single(TokenKind::RBracket);
      case ',': return single(TokenKind::Comma);
      case ':': return single(TokenKind::Colon);
      case '.': return single(TokenKind::Dot);
      case '*': return single(TokenKind::Star);
      case '+': return single(TokenKind::Plus);
      case '-': return single(TokenKind::Minus);
      case '/': return single(TokenKind::Slash);
      case '%': return single(TokenKind::Percent);
      case '=': return single(TokenKind::Eq);
      case '<':
        if (peek_is('=')) return pair(TokenKind::Le);
        if (peek_is('>')) return pair(TokenKind::Ne);
        return single(TokenKind::Lt);
      case '>':
        if (peek_is('=')) return pair(TokenKind::Ge);
        return single(TokenKind::Gt);
      case '!':
        if (peek_is('=')) return pair(TokenKind::Ne);
        break;
      default:
        break;
    }
    throw Error(ErrorCode::IllegalCharacter,
                "unexpected character '" + std::string(1, c) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace polydawg::bql
