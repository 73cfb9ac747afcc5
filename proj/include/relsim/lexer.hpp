#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "relsim/diagnostics.hpp"

namespace relsim {

enum class TokenKind {
    identifier,
    integer,
    string,
    lbrace,
    rbrace,
    lbracket,
    rbracket,
    lparen,
    rparen,
    colon,
    comma,
    semicolon,
    dot,
    arrow,      // ->
    connector,  // -o)-
    assign,     // :=
    slash,
    lt,
    le,
    gt,
    ge,
    eq,
    ne,
    logical_and,
    logical_or,
    bang,
    plus,
    minus,
    end_of_input,
};

struct Token {
    TokenKind kind = TokenKind::end_of_input;
    std::string text;
    SourcePos pos;
};

// Hand-rolled scanner for the model language. `//` starts a line comment.
// The `-o)-` channel connector is only recognized when requested (composite
// units); statechart guards may legitimately contain the same character run.
class Lexer {
public:
    Lexer(std::string_view source, std::string unit_name, bool recognize_connector = false)
        : unit_(std::move(unit_name)) {
        tokenize(source, recognize_connector);
    }

    const std::vector<Token>& tokens() const { return tokens_; }

private:
    void tokenize(std::string_view src, bool recognize_connector) {
        std::size_t i = 0;
        int line = 1;
        int col = 1;
        auto advance = [&](std::size_t n = 1) {
            for (std::size_t k = 0; k < n; ++k) {
                if (i < src.size() && src[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
                ++i;
            }
        };
        auto push = [&](TokenKind kind, std::string text, SourcePos pos) {
            tokens_.push_back(Token{kind, std::move(text), pos});
        };
        while (i < src.size()) {
            char c = src[i];
            SourcePos pos{line, col};
            if (c == '\r' || c == '\n' || c == ' ' || c == '\t') {
                advance();
                continue;
            }
            if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
                while (i < src.size() && src[i] != '\n') advance();
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = i;
                while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                          src[i] == '_'))
                    advance();
                push(TokenKind::identifier, std::string(src.substr(start, i - start)), pos);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])))
                    advance();
                push(TokenKind::integer, std::string(src.substr(start, i - start)), pos);
                continue;
            }
            if (c == '"') {
                advance();
                std::size_t start = i;
                while (i < src.size() && src[i] != '"' && src[i] != '\n') advance();
                if (i >= src.size() || src[i] != '"')
                    throw ParseError(unit_, pos, "unterminated string literal");
                push(TokenKind::string, std::string(src.substr(start, i - start)), pos);
                advance();
                continue;
            }
            auto two = [&](char a, char b) {
                return c == a && i + 1 < src.size() && src[i + 1] == b;
            };
            if (recognize_connector && c == '-' && src.substr(i, 4) == "-o)-") {
                push(TokenKind::connector, "-o)-", pos);
                advance(4);
                continue;
            }
            if (two('-', '>')) {
                push(TokenKind::arrow, "->", pos);
                advance(2);
                continue;
            }
            if (two(':', '=')) {
                push(TokenKind::assign, ":=", pos);
                advance(2);
                continue;
            }
            if (two('<', '=')) {
                push(TokenKind::le, "<=", pos);
                advance(2);
                continue;
            }
            if (two('>', '=')) {
                push(TokenKind::ge, ">=", pos);
                advance(2);
                continue;
            }
            if (two('=', '=')) {
                push(TokenKind::eq, "==", pos);
                advance(2);
                continue;
            }
            if (two('!', '=')) {
                push(TokenKind::ne, "!=", pos);
                advance(2);
                continue;
            }
            if (two('&', '&')) {
                push(TokenKind::logical_and, "&&", pos);
                advance(2);
                continue;
            }
            if (two('|', '|')) {
                push(TokenKind::logical_or, "||", pos);
                advance(2);
                continue;
            }
            TokenKind kind;
            switch (c) {
                case '{': kind = TokenKind::lbrace; break;
                case '}': kind = TokenKind::rbrace; break;
                case '[': kind = TokenKind::lbracket; break;
                case ']': kind = TokenKind::rbracket; break;
                case '(': kind = TokenKind::lparen; break;
                case ')': kind = TokenKind::rparen; break;
                case ':': kind = TokenKind::colon; break;
                case ',': kind = TokenKind::comma; break;
                case ';': kind = TokenKind::semicolon; break;
                case '.': kind = TokenKind::dot; break;
                case '/': kind = TokenKind::slash; break;
                case '<': kind = TokenKind::lt; break;
                case '>': kind = TokenKind::gt; break;
                case '!': kind = TokenKind::bang; break;
                case '+': kind = TokenKind::plus; break;
                case '-': kind = TokenKind::minus; break;
                default:
                    throw ParseError(unit_, pos,
                                     std::string("unexpected character '") + c + "'");
            }
            push(kind, std::string(1, c), pos);
            advance();
        }
        tokens_.push_back(Token{TokenKind::end_of_input, "", SourcePos{line, col}});
    }

    std::string unit_;
    std::vector<Token> tokens_;
};

}  // namespace relsim
