#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "codeevo/pyast.hpp"

namespace codeevo::pyast {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",  "await",  "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",   "yield"};

constexpr std::array<std::string_view, 24> kMultiCharOps = {
    "**=", "//=", ">>=", "<<=", "...", "!=", "%=", "&=", "**", "*=", "+=", "-=",
    "->",  "//",  "/=",  ":=",  "<<",  "<=", "==", ">=", ">>", "@=", "^=", "|="};

constexpr std::string_view kSingleCharOps = "()[]{}:,;.+-*/|&<>=%~^@";

bool is_ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_string_prefix(std::string_view word) {
    if (word.size() > 2) return false;
    std::string lower;
    for (char c : word) lower.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
    static constexpr std::array<std::string_view, 9> prefixes = {"r",  "u",  "b",  "f", "br",
                                                                 "rb", "fr", "rf", ""};
    return std::find(prefixes.begin(), prefixes.end(), lower) != prefixes.end();
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {
        if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    }

    std::vector<Token> run() {
        while (true) {
            if (at_line_start_ && parens_ == 0) {
                if (!handle_indentation()) break;
            }
            if (pos_ >= src_.size()) break;
            lex_within_line();
        }
        finish();
        return std::move(tokens_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, column(), msg); }

    int column() const { return static_cast<int>(pos_ - line_begin_); }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void push(TokenKind kind, std::size_t begin, std::size_t end, int line, int col) {
        tokens_.push_back(Token{kind, src_.substr(begin, end - begin), line, col});
        if (kind != TokenKind::Newline && kind != TokenKind::Indent && kind != TokenKind::Dedent)
            logical_has_tokens_ = true;
    }

    void newline_char() {
        // Consumes "\n", "\r\n" or "\r".
        if (peek() == '\r' && peek(1) == '\n') ++pos_;
        ++pos_;
        ++line_;
        line_begin_ = pos_;
    }

    // Measures indentation of the upcoming physical line. Returns false at EOF.
    bool handle_indentation() {
        while (true) {
            int col = 0;
            while (pos_ < src_.size()) {
                char c = src_[pos_];
                if (c == ' ') {
                    ++col;
                } else if (c == '\t') {
                    col = (col / 8 + 1) * 8;
                } else if (c == '\f') {
                    col = 0;
                } else {
                    break;
                }
                ++pos_;
            }
            if (pos_ >= src_.size()) return false;
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
                if (pos_ >= src_.size()) return false;
                newline_char();
                continue;
            }
            if (c == '\n' || c == '\r') {
                newline_char();
                continue;
            }
            if (c == '\\' && (peek(1) == '\n' || peek(1) == '\r')) {
                // A continuation right after indentation joins the next line
                // into this logical line; indentation is taken from here.
                apply_indent(col);
                at_line_start_ = false;
                return true;
            }
            apply_indent(col);
            at_line_start_ = false;
            return true;
        }
    }

    void apply_indent(int col) {
        if (col > indents_.back()) {
            indents_.push_back(col);
            tokens_.push_back(Token{TokenKind::Indent, src_.substr(line_begin_, pos_ - line_begin_),
                                    line_, 0});
            return;
        }
        while (col < indents_.back()) {
            indents_.pop_back();
            tokens_.push_back(Token{TokenKind::Dedent, src_.substr(pos_, 0), line_, col});
        }
        if (col != indents_.back()) fail("unindent does not match any outer indentation level");
    }

    void lex_within_line() {
        char c = peek();
        if (c == ' ' || c == '\t' || c == '\f') {
            ++pos_;
            return;
        }
        if (c == '#') {
            while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
            return;
        }
        if (c == '\n' || c == '\r') {
            if (parens_ == 0 && logical_has_tokens_) {
                push(TokenKind::Newline, pos_, pos_ + 1, line_, column());
                logical_has_tokens_ = false;
            }
            newline_char();
            if (parens_ == 0) at_line_start_ = true;
            return;
        }
        if (c == '\\') {
            if (peek(1) == '\n' || peek(1) == '\r') {
                ++pos_;
                newline_char();
                if (pos_ >= src_.size()) fail("unexpected EOF after line continuation");
                return;
            }
            fail("unexpected character after line continuation character");
        }
        const int line = line_;
        const int col = column();
        const std::size_t begin = pos_;
        if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
            lex_number();
            push(TokenKind::Number, begin, pos_, line, col);
            return;
        }
        if (is_ident_start(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            std::string_view word = src_.substr(begin, pos_ - begin);
            if ((peek() == '"' || peek() == '\'') && is_string_prefix(word)) {
                lex_string_body();
                push(TokenKind::String, begin, pos_, line, col);
                return;
            }
            push(TokenKind::Name, begin, pos_, line, col);
            return;
        }
        if (c == '"' || c == '\'') {
            lex_string_body();
            push(TokenKind::String, begin, pos_, line, col);
            return;
        }
        for (std::string_view op : kMultiCharOps) {
            if (src_.substr(pos_, op.size()) == op) {
                pos_ += op.size();
                push(TokenKind::Op, begin, pos_, line, col);
                return;
            }
        }
        if (kSingleCharOps.find(c) != std::string_view::npos) {
            if (c == '(' || c == '[' || c == '{') {
                ++parens_;
            } else if (c == ')' || c == ']' || c == '}') {
                if (parens_ == 0) fail(std::string("unmatched '") + c + "'");
                --parens_;
            }
            ++pos_;
            push(TokenKind::Op, begin, pos_, line, col);
            return;
        }
        fail(std::string("invalid character '") + c + "' in source");
    }

    void lex_number() {
        auto digits = [&](auto pred) {
            while (pos_ < src_.size() && (pred(src_[pos_]) || src_[pos_] == '_')) ++pos_;
        };
        auto is_hex = [](char ch) {
            return is_digit(ch) || (ch >= 'a' && ch <= 'f') || (ch >= 'A' && ch <= 'F');
        };
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'o' || peek(1) == 'O' ||
                              peek(1) == 'b' || peek(1) == 'B')) {
            pos_ += 2;
            digits(is_hex);
        } else {
            digits(is_digit);
            if (peek() == '.') {
                ++pos_;
                digits(is_digit);
            }
            if ((peek() == 'e' || peek() == 'E') &&
                (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
                pos_ += 2;
                digits(is_digit);
            }
            if (peek() == 'j' || peek() == 'J') ++pos_;
        }
        if (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_])) &&
            !is_keyword_start()) {
            fail("invalid decimal literal");
        }
    }

    // Python accepts `1if x else y`; a keyword may directly follow a number.
    bool is_keyword_start() const {
        std::size_t end = pos_;
        while (end < src_.size() && is_ident_char(static_cast<unsigned char>(src_[end]))) ++end;
        return is_keyword(src_.substr(pos_, end - pos_));
    }

    void lex_string_body() {
        const char quote = peek();
        const bool triple = peek(1) == quote && peek(2) == quote;
        pos_ += triple ? 3 : 1;
        const int start_line = line_;
        while (true) {
            if (pos_ >= src_.size()) {
                throw ParseError(start_line, 0,
                                 triple ? "unterminated triple-quoted string literal"
                                        : "unterminated string literal");
            }
            char c = src_[pos_];
            if (c == '\\') {
                ++pos_;
                if (pos_ < src_.size()) {
                    if (src_[pos_] == '\n' || src_[pos_] == '\r') {
                        newline_char();
                    } else {
                        ++pos_;
                    }
                }
                continue;
            }
            if (c == '\n' || c == '\r') {
                if (!triple) throw ParseError(start_line, 0, "unterminated string literal");
                newline_char();
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    ++pos_;
                    return;
                }
                if (peek(1) == quote && peek(2) == quote) {
                    pos_ += 3;
                    return;
                }
            }
            ++pos_;
        }
    }

    void finish() {
        if (parens_ > 0) fail("unexpected EOF while inside brackets");
        if (logical_has_tokens_) {
            tokens_.push_back(Token{TokenKind::Newline, src_.substr(src_.size(), 0), line_, column()});
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            tokens_.push_back(Token{TokenKind::Dedent, src_.substr(src_.size(), 0), line_ + 1, 0});
        }
        tokens_.push_back(Token{TokenKind::EndMarker, src_.substr(src_.size(), 0), line_ + 1, 0});
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_begin_ = 0;
    int line_ = 1;
    int parens_ = 0;
    bool at_line_start_ = true;
    bool logical_has_tokens_ = false;
    std::vector<int> indents_{0};
    std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace codeevo::pyast
