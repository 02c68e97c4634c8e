// Recursive-descent parser for Python 3 (3.10 grammar level) producing the
// abstract-grammar tree. The structure mirrors the reference PEG grammar; the
// two soft-keyword constructs (match statements, parenthesized with-items)
// are resolved by bounded backtracking.

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codeevo/pyast.hpp"

namespace codeevo::pyast {

namespace {

using NodeList = std::vector<NodePtr>;

struct OpEntry {
    std::string_view text;
    NodeKind kind;
};

constexpr std::array<OpEntry, 13> kAugAssignOps = {{
    {"+=", NodeKind::Add}, {"-=", NodeKind::Sub}, {"*=", NodeKind::Mult}, {"@=", NodeKind::MatMult},
    {"/=", NodeKind::Div}, {"%=", NodeKind::Mod}, {"&=", NodeKind::BitAnd}, {"|=", NodeKind::BitOr},
    {"^=", NodeKind::BitXor}, {"<<=", NodeKind::LShift}, {">>=", NodeKind::RShift},
    {"**=", NodeKind::Pow}, {"//=", NodeKind::FloorDiv},
}};

bool string_has_f_prefix(std::string_view tok) {
    for (char c : tok) {
        if (c == '\'' || c == '"') break;
        if (c == 'f' || c == 'F') return true;
    }
    return false;
}

bool string_has_b_prefix(std::string_view tok) {
    for (char c : tok) {
        if (c == '\'' || c == '"') break;
        if (c == 'b' || c == 'B') return true;
    }
    return false;
}

bool string_has_r_prefix(std::string_view tok) {
    for (char c : tok) {
        if (c == '\'' || c == '"') break;
        if (c == 'r' || c == 'R') return true;
    }
    return false;
}

// Returns the text between the quotes of a string token.
std::string_view string_body(std::string_view tok) {
    std::size_t q = tok.find_first_of("'\"");
    std::size_t quote_len = (tok.size() >= q + 6 && tok[q + 1] == tok[q] && tok[q + 2] == tok[q]) ? 3 : 1;
    return tok.substr(q + quote_len, tok.size() - q - 2 * quote_len);
}

// True when the decoded value of a literal segment is non-empty. Only an
// escaped line break decodes to nothing.
bool literal_nonempty(std::string_view text, bool raw) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!raw && text[i] == '\\' && i + 1 < text.size() && (text[i + 1] == '\n' || text[i + 1] == '\r')) {
            ++i;
            if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            continue;
        }
        return true;
    }
    return false;
}

void retarget_tokens(SyntaxNode& node, std::uint32_t first, std::uint32_t last) {
    node.first_token = first;
    node.last_token = last;
    for (auto& c : node.children) retarget_tokens(*c, first, last);
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    NodePtr parse_file() {
        auto module = make(NodeKind::Module, 0);
        while (cur().kind != TokenKind::EndMarker) parse_statement(module->children);
        module->last_token = static_cast<std::uint32_t>(toks_.size() - 1);
        return module;
    }

    // Parses the contents of an f-string replacement field, wrapped in
    // parentheses by the caller, and requires the whole input to be consumed.
    NodePtr parse_wrapped_expression() {
        auto e = parse_atom();
        if (cur().kind == TokenKind::Newline) advance();
        if (cur().kind != TokenKind::EndMarker) fail("f-string: invalid expression");
        return e;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t n = 1) const {
        return toks_[std::min(pos_ + n, toks_.size() - 1)];
    }
    std::uint32_t here() const { return static_cast<std::uint32_t>(pos_); }

    bool at_op(std::string_view t) const { return cur().is_op(t); }
    bool at_kw(std::string_view t) const { return cur().is_name(t); }
    bool at_identifier() const { return cur().kind == TokenKind::Name && !is_keyword(cur().text); }

    const Token& advance() {
        const Token& t = toks_[pos_];
        if (t.is_lexical()) last_lex_ = here();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    bool accept_op(std::string_view t) {
        if (!at_op(t)) return false;
        advance();
        return true;
    }
    bool accept_kw(std::string_view t) {
        if (!at_kw(t)) return false;
        advance();
        return true;
    }
    void expect_op(std::string_view t) {
        if (!accept_op(t)) fail("expected '" + std::string(t) + "'");
    }
    void expect_kw(std::string_view t) {
        if (!accept_kw(t)) fail("expected '" + std::string(t) + "'");
    }
    void expect_identifier() {
        if (!at_identifier()) fail("expected name");
        advance();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = cur();
        std::string detail = msg;
        if (t.kind == TokenKind::EndMarker) {
            detail += " (unexpected end of input)";
        } else if (t.kind == TokenKind::Indent) {
            detail += " (unexpected indent)";
        } else if (t.is_lexical()) {
            detail += " near '" + std::string(t.text.substr(0, 20)) + "'";
        }
        throw ParseError(t.line, t.column, detail);
    }

    NodePtr make(NodeKind kind, std::uint32_t first) const {
        auto n = std::make_unique<SyntaxNode>(kind);
        n->first_token = first;
        n->last_token = first;
        n->line = toks_[first].line;
        return n;
    }
    NodePtr finish(NodePtr n) const {
        n->last_token = std::max(n->first_token, last_lex_);
        return n;
    }
    NodePtr leaf(NodeKind kind) {
        auto n = make(kind, here());
        advance();
        return finish(std::move(n));
    }
    // Operator nodes are anchored to the operator token.
    NodePtr op_node(NodeKind kind, std::uint32_t tok) const {
        auto n = make(kind, tok);
        n->last_token = tok;
        return n;
    }

    static void append(NodeList& dst, NodeList&& src) {
        for (auto& n : src) dst.push_back(std::move(n));
    }

    bool starts_expression() const {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Number:
            case TokenKind::String:
                return true;
            case TokenKind::Name:
                return !is_keyword(t.text) || t.text == "None" || t.text == "True" || t.text == "False" ||
                       t.text == "not" || t.text == "lambda" || t.text == "await";
            case TokenKind::Op:
                return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                       t.text == "~" || t.text == "..." || t.text == "*";
            default:
                return false;
        }
    }

    bool at_end_of_simple() const { return cur().kind == TokenKind::Newline || at_op(";"); }

    bool at_comprehension_for() const {
        return at_kw("for") || (at_kw("async") && ahead().is_name("for"));
    }

    // ---- target validation ---------------------------------------------

    void check_target(const SyntaxNode& n, const Token& where, bool allow_star = true) const {
        switch (n.kind) {
            case NodeKind::Name:
            case NodeKind::Attribute:
            case NodeKind::Subscript:
                return;
            case NodeKind::Tuple:
            case NodeKind::List:
                for (const auto& c : n.children) check_target(*c, where, true);
                return;
            case NodeKind::Starred:
                if (allow_star) {
                    check_target(*n.children.front(), where, false);
                    return;
                }
                break;
            default:
                break;
        }
        throw ParseError(where.line, where.column,
                         "cannot assign to " + std::string(kind_name(n.kind)));
    }

    void check_single_target(const SyntaxNode& n, const Token& where) const {
        if (n.kind != NodeKind::Name && n.kind != NodeKind::Attribute && n.kind != NodeKind::Subscript) {
            throw ParseError(where.line, where.column,
                             "illegal target for this assignment: " + std::string(kind_name(n.kind)));
        }
    }

    // ---- statements ----------------------------------------------------

    void parse_statement(NodeList& out) {
        const Token& t = cur();
        if (t.kind == TokenKind::Indent) fail("unexpected indent");
        if (t.kind == TokenKind::Dedent) fail("unexpected dedent");
        if (t.kind == TokenKind::Name) {
            const std::string_view w = t.text;
            if (w == "if") return out.push_back(parse_if());
            if (w == "while") return out.push_back(parse_while());
            if (w == "for") return out.push_back(parse_for(false));
            if (w == "try") return out.push_back(parse_try());
            if (w == "with") return out.push_back(parse_with(false));
            if (w == "def") return out.push_back(parse_funcdef({}, false));
            if (w == "class") return out.push_back(parse_classdef({}));
            if (w == "async") {
                const Token& next = ahead();
                if (next.is_name("def")) return out.push_back(parse_funcdef({}, true));
                if (next.is_name("for")) return out.push_back(parse_for(true));
                if (next.is_name("with")) return out.push_back(parse_with(true));
                fail("invalid syntax");
            }
            if (w == "match") {
                if (auto m = try_parse_match()) return out.push_back(std::move(m));
            }
        } else if (t.is_op("@")) {
            return out.push_back(parse_decorated());
        }
        parse_simple_statements(out);
    }

    NodeList parse_block() {
        NodeList body;
        if (cur().kind == TokenKind::Newline) {
            advance();
            if (cur().kind != TokenKind::Indent) fail("expected an indented block");
            advance();
            while (cur().kind != TokenKind::Dedent && cur().kind != TokenKind::EndMarker) {
                parse_statement(body);
            }
            if (cur().kind == TokenKind::Dedent) advance();
        } else {
            parse_simple_statements(body);
        }
        if (body.empty()) fail("expected an indented block");
        return body;
    }

    void parse_simple_statements(NodeList& out) {
        while (true) {
            out.push_back(parse_simple_statement());
            if (!accept_op(";")) break;
            if (cur().kind == TokenKind::Newline) break;
        }
        if (cur().kind != TokenKind::Newline) fail("invalid syntax");
        advance();
    }

    NodePtr parse_simple_statement() {
        const Token& t = cur();
        const std::uint32_t start = here();
        if (t.kind == TokenKind::Name) {
            const std::string_view w = t.text;
            if (w == "pass") return leaf(NodeKind::Pass);
            if (w == "break") return leaf(NodeKind::Break);
            if (w == "continue") return leaf(NodeKind::Continue);
            if (w == "return") {
                advance();
                auto n = make(NodeKind::Return, start);
                if (!at_end_of_simple()) n->children.push_back(parse_star_expressions());
                return finish(std::move(n));
            }
            if (w == "raise") {
                advance();
                auto n = make(NodeKind::Raise, start);
                if (!at_end_of_simple()) {
                    n->children.push_back(parse_expression());
                    if (accept_kw("from")) n->children.push_back(parse_expression());
                }
                return finish(std::move(n));
            }
            if (w == "global" || w == "nonlocal") {
                advance();
                auto n = make(w == "global" ? NodeKind::Global : NodeKind::Nonlocal, start);
                do {
                    expect_identifier();
                } while (accept_op(","));
                return finish(std::move(n));
            }
            if (w == "del") return parse_del();
            if (w == "assert") {
                advance();
                auto n = make(NodeKind::Assert, start);
                n->children.push_back(parse_expression());
                if (accept_op(",")) n->children.push_back(parse_expression());
                return finish(std::move(n));
            }
            if (w == "import") return parse_import();
            if (w == "from") return parse_import_from();
        }
        return parse_expression_statement();
    }

    NodePtr parse_del() {
        auto n = make(NodeKind::Delete, here());
        advance();
        do {
            if (at_end_of_simple()) break;
            const Token& where = cur();
            auto target = parse_bitwise_or();
            check_target(*target, where, false);
            n->children.push_back(std::move(target));
        } while (accept_op(","));
        if (n->children.empty()) fail("invalid syntax");
        return finish(std::move(n));
    }

    void parse_dotted_name() {
        expect_identifier();
        while (accept_op(".")) expect_identifier();
    }

    NodePtr parse_alias(bool dotted) {
        auto a = make(NodeKind::alias, here());
        if (dotted) {
            parse_dotted_name();
        } else {
            expect_identifier();
        }
        if (accept_kw("as")) expect_identifier();
        return finish(std::move(a));
    }

    NodePtr parse_import() {
        auto n = make(NodeKind::Import, here());
        advance();
        do {
            n->children.push_back(parse_alias(true));
        } while (accept_op(","));
        return finish(std::move(n));
    }

    NodePtr parse_import_from() {
        auto n = make(NodeKind::ImportFrom, here());
        advance();
        bool has_dots = false;
        while (at_op(".") || at_op("...")) {
            advance();
            has_dots = true;
        }
        if (!at_kw("import")) {
            parse_dotted_name();
        } else if (!has_dots) {
            fail("invalid syntax");
        }
        expect_kw("import");
        if (at_op("*")) {
            auto a = make(NodeKind::alias, here());
            advance();
            n->children.push_back(finish(std::move(a)));
        } else if (accept_op("(")) {
            do {
                if (at_op(")")) break;
                n->children.push_back(parse_alias(false));
            } while (accept_op(","));
            expect_op(")");
            if (n->children.empty()) fail("invalid syntax");
        } else {
            do {
                n->children.push_back(parse_alias(false));
            } while (accept_op(","));
        }
        return finish(std::move(n));
    }

    NodePtr parse_assignment_value() {
        if (at_kw("yield")) return parse_yield();
        return parse_star_expressions();
    }

    NodePtr parse_expression_statement() {
        const std::uint32_t start = here();
        const Token& where = cur();
        NodePtr first = at_kw("yield") ? parse_yield() : parse_star_expressions();

        if (at_op(":")) {
            if (first->kind == NodeKind::Tuple) fail("only single target (not tuple) can be annotated");
            check_single_target(*first, where);
            advance();
            auto n = make(NodeKind::AnnAssign, start);
            n->children.push_back(std::move(first));
            n->children.push_back(parse_expression());
            if (accept_op("=")) n->children.push_back(parse_assignment_value());
            return finish(std::move(n));
        }
        if (cur().kind == TokenKind::Op) {
            for (const auto& [text, kind] : kAugAssignOps) {
                if (cur().text != text) continue;
                check_single_target(*first, where);
                const std::uint32_t op_tok = here();
                advance();
                auto n = make(NodeKind::AugAssign, start);
                n->children.push_back(std::move(first));
                n->children.push_back(op_node(kind, op_tok));
                n->children.push_back(parse_assignment_value());
                return finish(std::move(n));
            }
        }
        if (at_op("=")) {
            auto n = make(NodeKind::Assign, start);
            check_target(*first, where);
            n->children.push_back(std::move(first));
            while (accept_op("=")) {
                const Token& value_at = cur();
                auto value = parse_assignment_value();
                if (at_op("=")) check_target(*value, value_at);
                n->children.push_back(std::move(value));
            }
            return finish(std::move(n));
        }
        auto n = make(NodeKind::Expr, start);
        n->children.push_back(std::move(first));
        return finish(std::move(n));
    }

    NodePtr parse_if() {
        auto n = make(NodeKind::If, here());
        n->is_elif = at_kw("elif");
        advance();
        n->children.push_back(parse_named_expression());
        expect_op(":");
        append(n->children, parse_block());
        if (at_kw("elif")) {
            n->children.push_back(parse_if());
        } else if (accept_kw("else")) {
            expect_op(":");
            append(n->children, parse_block());
        }
        return finish(std::move(n));
    }

    NodePtr parse_while() {
        auto n = make(NodeKind::While, here());
        advance();
        n->children.push_back(parse_named_expression());
        expect_op(":");
        append(n->children, parse_block());
        if (accept_kw("else")) {
            expect_op(":");
            append(n->children, parse_block());
        }
        return finish(std::move(n));
    }

    NodePtr parse_for(bool is_async) {
        const std::uint32_t start = here();
        if (is_async) advance();
        auto n = make(is_async ? NodeKind::AsyncFor : NodeKind::For, start);
        expect_kw("for");
        n->children.push_back(parse_star_targets());
        expect_kw("in");
        n->children.push_back(parse_star_expressions());
        expect_op(":");
        append(n->children, parse_block());
        if (accept_kw("else")) {
            expect_op(":");
            append(n->children, parse_block());
        }
        return finish(std::move(n));
    }

    NodePtr parse_try() {
        auto n = make(NodeKind::Try, here());
        advance();
        expect_op(":");
        append(n->children, parse_block());
        bool has_handlers = false;
        while (at_kw("except")) {
            has_handlers = true;
            auto h = make(NodeKind::ExceptHandler, here());
            advance();
            if (!at_op(":")) {
                h->children.push_back(parse_expression());
                if (accept_kw("as")) expect_identifier();
            }
            expect_op(":");
            append(h->children, parse_block());
            n->children.push_back(finish(std::move(h)));
        }
        bool has_finally = false;
        if (has_handlers && accept_kw("else")) {
            expect_op(":");
            append(n->children, parse_block());
        }
        if (accept_kw("finally")) {
            has_finally = true;
            expect_op(":");
            append(n->children, parse_block());
        }
        if (!has_handlers && !has_finally) fail("expected 'except' or 'finally' block");
        return finish(std::move(n));
    }

    NodePtr parse_with_item() {
        auto item = make(NodeKind::withitem, here());
        item->children.push_back(parse_expression());
        if (accept_kw("as")) item->children.push_back(parse_star_target());
        return finish(std::move(item));
    }

    NodePtr parse_with(bool is_async) {
        const std::uint32_t start = here();
        if (is_async) advance();
        auto n = make(is_async ? NodeKind::AsyncWith : NodeKind::With, start);
        expect_kw("with");
        bool parsed = false;
        if (at_op("(")) {
            // with (a as b, c as d): ...  -- falls back to an ordinary
            // expression when the parenthesized form does not fit.
            const std::size_t save = pos_;
            const std::uint32_t save_lex = last_lex_;
            try {
                advance();
                NodeList items;
                do {
                    if (at_op(")")) break;
                    items.push_back(parse_with_item());
                } while (accept_op(","));
                expect_op(")");
                if (!at_op(":") || items.empty()) fail("not a parenthesized with");
                append(n->children, std::move(items));
                parsed = true;
            } catch (const ParseError&) {
                pos_ = save;
                last_lex_ = save_lex;
            }
        }
        if (!parsed) {
            do {
                n->children.push_back(parse_with_item());
            } while (accept_op(","));
        }
        expect_op(":");
        append(n->children, parse_block());
        return finish(std::move(n));
    }

    NodePtr parse_decorated() {
        NodeList decorators;
        while (accept_op("@")) {
            decorators.push_back(parse_named_expression());
            if (cur().kind != TokenKind::Newline) fail("invalid syntax");
            advance();
        }
        if (at_kw("def")) return parse_funcdef(std::move(decorators), false);
        if (at_kw("async") && ahead().is_name("def")) return parse_funcdef(std::move(decorators), true);
        if (at_kw("class")) return parse_classdef(std::move(decorators));
        fail("expected function or class definition after decorator");
    }

    NodePtr parse_funcdef(NodeList decorators, bool is_async) {
        if (is_async) advance();
        auto n = make(is_async ? NodeKind::AsyncFunctionDef : NodeKind::FunctionDef, here());
        expect_kw("def");
        expect_identifier();
        expect_op("(");
        auto args = parse_parameters(")", true);
        expect_op(")");
        NodePtr returns;
        if (accept_op("->")) returns = parse_expression();
        expect_op(":");
        n->children.push_back(std::move(args));
        append(n->children, parse_block());
        append(n->children, std::move(decorators));
        if (returns) n->children.push_back(std::move(returns));
        return finish(std::move(n));
    }

    NodePtr parse_classdef(NodeList decorators) {
        auto n = make(NodeKind::ClassDef, here());
        advance();
        expect_identifier();
        NodeList bases;
        NodeList keywords;
        if (accept_op("(")) {
            parse_call_arguments(bases, keywords);
            expect_op(")");
        }
        expect_op(":");
        append(n->children, std::move(bases));
        append(n->children, std::move(keywords));
        append(n->children, parse_block());
        append(n->children, std::move(decorators));
        return finish(std::move(n));
    }

    NodePtr parse_param(bool annotations) {
        auto a = make(NodeKind::arg, here());
        expect_identifier();
        if (annotations && accept_op(":")) a->children.push_back(parse_expression());
        return finish(std::move(a));
    }

    // Parameter list up to (not including) `closing`; produces `arguments`.
    NodePtr parse_parameters(std::string_view closing, bool annotations) {
        auto n = make(NodeKind::arguments, here());
        NodeList posonly;
        NodeList args;
        NodePtr vararg;
        NodeList kwonly;
        NodeList kw_defaults;
        NodePtr kwarg;
        NodeList defaults;
        bool seen_star = false;
        bool seen_slash = false;
        while (!at_op(closing)) {
            if (kwarg) fail("arguments cannot follow var-keyword argument");
            if (at_op("/")) {
                if (seen_slash || seen_star || args.empty()) fail("invalid '/' in parameter list");
                advance();
                seen_slash = true;
                append(posonly, std::move(args));
                args.clear();
            } else if (accept_op("**")) {
                kwarg = parse_param(annotations);
            } else if (accept_op("*")) {
                if (seen_star) fail("* argument may appear only once");
                seen_star = true;
                if (!at_op(",") && !at_op(closing)) vararg = parse_param(annotations);
            } else {
                auto p = parse_param(annotations);
                NodePtr def;
                if (accept_op("=")) def = parse_expression();
                if (seen_star) {
                    kwonly.push_back(std::move(p));
                    if (def) kw_defaults.push_back(std::move(def));
                } else {
                    if (def) {
                        defaults.push_back(std::move(def));
                    } else if (!defaults.empty()) {
                        fail("non-default argument follows default argument");
                    }
                    args.push_back(std::move(p));
                }
            }
            if (!accept_op(",")) break;
        }
        if (seen_star && !vararg && kwonly.empty()) fail("named arguments must follow bare *");
        append(n->children, std::move(posonly));
        append(n->children, std::move(args));
        if (vararg) n->children.push_back(std::move(vararg));
        append(n->children, std::move(kwonly));
        append(n->children, std::move(kw_defaults));
        if (kwarg) n->children.push_back(std::move(kwarg));
        append(n->children, std::move(defaults));
        return finish(std::move(n));
    }

    // ---- match statement -------------------------------------------------

    NodePtr try_parse_match() {
        const std::size_t save = pos_;
        const std::uint32_t save_lex = last_lex_;
        auto n = make(NodeKind::Match, here());
        try {
            advance();
            auto subject = parse_star_named_expression();
            if (at_op(",")) {
                auto tup = make(NodeKind::Tuple, subject->first_token);
                tup->children.push_back(std::move(subject));
                while (accept_op(",")) {
                    if (at_op(":")) break;
                    tup->children.push_back(parse_star_named_expression());
                }
                subject = finish(std::move(tup));
            } else if (subject->kind == NodeKind::Starred) {
                fail("invalid match subject");
            }
            expect_op(":");
            if (cur().kind != TokenKind::Newline) fail("expected newline");
            advance();
            if (cur().kind != TokenKind::Indent) fail("expected indent");
            advance();
            if (!at_kw("case")) fail("expected case");
            n->children.push_back(std::move(subject));
        } catch (const ParseError&) {
            pos_ = save;
            last_lex_ = save_lex;
            return nullptr;
        }
        while (at_kw("case")) n->children.push_back(parse_case());
        if (cur().kind != TokenKind::Dedent) fail("expected 'case' block");
        advance();
        return finish(std::move(n));
    }

    NodePtr parse_case() {
        auto c = make(NodeKind::match_case, here());
        advance();
        auto first = parse_maybe_star_pattern();
        if (at_op(",")) {
            auto seq = make(NodeKind::MatchSequence, first->first_token);
            seq->children.push_back(std::move(first));
            while (accept_op(",")) {
                if (at_op(":") || at_kw("if")) break;
                seq->children.push_back(parse_maybe_star_pattern());
            }
            first = finish(std::move(seq));
        } else if (first->kind == NodeKind::MatchStar) {
            fail("star pattern cannot be used here");
        }
        c->children.push_back(std::move(first));
        if (accept_kw("if")) c->children.push_back(parse_named_expression());
        expect_op(":");
        append(c->children, parse_block());
        return finish(std::move(c));
    }

    NodePtr parse_maybe_star_pattern() {
        if (at_op("*")) {
            auto s = make(NodeKind::MatchStar, here());
            advance();
            if (cur().kind != TokenKind::Name || is_keyword(cur().text)) fail("expected name after '*'");
            advance();
            return finish(std::move(s));
        }
        return parse_pattern();
    }

    NodePtr parse_pattern() {
        auto p = parse_or_pattern();
        if (at_kw("as")) {
            advance();
            if (!at_identifier() || cur().text == "_") fail("invalid pattern target");
            advance();
            auto as = make(NodeKind::MatchAs, p->first_token);
            as->children.push_back(std::move(p));
            return finish(std::move(as));
        }
        return p;
    }

    NodePtr parse_or_pattern() {
        auto first = parse_closed_pattern();
        if (!at_op("|")) return first;
        auto n = make(NodeKind::MatchOr, first->first_token);
        n->children.push_back(std::move(first));
        while (accept_op("|")) n->children.push_back(parse_closed_pattern());
        return finish(std::move(n));
    }

    NodePtr parse_signed_number() {
        const std::uint32_t start = here();
        if (at_op("-")) {
            const std::uint32_t op_tok = here();
            advance();
            if (cur().kind != TokenKind::Number) fail("expected number");
            auto u = make(NodeKind::UnaryOp, start);
            u->children.push_back(op_node(NodeKind::USub, op_tok));
            u->children.push_back(leaf(NodeKind::Constant));
            return finish(std::move(u));
        }
        if (cur().kind != TokenKind::Number) fail("expected number");
        return leaf(NodeKind::Constant);
    }

    NodePtr parse_literal_expr() {
        // signed_number, complex_number or string, as used in literal and
        // mapping-key patterns.
        if (cur().kind == TokenKind::String) {
            for (std::size_t i = pos_; toks_[i].kind == TokenKind::String; ++i) {
                if (string_has_f_prefix(toks_[i].text)) fail("patterns may not match formatted string literals");
            }
            return parse_strings();
        }
        auto real = parse_signed_number();
        if ((at_op("+") || at_op("-")) && ahead().kind == TokenKind::Number) {
            const std::uint32_t op_tok = here();
            const NodeKind op = at_op("+") ? NodeKind::Add : NodeKind::Sub;
            advance();
            auto b = make(NodeKind::BinOp, real->first_token);
            b->children.push_back(std::move(real));
            b->children.push_back(op_node(op, op_tok));
            b->children.push_back(leaf(NodeKind::Constant));
            return finish(std::move(b));
        }
        return real;
    }

    NodePtr parse_name_or_attr() {
        auto e = make(NodeKind::Name, here());
        advance();
        e = finish(std::move(e));
        while (at_op(".")) {
            advance();
            expect_identifier();
            auto a = make(NodeKind::Attribute, e->first_token);
            a->children.push_back(std::move(e));
            e = finish(std::move(a));
        }
        return e;
    }

    NodePtr parse_closed_pattern() {
        const Token& t = cur();
        const std::uint32_t start = here();
        if (t.kind == TokenKind::Number || t.is_op("-") || t.kind == TokenKind::String) {
            auto v = make(NodeKind::MatchValue, start);
            v->children.push_back(parse_literal_expr());
            return finish(std::move(v));
        }
        if (t.is_name("None") || t.is_name("True") || t.is_name("False")) return leaf(NodeKind::MatchSingleton);
        if (t.is_op("(") || t.is_op("[")) {
            const bool paren = t.is_op("(");
            const std::string_view close = paren ? ")" : "]";
            auto seq = make(NodeKind::MatchSequence, start);
            advance();
            bool comma = false;
            while (!at_op(close)) {
                seq->children.push_back(parse_maybe_star_pattern());
                if (!accept_op(",")) break;
                comma = true;
            }
            expect_op(close);
            if (paren && !comma && seq->children.size() == 1 && seq->children.front()->kind != NodeKind::MatchStar) {
                return std::move(seq->children.front());
            }
            return finish(std::move(seq));
        }
        if (t.is_op("{")) {
            auto m = make(NodeKind::MatchMapping, start);
            advance();
            NodeList keys;
            NodeList patterns;
            while (!at_op("}")) {
                if (accept_op("**")) {
                    expect_identifier();
                    accept_op(",");
                    break;
                }
                if (cur().kind == TokenKind::Name && !cur().is_name("None") && !cur().is_name("True") &&
                    !cur().is_name("False")) {
                    auto key = parse_name_or_attr();
                    if (key->kind != NodeKind::Attribute) fail("mapping pattern keys may only match literals and attribute lookups");
                    keys.push_back(std::move(key));
                } else if (cur().kind == TokenKind::Name) {
                    keys.push_back(leaf(NodeKind::Constant));
                } else {
                    keys.push_back(parse_literal_expr());
                }
                expect_op(":");
                patterns.push_back(parse_pattern());
                if (!accept_op(",")) break;
            }
            expect_op("}");
            append(m->children, std::move(keys));
            append(m->children, std::move(patterns));
            return finish(std::move(m));
        }
        if (t.kind == TokenKind::Name && !is_keyword(t.text)) {
            if (t.text == "_" && !ahead().is_op(".") && !ahead().is_op("(")) return leaf(NodeKind::MatchAs);
            const bool dotted = ahead().is_op(".");
            if (!dotted && !ahead().is_op("(")) return leaf(NodeKind::MatchAs);
            auto cls = parse_name_or_attr();
            if (!at_op("(")) {
                auto v = make(NodeKind::MatchValue, start);
                v->children.push_back(std::move(cls));
                return finish(std::move(v));
            }
            advance();
            auto c = make(NodeKind::MatchClass, start);
            NodeList positional;
            NodeList keyword_patterns;
            while (!at_op(")")) {
                if (at_identifier() && ahead().is_op("=")) {
                    advance();
                    advance();
                    keyword_patterns.push_back(parse_pattern());
                } else {
                    if (!keyword_patterns.empty()) fail("positional patterns follow keyword patterns");
                    positional.push_back(parse_pattern());
                }
                if (!accept_op(",")) break;
            }
            expect_op(")");
            c->children.push_back(std::move(cls));
            append(c->children, std::move(positional));
            append(c->children, std::move(keyword_patterns));
            return finish(std::move(c));
        }
        fail("invalid pattern");
    }

    // ---- expressions -----------------------------------------------------

    NodePtr parse_star_expressions() {
        auto first = parse_star_expression();
        if (!at_op(",")) return first;
        auto tup = make(NodeKind::Tuple, first->first_token);
        tup->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (!starts_expression()) break;
            tup->children.push_back(parse_star_expression());
        }
        return finish(std::move(tup));
    }

    NodePtr parse_star_expression() {
        if (at_op("*")) {
            auto s = make(NodeKind::Starred, here());
            advance();
            s->children.push_back(parse_bitwise_or());
            return finish(std::move(s));
        }
        return parse_expression();
    }

    NodePtr parse_star_named_expression() {
        if (at_op("*")) {
            auto s = make(NodeKind::Starred, here());
            advance();
            s->children.push_back(parse_bitwise_or());
            return finish(std::move(s));
        }
        return parse_named_expression();
    }

    NodePtr parse_named_expression() {
        if (at_identifier() && ahead().is_op(":=")) {
            auto n = make(NodeKind::NamedExpr, here());
            n->children.push_back(leaf(NodeKind::Name));
            advance();
            n->children.push_back(parse_expression());
            return finish(std::move(n));
        }
        auto e = parse_expression();
        if (at_op(":=")) fail("cannot use assignment expressions with " + std::string(kind_name(e->kind)));
        return e;
    }

    NodePtr parse_expression() {
        if (at_kw("lambda")) return parse_lambda();
        auto body = parse_disjunction();
        if (!at_kw("if")) return body;
        advance();
        auto n = make(NodeKind::IfExp, body->first_token);
        auto test = parse_disjunction();
        expect_kw("else");
        auto orelse = parse_expression();
        n->children.push_back(std::move(test));
        n->children.push_back(std::move(body));
        n->children.push_back(std::move(orelse));
        return finish(std::move(n));
    }

    NodePtr parse_lambda() {
        auto n = make(NodeKind::Lambda, here());
        advance();
        n->children.push_back(parse_parameters(":", false));
        expect_op(":");
        n->children.push_back(parse_expression());
        return finish(std::move(n));
    }

    NodePtr parse_bool_chain(std::string_view keyword, NodeKind op, NodePtr (Parser::*operand)()) {
        auto first = (this->*operand)();
        if (!at_kw(keyword)) return first;
        auto n = make(NodeKind::BoolOp, first->first_token);
        n->children.push_back(op_node(op, here()));
        n->children.push_back(std::move(first));
        while (accept_kw(keyword)) n->children.push_back((this->*operand)());
        return finish(std::move(n));
    }

    NodePtr parse_disjunction() { return parse_bool_chain("or", NodeKind::Or, &Parser::parse_conjunction); }
    NodePtr parse_conjunction() { return parse_bool_chain("and", NodeKind::And, &Parser::parse_inversion); }

    NodePtr parse_inversion() {
        if (!at_kw("not")) return parse_comparison();
        auto n = make(NodeKind::UnaryOp, here());
        n->children.push_back(op_node(NodeKind::Not, here()));
        advance();
        n->children.push_back(parse_inversion());
        return finish(std::move(n));
    }

    // Returns the comparison operator at the cursor and consumes it.
    bool take_compare_op(NodeKind& kind, std::uint32_t& tok) {
        const Token& t = cur();
        tok = here();
        if (t.kind == TokenKind::Op) {
            static constexpr std::array<OpEntry, 6> ops = {{{"==", NodeKind::Eq}, {"!=", NodeKind::NotEq},
                                                            {"<", NodeKind::Lt}, {"<=", NodeKind::LtE},
                                                            {">", NodeKind::Gt}, {">=", NodeKind::GtE}}};
            for (const auto& [text, k] : ops) {
                if (t.text == text) {
                    kind = k;
                    advance();
                    return true;
                }
            }
            return false;
        }
        if (t.is_name("in")) {
            kind = NodeKind::In;
            advance();
            return true;
        }
        if (t.is_name("not") && ahead().is_name("in")) {
            kind = NodeKind::NotIn;
            advance();
            advance();
            return true;
        }
        if (t.is_name("is")) {
            advance();
            kind = accept_kw("not") ? NodeKind::IsNot : NodeKind::Is;
            return true;
        }
        return false;
    }

    NodePtr parse_comparison() {
        auto left = parse_bitwise_or();
        NodeKind kind;
        std::uint32_t tok;
        if (!take_compare_op(kind, tok)) return left;
        auto n = make(NodeKind::Compare, left->first_token);
        NodeList ops;
        NodeList comparators;
        do {
            ops.push_back(op_node(kind, tok));
            comparators.push_back(parse_bitwise_or());
        } while (take_compare_op(kind, tok));
        n->children.push_back(std::move(left));
        append(n->children, std::move(ops));
        append(n->children, std::move(comparators));
        return finish(std::move(n));
    }

    template <std::size_t N>
    NodePtr parse_binary(const std::array<OpEntry, N>& ops, NodePtr (Parser::*operand)()) {
        auto left = (this->*operand)();
        while (cur().kind == TokenKind::Op) {
            const OpEntry* match = nullptr;
            for (const auto& e : ops) {
                if (cur().text == e.text) match = &e;
            }
            if (!match) break;
            const std::uint32_t op_tok = here();
            advance();
            auto n = make(NodeKind::BinOp, left->first_token);
            n->children.push_back(std::move(left));
            n->children.push_back(op_node(match->kind, op_tok));
            n->children.push_back((this->*operand)());
            left = finish(std::move(n));
        }
        return left;
    }

    NodePtr parse_bitwise_or() {
        static constexpr std::array<OpEntry, 1> ops = {{{"|", NodeKind::BitOr}}};
        return parse_binary(ops, &Parser::parse_bitwise_xor);
    }
    NodePtr parse_bitwise_xor() {
        static constexpr std::array<OpEntry, 1> ops = {{{"^", NodeKind::BitXor}}};
        return parse_binary(ops, &Parser::parse_bitwise_and);
    }
    NodePtr parse_bitwise_and() {
        static constexpr std::array<OpEntry, 1> ops = {{{"&", NodeKind::BitAnd}}};
        return parse_binary(ops, &Parser::parse_shift);
    }
    NodePtr parse_shift() {
        static constexpr std::array<OpEntry, 2> ops = {{{"<<", NodeKind::LShift}, {">>", NodeKind::RShift}}};
        return parse_binary(ops, &Parser::parse_sum);
    }
    NodePtr parse_sum() {
        static constexpr std::array<OpEntry, 2> ops = {{{"+", NodeKind::Add}, {"-", NodeKind::Sub}}};
        return parse_binary(ops, &Parser::parse_term);
    }
    NodePtr parse_term() {
        static constexpr std::array<OpEntry, 5> ops = {{{"*", NodeKind::Mult},
                                                        {"/", NodeKind::Div},
                                                        {"//", NodeKind::FloorDiv},
                                                        {"%", NodeKind::Mod},
                                                        {"@", NodeKind::MatMult}}};
        return parse_binary(ops, &Parser::parse_factor);
    }

    NodePtr parse_factor() {
        NodeKind op;
        if (at_op("+")) {
            op = NodeKind::UAdd;
        } else if (at_op("-")) {
            op = NodeKind::USub;
        } else if (at_op("~")) {
            op = NodeKind::Invert;
        } else {
            return parse_power();
        }
        auto n = make(NodeKind::UnaryOp, here());
        n->children.push_back(op_node(op, here()));
        advance();
        n->children.push_back(parse_factor());
        return finish(std::move(n));
    }

    NodePtr parse_power() {
        auto base = parse_await_primary();
        if (!at_op("**")) return base;
        const std::uint32_t op_tok = here();
        advance();
        auto n = make(NodeKind::BinOp, base->first_token);
        n->children.push_back(std::move(base));
        n->children.push_back(op_node(NodeKind::Pow, op_tok));
        n->children.push_back(parse_factor());
        return finish(std::move(n));
    }

    NodePtr parse_await_primary() {
        if (!at_kw("await")) return parse_primary();
        auto n = make(NodeKind::Await, here());
        advance();
        n->children.push_back(parse_primary());
        return finish(std::move(n));
    }

    NodePtr parse_primary() {
        auto e = parse_atom();
        while (true) {
            if (at_op(".")) {
                advance();
                expect_identifier();
                auto a = make(NodeKind::Attribute, e->first_token);
                a->children.push_back(std::move(e));
                e = finish(std::move(a));
            } else if (at_op("(")) {
                advance();
                auto call = make(NodeKind::Call, e->first_token);
                NodeList args;
                NodeList keywords;
                parse_call_arguments(args, keywords);
                expect_op(")");
                call->children.push_back(std::move(e));
                append(call->children, std::move(args));
                append(call->children, std::move(keywords));
                e = finish(std::move(call));
            } else if (at_op("[")) {
                advance();
                auto sub = make(NodeKind::Subscript, e->first_token);
                sub->children.push_back(std::move(e));
                sub->children.push_back(parse_slices());
                expect_op("]");
                e = finish(std::move(sub));
            } else {
                return e;
            }
        }
    }

    void parse_call_arguments(NodeList& args, NodeList& keywords) {
        bool seen_keyword_unpack = false;
        while (!at_op(")")) {
            if (at_op("*")) {
                auto s = make(NodeKind::Starred, here());
                advance();
                s->children.push_back(parse_expression());
                args.push_back(finish(std::move(s)));
            } else if (at_op("**")) {
                auto k = make(NodeKind::keyword, here());
                advance();
                k->children.push_back(parse_expression());
                keywords.push_back(finish(std::move(k)));
                seen_keyword_unpack = true;
            } else if (at_identifier() && ahead().is_op("=")) {
                auto k = make(NodeKind::keyword, here());
                advance();
                advance();
                k->children.push_back(parse_expression());
                keywords.push_back(finish(std::move(k)));
            } else {
                auto e = parse_named_expression();
                if (at_comprehension_for()) {
                    auto g = make(NodeKind::GeneratorExp, e->first_token);
                    g->children.push_back(std::move(e));
                    parse_comprehension_clauses(g->children);
                    e = finish(std::move(g));
                    if (!args.empty() || !keywords.empty() || !at_op(")")) {
                        fail("Generator expression must be parenthesized");
                    }
                }
                if (seen_keyword_unpack) fail("positional argument follows keyword argument unpacking");
                if (!keywords.empty()) fail("positional argument follows keyword argument");
                args.push_back(std::move(e));
            }
            if (!accept_op(",")) break;
        }
    }

    NodePtr parse_slice() {
        const std::uint32_t start = here();
        NodePtr lower;
        if (!at_op(":")) {
            auto e = parse_named_expression();
            if (!at_op(":")) return e;
            lower = std::move(e);
        }
        auto s = make(NodeKind::Slice, lower ? lower->first_token : start);
        advance();
        if (lower) s->children.push_back(std::move(lower));
        if (starts_expression() && !at_op("*")) s->children.push_back(parse_expression());
        if (accept_op(":")) {
            if (starts_expression() && !at_op("*")) s->children.push_back(parse_expression());
        }
        return finish(std::move(s));
    }

    NodePtr parse_slices() {
        auto first = parse_slice();
        if (!at_op(",")) return first;
        auto tup = make(NodeKind::Tuple, first->first_token);
        tup->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            tup->children.push_back(parse_slice());
        }
        return finish(std::move(tup));
    }

    void parse_comprehension_clauses(NodeList& out) {
        while (at_comprehension_for()) {
            auto c = make(NodeKind::comprehension, here());
            if (at_kw("async")) advance();
            expect_kw("for");
            c->children.push_back(parse_star_targets());
            expect_kw("in");
            c->children.push_back(parse_disjunction());
            while (accept_kw("if")) c->children.push_back(parse_disjunction());
            out.push_back(finish(std::move(c)));
        }
    }

    NodePtr parse_star_target() {
        const Token& where = cur();
        NodePtr t;
        if (at_op("*")) {
            auto s = make(NodeKind::Starred, here());
            advance();
            s->children.push_back(parse_bitwise_or());
            t = finish(std::move(s));
        } else {
            t = parse_bitwise_or();
        }
        check_target(*t, where);
        return t;
    }

    NodePtr parse_star_targets() {
        auto first = parse_star_target();
        if (!at_op(",")) return first;
        auto tup = make(NodeKind::Tuple, first->first_token);
        tup->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (!starts_expression()) break;
            tup->children.push_back(parse_star_target());
        }
        return finish(std::move(tup));
    }

    NodePtr parse_yield() {
        const std::uint32_t start = here();
        advance();
        if (accept_kw("from")) {
            auto n = make(NodeKind::YieldFrom, start);
            n->children.push_back(parse_expression());
            return finish(std::move(n));
        }
        auto n = make(NodeKind::Yield, start);
        if (starts_expression()) n->children.push_back(parse_star_expressions());
        return finish(std::move(n));
    }

    NodePtr parse_atom() {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Number:
                return leaf(NodeKind::Constant);
            case TokenKind::String:
                return parse_strings();
            case TokenKind::Name:
                if (t.text == "None" || t.text == "True" || t.text == "False") return leaf(NodeKind::Constant);
                if (is_keyword(t.text)) fail("invalid syntax");
                return leaf(NodeKind::Name);
            case TokenKind::Op:
                if (t.text == "...") return leaf(NodeKind::Constant);
                if (t.text == "(") return parse_paren();
                if (t.text == "[") return parse_list();
                if (t.text == "{") return parse_brace();
                break;
            default:
                break;
        }
        fail("invalid syntax");
    }

    NodePtr parse_paren() {
        const std::uint32_t start = here();
        advance();
        if (at_op(")")) {
            auto tup = make(NodeKind::Tuple, start);
            advance();
            return finish(std::move(tup));
        }
        if (at_kw("yield")) {
            auto y = parse_yield();
            expect_op(")");
            return y;
        }
        auto first = parse_star_named_expression();
        if (at_comprehension_for()) {
            if (first->kind == NodeKind::Starred) fail("iterable unpacking cannot be used in comprehension");
            auto g = make(NodeKind::GeneratorExp, start);
            g->children.push_back(std::move(first));
            parse_comprehension_clauses(g->children);
            expect_op(")");
            return finish(std::move(g));
        }
        if (at_op(",")) {
            auto tup = make(NodeKind::Tuple, start);
            tup->children.push_back(std::move(first));
            while (accept_op(",")) {
                if (at_op(")")) break;
                tup->children.push_back(parse_star_named_expression());
            }
            expect_op(")");
            return finish(std::move(tup));
        }
        if (first->kind == NodeKind::Starred) fail("cannot use starred expression here");
        expect_op(")");
        return first;
    }

    NodePtr parse_list() {
        const std::uint32_t start = here();
        advance();
        if (at_op("]")) {
            auto l = make(NodeKind::List, start);
            advance();
            return finish(std::move(l));
        }
        auto first = parse_star_named_expression();
        if (at_comprehension_for()) {
            if (first->kind == NodeKind::Starred) fail("iterable unpacking cannot be used in comprehension");
            auto c = make(NodeKind::ListComp, start);
            c->children.push_back(std::move(first));
            parse_comprehension_clauses(c->children);
            expect_op("]");
            return finish(std::move(c));
        }
        auto l = make(NodeKind::List, start);
        l->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            l->children.push_back(parse_star_named_expression());
        }
        expect_op("]");
        return finish(std::move(l));
    }

    NodePtr parse_brace() {
        const std::uint32_t start = here();
        advance();
        if (at_op("}")) {
            auto d = make(NodeKind::Dict, start);
            advance();
            return finish(std::move(d));
        }
        if (at_op("**")) return parse_dict_rest(start, nullptr, nullptr);
        auto first = parse_star_named_expression();
        if (at_op(":") && first->kind != NodeKind::Starred) {
            if (first->kind == NodeKind::NamedExpr) fail("invalid syntax");
            advance();
            auto value = parse_expression();
            if (at_comprehension_for()) {
                auto c = make(NodeKind::DictComp, start);
                c->children.push_back(std::move(first));
                c->children.push_back(std::move(value));
                parse_comprehension_clauses(c->children);
                expect_op("}");
                return finish(std::move(c));
            }
            return parse_dict_rest(start, std::move(first), std::move(value));
        }
        if (at_comprehension_for()) {
            if (first->kind == NodeKind::Starred) fail("iterable unpacking cannot be used in comprehension");
            auto c = make(NodeKind::SetComp, start);
            c->children.push_back(std::move(first));
            parse_comprehension_clauses(c->children);
            expect_op("}");
            return finish(std::move(c));
        }
        auto s = make(NodeKind::Set, start);
        s->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op("}")) break;
            s->children.push_back(parse_star_named_expression());
        }
        expect_op("}");
        return finish(std::move(s));
    }

    // Continues a dict display after an optional first key/value pair.
    NodePtr parse_dict_rest(std::uint32_t start, NodePtr key, NodePtr value) {
        auto d = make(NodeKind::Dict, start);
        NodeList keys;
        NodeList values;
        bool need_comma = false;
        if (value) {
            keys.push_back(std::move(key));
            values.push_back(std::move(value));
            need_comma = true;
        }
        while (true) {
            if (need_comma && !accept_op(",")) break;
            need_comma = true;
            if (at_op("}")) break;
            if (accept_op("**")) {
                values.push_back(parse_bitwise_or());
                continue;
            }
            keys.push_back(parse_expression());
            expect_op(":");
            values.push_back(parse_expression());
        }
        expect_op("}");
        append(d->children, std::move(keys));
        append(d->children, std::move(values));
        return finish(std::move(d));
    }

    // ---- string literals -------------------------------------------------

    struct FStringState {
        NodeList values;
        bool pending_literal = false;
        std::uint32_t first;
        std::uint32_t last;
    };

    NodePtr parse_strings() {
        const std::uint32_t start = here();
        std::size_t end = pos_;
        bool any_f = false;
        bool any_bytes = false;
        bool any_text = false;
        while (toks_[end].kind == TokenKind::String) {
            any_f = any_f || string_has_f_prefix(toks_[end].text);
            (string_has_b_prefix(toks_[end].text) ? any_bytes : any_text) = true;
            ++end;
        }
        if (any_bytes && any_text) fail("cannot mix bytes and nonbytes literals");
        if (!any_f) {
            while (pos_ < end) advance();
            auto c = make(NodeKind::Constant, start);
            return finish(std::move(c));
        }
        const std::uint32_t last = static_cast<std::uint32_t>(end - 1);
        FStringState state{{}, false, start, last};
        for (std::size_t i = pos_; i < end; ++i) {
            const Token& tok = toks_[i];
            const bool raw = string_has_r_prefix(tok.text);
            std::string_view body = string_body(tok.text);
            if (!string_has_f_prefix(tok.text)) {
                if (literal_nonempty(body, raw)) state.pending_literal = true;
                continue;
            }
            parse_fstring_body(tok, body, raw, state.values, state.pending_literal, false);
        }
        while (pos_ < end) advance();
        auto joined = make(NodeKind::JoinedStr, start);
        flush_literal(state.values, state.pending_literal, start, last);
        joined->children = std::move(state.values);
        return finish(std::move(joined));
    }

    void flush_literal(NodeList& values, bool& pending, std::uint32_t first, std::uint32_t last) const {
        if (!pending) return;
        auto c = make(NodeKind::Constant, first);
        c->last_token = last;
        values.push_back(std::move(c));
        pending = false;
    }

    [[noreturn]] void fstring_fail(const Token& tok, const std::string& msg) const {
        throw ParseError(tok.line, tok.column, "f-string: " + msg);
    }

    // Scans `body` (an f-string body or a format spec). When `in_spec` is set
    // scanning stops at the first unmatched '}' and the index is returned.
    std::size_t parse_fstring_body(const Token& tok, std::string_view body, bool raw, NodeList& values,
                                   bool& pending, bool in_spec, std::size_t i = 0, int recursion = 0) {
        const std::uint32_t tok_index = static_cast<std::uint32_t>(&tok - toks_.data());
        while (i < body.size()) {
            const char c = body[i];
            if (c == '{') {
                if (!in_spec && i + 1 < body.size() && body[i + 1] == '{') {
                    pending = true;
                    i += 2;
                    continue;
                }
                if (recursion >= 2) fstring_fail(tok, "expressions nested too deeply");
                i = parse_replacement_field(tok, body, raw, i + 1, values, pending, recursion);
                continue;
            }
            if (c == '}') {
                if (in_spec) return i;
                if (i + 1 < body.size() && body[i + 1] == '}') {
                    pending = true;
                    i += 2;
                    continue;
                }
                fstring_fail(tok, "single '}' is not allowed");
            }
            if (!raw && c == '\\' && i + 1 < body.size() && (body[i + 1] == '\n' || body[i + 1] == '\r')) {
                i += 2;
                continue;
            }
            if (!raw && c == '\\' && i + 2 < body.size() && body[i + 1] == 'N' && body[i + 2] == '{') {
                const std::size_t close = body.find('}', i + 3);
                if (close == std::string_view::npos) fstring_fail(tok, "malformed \\N character escape");
                pending = true;
                i = close + 1;
                continue;
            }
            if (!raw && c == '\\' && i + 1 < body.size()) {
                pending = true;
                i += 2;
                continue;
            }
            pending = true;
            ++i;
        }
        if (in_spec) fstring_fail(tok, "expecting '}'");
        (void)tok_index;
        return i;
    }

    std::size_t parse_replacement_field(const Token& tok, std::string_view body, bool raw, std::size_t i,
                                        NodeList& values, bool& pending, int recursion) {
        const std::uint32_t tok_index = static_cast<std::uint32_t>(&tok - toks_.data());
        // Find the end of the expression part.
        std::size_t j = i;
        int depth = 0;
        char quote = 0;
        bool debug = false;
        while (j < body.size()) {
            const char c = body[j];
            if (quote) {
                if (c == quote) quote = 0;
                ++j;
                continue;
            }
            if (c == '\\') fstring_fail(tok, "expression part cannot include a backslash");
            if (c == '\'' || c == '"') {
                quote = c;
                ++j;
                continue;
            }
            if (c == '#') fstring_fail(tok, "expression part cannot include '#'");
            if (c == '(' || c == '[' || c == '{') {
                ++depth;
            } else if (c == ')' || c == ']' || (c == '}' && depth > 0)) {
                --depth;
            } else if (depth == 0) {
                if (c == '}' || c == ':') break;
                if (c == '!' && !(j + 1 < body.size() && body[j + 1] == '=')) break;
                if (c == '=') {
                    const bool next_eq = j + 1 < body.size() && body[j + 1] == '=';
                    const bool prev_cmp = j > i && std::string_view("=!<>").find(body[j - 1]) != std::string_view::npos;
                    if (next_eq) {
                        j += 2;
                        continue;
                    }
                    if (!prev_cmp) {
                        debug = true;
                        break;
                    }
                }
            }
            ++j;
        }
        if (quote) fstring_fail(tok, "unterminated string");
        if (j >= body.size()) fstring_fail(tok, "expecting '}'");
        std::string_view expr_text = body.substr(i, j - i);
        if (expr_text.find_first_not_of(" \t\n\r\f") == std::string_view::npos) {
            fstring_fail(tok, "empty expression not allowed");
        }
        auto value = parse_fstring_expression(tok, expr_text);
        bool has_conversion = false;
        if (debug) {
            ++j;
            while (j < body.size() && (body[j] == ' ' || body[j] == '\t' || body[j] == '\n')) ++j;
            pending = true;
        }
        if (j < body.size() && body[j] == '!') {
            ++j;
            if (j >= body.size() || std::string_view("sra").find(body[j]) == std::string_view::npos) {
                fstring_fail(tok, "invalid conversion character: expected 's', 'r', or 'a'");
            }
            has_conversion = true;
            ++j;
        }
        (void)has_conversion;
        NodePtr spec;
        if (j < body.size() && body[j] == ':') {
            spec = make(NodeKind::JoinedStr, tok_index);
            bool spec_pending = false;
            j = parse_fstring_body(tok, body, raw, spec->children, spec_pending, true, j + 1, recursion + 1);
            flush_literal(spec->children, spec_pending, tok_index, tok_index);
            spec->last_token = tok_index;
        }
        if (j >= body.size() || body[j] != '}') fstring_fail(tok, "expecting '}'");
        flush_literal(values, pending, tok_index, tok_index);
        auto fv = make(NodeKind::FormattedValue, tok_index);
        fv->children.push_back(std::move(value));
        if (spec) fv->children.push_back(std::move(spec));
        fv->last_token = tok_index;
        values.push_back(std::move(fv));
        return j + 1;
    }

    NodePtr parse_fstring_expression(const Token& tok, std::string_view text) {
        const std::uint32_t tok_index = static_cast<std::uint32_t>(&tok - toks_.data());
        std::string wrapped = "(" + std::string(text) + ")";
        try {
            const auto sub_tokens = tokenize(wrapped);
            Parser sub(sub_tokens);
            auto e = sub.parse_wrapped_expression();
            retarget_tokens(*e, tok_index, tok_index);
            return e;
        } catch (const ParseError& err) {
            fstring_fail(tok, err.what());
        }
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    std::uint32_t last_lex_ = 0;
};

}  // namespace

std::string_view kind_name(NodeKind kind) {
    static constexpr std::string_view names[] = {
#define CODEEVO_NAME_ENTRY(name) #name,
        CODEEVO_PY_NODE_KINDS(CODEEVO_NAME_ENTRY)
#undef CODEEVO_NAME_ENTRY
    };
    return names[static_cast<std::size_t>(kind)];
}

SyntaxTree parse_module(std::string source) {
    SyntaxTree tree;
    tree.source = std::make_unique<const std::string>(std::move(source));
    tree.tokens = tokenize(*tree.source);
    Parser parser(tree.tokens);
    tree.root = parser.parse_file();
    return tree;
}

}  // namespace codeevo::pyast
