#pragma once

// Python 3 front end: tokenizer, recursive-descent parser producing the
// abstract-grammar tree, and the flattened AstGraph used for graph metrics.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codeevo/error.hpp"

namespace codeevo::pyast {

enum class TokenKind : std::uint8_t { Name, Number, String, Op, Newline, Indent, Dedent, EndMarker };

struct Token {
    TokenKind kind;
    std::string_view text;
    int line = 0;
    int column = 0;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_op(std::string_view t) const { return is(TokenKind::Op, t); }
    bool is_name(std::string_view t) const { return is(TokenKind::Name, t); }
    /// Lexical token as opposed to layout (NEWLINE, INDENT, DEDENT, end marker).
    bool is_lexical() const {
        return kind == TokenKind::Name || kind == TokenKind::Number || kind == TokenKind::String ||
               kind == TokenKind::Op;
    }
};

/// Tokenizes Python 3 source. Comments and non-logical newlines are dropped;
/// the returned sequence always ends with an EndMarker. Token text views
/// point into `source`, which must outlive the result.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

// Node kinds of the Python abstract grammar. Expression contexts
// (Load/Store/Del) and type-ignore metadata are never materialized.
#define CODEEVO_PY_NODE_KINDS(X)                                                                  \
    X(Module) X(FunctionDef) X(AsyncFunctionDef) X(ClassDef) X(Return) X(Delete) X(Assign)         \
    X(AugAssign) X(AnnAssign) X(For) X(AsyncFor) X(While) X(If) X(With) X(AsyncWith) X(Match)      \
    X(Raise) X(Try) X(Assert) X(Import) X(ImportFrom) X(Global) X(Nonlocal) X(Expr) X(Pass)        \
    X(Break) X(Continue) X(BoolOp) X(NamedExpr) X(BinOp) X(UnaryOp) X(Lambda) X(IfExp) X(Dict)     \
    X(Set) X(ListComp) X(SetComp) X(DictComp) X(GeneratorExp) X(Await) X(Yield) X(YieldFrom)       \
    X(Compare) X(Call) X(FormattedValue) X(JoinedStr) X(Constant) X(Attribute) X(Subscript)        \
    X(Starred) X(Name) X(List) X(Tuple) X(Slice) X(And) X(Or) X(Add) X(Sub) X(Mult) X(MatMult)     \
    X(Div) X(Mod) X(Pow) X(LShift) X(RShift) X(BitOr) X(BitXor) X(BitAnd) X(FloorDiv) X(Invert)    \
    X(Not) X(UAdd) X(USub) X(Eq) X(NotEq) X(Lt) X(LtE) X(Gt) X(GtE) X(Is) X(IsNot) X(In) X(NotIn)  \
    X(comprehension) X(ExceptHandler) X(arguments) X(arg) X(keyword) X(alias) X(withitem)          \
    X(match_case) X(MatchValue) X(MatchSingleton) X(MatchSequence) X(MatchMapping) X(MatchClass)   \
    X(MatchStar) X(MatchAs) X(MatchOr)

enum class NodeKind : std::uint8_t {
#define CODEEVO_ENUM_ENTRY(name) name,
    CODEEVO_PY_NODE_KINDS(CODEEVO_ENUM_ENTRY)
#undef CODEEVO_ENUM_ENTRY
};

std::string_view kind_name(NodeKind kind);

/// Node of the abstract-grammar tree. Children appear in field order, then
/// list order, exactly as the reference grammar lists its fields.
struct SyntaxNode {
    NodeKind kind;
    std::vector<std::unique_ptr<SyntaxNode>> children;
    /// Inclusive range of token indices covered by the node. For function
    /// definitions the range starts at the `def` keyword (decorators and
    /// `async` excluded) and ends at the last token of the body.
    std::uint32_t first_token = 0;
    std::uint32_t last_token = 0;
    int line = 0;
    /// Set on an `If` node written as `elif`.
    bool is_elif = false;

    explicit SyntaxNode(NodeKind k) : kind(k) {}
};

using NodePtr = std::unique_ptr<SyntaxNode>;

/// A parsed module together with the token stream it was built from.
struct SyntaxTree {
    /// Heap-held so token views stay valid when the tree is moved.
    std::unique_ptr<const std::string> source;
    std::vector<Token> tokens;
    NodePtr root;
};

/// Parses a Python 3 module. Throws ParseError on invalid input.
SyntaxTree parse_module(std::string source);

struct AstNode {
    std::uint32_t id;
    std::string_view kind;
    std::uint32_t depth;
};

/// Rooted syntax tree flattened to nodes and parent->child edges.
/// Node ids are pre-order positions; the root is always id 0.
struct AstGraph {
    std::vector<AstNode> nodes;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::uint32_t root_id = 0;
};

AstGraph to_graph(const SyntaxNode& root);

/// parse_module followed by to_graph.
AstGraph parse_to_graph(std::string_view code);

/// Debug dump: {"nodes":[{"id","kind","depth"}],"edges":[[p,c],...]}.
std::string to_json(const AstGraph& graph);

}  // namespace codeevo::pyast
