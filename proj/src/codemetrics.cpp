#include "codeevo/codemetrics.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace codeevo {

namespace {

using pyast::NodeKind;
using pyast::SyntaxNode;

bool is_function(NodeKind k) { return k == NodeKind::FunctionDef || k == NodeKind::AsyncFunctionDef; }

bool is_statement(NodeKind k) {
    return static_cast<int>(k) >= static_cast<int>(NodeKind::FunctionDef) &&
           static_cast<int>(k) <= static_cast<int>(NodeKind::Continue);
}

bool is_compound(NodeKind k) {
    switch (k) {
        case NodeKind::FunctionDef:
        case NodeKind::AsyncFunctionDef:
        case NodeKind::ClassDef:
        case NodeKind::For:
        case NodeKind::AsyncFor:
        case NodeKind::While:
        case NodeKind::If:
        case NodeKind::With:
        case NodeKind::AsyncWith:
        case NodeKind::Try:
        case NodeKind::Match:
            return true;
        default:
            return false;
    }
}

long long decision_points(const SyntaxNode& n) {
    switch (n.kind) {
        case NodeKind::If:
        case NodeKind::For:
        case NodeKind::AsyncFor:
        case NodeKind::While:
        case NodeKind::ExceptHandler:
        case NodeKind::IfExp:
            return 1;
        case NodeKind::comprehension:
            // target, iter, then one child per `if` clause
            return 1 + static_cast<long long>(n.children.size()) - 2;
        case NodeKind::BoolOp:
            // operator node followed by the operands
            return static_cast<long long>(n.children.size()) - 2;
        case NodeKind::Match: {
            long long cases = 0;
            for (const auto& c : n.children) cases += c->kind == NodeKind::match_case;
            return std::max(0LL, cases - 1);
        }
        default:
            return 0;
    }
}

// Sums decision points below `n`, skipping nested function definitions.
long long unit_decisions(const SyntaxNode& n) {
    long long total = decision_points(n);
    for (const auto& c : n.children) {
        if (is_function(c->kind)) continue;
        total += unit_decisions(*c);
    }
    return total;
}

void collect_functions(const SyntaxNode& n, std::vector<const SyntaxNode*>& out) {
    if (is_function(n.kind)) out.push_back(&n);
    for (const auto& c : n.children) collect_functions(*c, out);
}

class NestingWalker {
public:
    void block(const SyntaxNode& owner, long long depth) {
        for (const auto& c : owner.children) {
            if (is_statement(c->kind)) {
                statement(*c, depth);
            } else if (c->kind == NodeKind::ExceptHandler || c->kind == NodeKind::match_case) {
                for (const auto& s : c->children) {
                    if (is_statement(s->kind)) statement(*s, depth);
                }
            }
        }
    }

    void statement(const SyntaxNode& s, long long depth) {
        depths.push_back(depth);
        if (!is_compound(s.kind)) return;
        for (const auto& c : s.children) {
            if (c->kind == NodeKind::If && c->is_elif) {
                statement(*c, depth);
            } else if (is_statement(c->kind)) {
                statement(*c, depth + 1);
            } else if (c->kind == NodeKind::ExceptHandler || c->kind == NodeKind::match_case) {
                for (const auto& inner : c->children) {
                    if (is_statement(inner->kind)) statement(*inner, depth + 1);
                }
            }
        }
    }

    std::vector<long long> depths;
};

}  // namespace

std::array<double, 6> ComplexityMetrics::values() const {
    return {static_cast<double>(cc_total),    cc_mean, static_cast<double>(token_total), token_mean,
            static_cast<double>(param_total), param_mean};
}

ComplexityMetrics compute_complexity(const pyast::SyntaxTree& tree) {
    ComplexityMetrics m;
    const auto& tokens = tree.tokens;
    std::vector<long long> lexical_prefix(tokens.size() + 1, 0);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        lexical_prefix[i + 1] = lexical_prefix[i] + (tokens[i].is_lexical() ? 1 : 0);
    }
    m.token_total = lexical_prefix.back();

    std::vector<const SyntaxNode*> functions;
    collect_functions(*tree.root, functions);
    m.function_count = static_cast<long long>(functions.size());

    long long unit_tokens = 0;
    if (functions.empty()) {
        m.unit_count = 1;
        m.cc_total = 1 + unit_decisions(*tree.root);
        unit_tokens = m.token_total;
    } else {
        m.unit_count = m.function_count;
        for (const SyntaxNode* fn : functions) {
            m.cc_total += 1 + unit_decisions(*fn);
            unit_tokens += lexical_prefix[fn->last_token + 1] - lexical_prefix[fn->first_token];
            const SyntaxNode& args = *fn->children.front();
            for (const auto& a : args.children) m.param_total += a->kind == NodeKind::arg;
        }
        m.param_mean = static_cast<double>(m.param_total) / static_cast<double>(m.function_count);
    }
    m.cc_mean = static_cast<double>(m.cc_total) / static_cast<double>(m.unit_count);
    m.token_mean = static_cast<double>(unit_tokens) / static_cast<double>(m.unit_count);

    NestingWalker walker;
    walker.block(*tree.root, 0);
    if (!walker.depths.empty()) {
        m.nesting_max = *std::max_element(walker.depths.begin(), walker.depths.end());
        long long sum = 0;
        for (auto d : walker.depths) sum += d;
        m.nesting_mean = static_cast<double>(sum) / static_cast<double>(walker.depths.size());
    }
    return m;
}

ComplexityMetrics compute_complexity(std::string_view code) {
    return compute_complexity(pyast::parse_module(std::string(code)));
}

}  // namespace codeevo
