#include <string>
#include <utility>
#include <vector>

#include "codeevo/pyast.hpp"

namespace codeevo::pyast {

AstGraph to_graph(const SyntaxNode& root) {
    AstGraph g;
    struct Frame {
        const SyntaxNode* node;
        std::uint32_t parent;
        std::uint32_t depth;
    };
    constexpr std::uint32_t kNoParent = ~std::uint32_t{0};
    std::vector<Frame> stack{{&root, kNoParent, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const auto id = static_cast<std::uint32_t>(g.nodes.size());
        g.nodes.push_back(AstNode{id, kind_name(f.node->kind), f.depth});
        if (f.parent != kNoParent) g.edges.emplace_back(f.parent, id);
        for (auto it = f.node->children.rbegin(); it != f.node->children.rend(); ++it) {
            stack.push_back(Frame{it->get(), id, f.depth + 1});
        }
    }
    return g;
}

AstGraph parse_to_graph(std::string_view code) {
    const SyntaxTree tree = parse_module(std::string(code));
    return to_graph(*tree.root);
}

std::string to_json(const AstGraph& graph) {
    std::string out = "{\"nodes\":[";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const AstNode& n = graph.nodes[i];
        if (i) out += ',';
        out += "{\"id\":" + std::to_string(n.id) + ",\"kind\":\"" + std::string(n.kind) +
               "\",\"depth\":" + std::to_string(n.depth) + "}";
    }
    out += "],\"edges\":[";
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        if (i) out += ',';
        out += "[" + std::to_string(graph.edges[i].first) + "," + std::to_string(graph.edges[i].second) + "]";
    }
    out += "]}";
    return out;
}

}  // namespace codeevo::pyast
