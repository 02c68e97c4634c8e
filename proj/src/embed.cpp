#include "codeevo/embed.hpp"

#include <limits>

#include "format.hpp"

namespace codeevo {

std::string CorrelationTable::to_csv() const {
    std::string out = "group";
    for (const auto& f : features) out += "," + detail::csv_field(f);
    out += '\n';
    for (std::size_t g = 0; g < groups.size(); ++g) {
        out += detail::csv_field(groups[g].label());
        for (const auto& cell : rho[g]) {
            out += ',';
            if (cell) out += detail::format_shortest(*cell);
        }
        out += '\n';
    }
    return out;
}

CorrelationTable correlation_table(const std::vector<EvolutionGraph>& cegs, const std::vector<std::string>& feature_set) {
    CorrelationTable table;
    table.features = feature_set;
    std::vector<std::vector<const EvolutionGraph*>> members;
    for (const auto& g : cegs) {
        auto it = std::find(table.groups.begin(), table.groups.end(), g.group_key);
        if (it == table.groups.end()) {
            table.groups.push_back(g.group_key);
            members.emplace_back();
            it = table.groups.end() - 1;
        }
        members[static_cast<std::size_t>(it - table.groups.begin())].push_back(&g);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& graphs : members) {
        std::vector<Eigen::Index> columns;
        for (const auto& name : feature_set) {
            const auto& names = graphs.front()->feature_names;
            auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw InvalidArgument("correlation_table: unknown feature '" + name + "'");
            columns.push_back(it - names.begin());
        }
        std::vector<double> fitness;
        std::vector<const CegNode*> nodes;
        for (const EvolutionGraph* g : graphs) {
            if (g->feature_names != graphs.front()->feature_names) {
                throw InvalidArgument("correlation_table: graphs of one group disagree on feature names");
            }
            for (const CegNode& n : g->nodes) {
                nodes.push_back(&n);
                fitness.push_back(n.fitness_norm.value_or(nan));
            }
        }
        std::vector<std::optional<double>> row;
        std::vector<double> x(nodes.size());
        for (Eigen::Index c : columns) {
            for (std::size_t i = 0; i < nodes.size(); ++i) x[i] = nodes[i]->features_raw(c);
            row.push_back(spearman(x, fitness));
        }
        table.rho.push_back(std::move(row));
    }
    return table;
}

}  // namespace codeevo
