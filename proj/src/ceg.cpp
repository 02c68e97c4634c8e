#include "codeevo/ceg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"

namespace codeevo {

namespace {

using nlohmann::json;

std::pair<std::string, std::string> norm_scope_key(const CodeSample& s, NormScope scope) {
    switch (scope) {
        case NormScope::Group:
            return {s.benchmark + '\x1f' + s.method, {}};
        case NormScope::Run:
            return {s.group_key().label(), s.run_id};
        case NormScope::Global:
            break;
    }
    return {};
}

std::string std_scope_key(const CodeSample& s, StdScope scope) {
    return scope == StdScope::Group ? s.group_key().label() : std::string{};
}

}  // namespace

long long EvolutionGraph::index_of(const std::string& sample_id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].sample_id == sample_id) return static_cast<long long>(i);
    }
    return -1;
}

std::vector<EvolutionGraph> build_ceg(const Dataset& dataset, const FeatureTable& features, const CegOptions& options,
                                      std::vector<std::string>* warnings) {
    const auto& samples = dataset.samples();
    const Eigen::Index d = features.values.cols();
    if (static_cast<std::size_t>(d) != features.names.size()) {
        throw ValidationError("feature table has inconsistent column names");
    }

    std::vector<Eigen::Index> row(samples.size(), -1);
    {
        std::map<std::string, Eigen::Index, std::less<>> by_id;
        for (std::size_t r = 0; r < features.sample_ids.size(); ++r) {
            by_id.emplace(features.sample_ids[r], static_cast<Eigen::Index>(r));
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            auto it = by_id.find(samples[i].id);
            if (it != by_id.end()) {
                row[i] = it->second;
            } else if (warnings) {
                warnings->push_back("sample '" + samples[i].id + "' has no features and is left out");
            }
        }
    }

    // Fitness normalization.
    std::vector<std::optional<double>> fitness(samples.size());
    {
        std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> scopes;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (row[i] >= 0 && samples[i].fitness_raw) scopes[norm_scope_key(samples[i], options.norm_scope)].push_back(i);
        }
        for (const auto& [key, members] : scopes) {
            double lo = *samples[members.front()].fitness_raw;
            double hi = lo;
            for (std::size_t i : members) {
                lo = std::min(lo, *samples[i].fitness_raw);
                hi = std::max(hi, *samples[i].fitness_raw);
            }
            for (std::size_t i : members) {
                const double raw = *samples[i].fitness_raw;
                double f;
                if (options.normalize == Normalization::None) {
                    if (raw < 0.0 || raw > 1.0) {
                        throw ValidationError("fitness of sample '" + samples[i].id +
                                              "' lies outside [0, 1] and normalization is disabled");
                    }
                    f = options.direction == Direction::Minimize ? 1.0 - raw : raw;
                } else if (hi == lo) {
                    f = options.degenerate_fitness;
                } else {
                    f = options.direction == Direction::Minimize ? (hi - raw) / (hi - lo) : (raw - lo) / (hi - lo);
                }
                fitness[i] = std::clamp(f, 0.0, 1.0);
            }
        }
    }

    // Feature standardization: population z-scores per scope; constant
    // columns map to 0.
    Eigen::MatrixXd standardized = Eigen::MatrixXd::Zero(features.values.rows(), d);
    {
        std::map<std::string, std::vector<Eigen::Index>> scopes;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (row[i] >= 0) scopes[std_scope_key(samples[i], options.std_scope)].push_back(row[i]);
        }
        for (const auto& [key, rows] : scopes) {
            const double count = static_cast<double>(rows.size());
            for (Eigen::Index c = 0; c < d; ++c) {
                double mean = 0;
                for (auto r : rows) mean += features.values(r, c);
                mean /= count;
                double var = 0;
                for (auto r : rows) {
                    const double dv = features.values(r, c) - mean;
                    var += dv * dv;
                }
                var /= count;
                const double sd = std::sqrt(var);
                for (auto r : rows) {
                    standardized(r, c) = sd > 0 ? (features.values(r, c) - mean) / sd : 0.0;
                }
            }
        }
    }

    std::vector<EvolutionGraph> graphs;
    for (const auto& [run_key, members] : dataset.runs()) {
        EvolutionGraph g;
        g.group_key = run_key.group;
        g.run_id = run_key.run_id;
        g.feature_names = features.names;
        std::vector<std::size_t> ordered;
        for (std::size_t i : members) {
            if (row[i] >= 0) ordered.push_back(i);
        }
        if (ordered.empty()) {
            if (warnings) warnings->push_back("run '" + run_key.run_id + "' of " + run_key.group.label() + " has no usable samples and is skipped");
            continue;
        }
        std::stable_sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
            return samples[a].evaluation_index < samples[b].evaluation_index;
        });
        std::set<std::string> present;
        for (std::size_t i : ordered) {
            const CodeSample& s = samples[i];
            CegNode node;
            node.sample_id = s.id;
            node.fitness_norm = fitness[i];
            node.features_raw = features.values.row(row[i]).transpose();
            node.features_std = standardized.row(row[i]).transpose();
            node.evaluation_index = s.evaluation_index;
            g.nodes.push_back(std::move(node));
            present.insert(s.id);
        }
        for (std::size_t i : ordered) {
            const CodeSample& s = samples[i];
            for (const std::string& parent : s.parent_ids) {
                if (!present.count(parent)) {
                    if (warnings) warnings->push_back("edge " + parent + " -> " + s.id + " dropped: parent has no features");
                    continue;
                }
                g.edges.emplace_back(parent, s.id);
            }
        }
        for (const auto& [parent, child] : g.edges) ++g.nodes[static_cast<std::size_t>(g.index_of(parent))].parent_frequency;
        graphs.push_back(std::move(g));
    }
    return graphs;
}

std::string ceg_to_json(const std::vector<EvolutionGraph>& graphs) {
    json doc = json::array();
    for (const EvolutionGraph& g : graphs) {
        json nodes = json::array();
        for (const CegNode& n : g.nodes) {
            nodes.push_back({
                {"sample_id", n.sample_id},
                {"evaluation_index", n.evaluation_index},
                {"fitness_norm", n.fitness_norm ? json(*n.fitness_norm) : json(nullptr)},
                {"parent_frequency", n.parent_frequency},
                {"features_raw", std::vector<double>(n.features_raw.begin(), n.features_raw.end())},
                {"features_std", std::vector<double>(n.features_std.begin(), n.features_std.end())},
            });
        }
        json edges = json::array();
        for (const auto& [p, c] : g.edges) edges.push_back({p, c});
        doc.push_back({
            {"group_key", {{"benchmark", g.group_key.benchmark}, {"method", g.group_key.method}, {"llm", g.group_key.llm}}},
            {"run_id", g.run_id},
            {"feature_names", g.feature_names},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
        });
    }
    return doc.dump(1) + "\n";
}

}  // namespace codeevo
