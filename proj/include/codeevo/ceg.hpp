#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "codeevo/features.hpp"
#include "codeevo/ingest.hpp"

namespace codeevo {

enum class Normalization { MinMax, None };
enum class Direction { Maximize, Minimize };
/// Group = (benchmark, method); Run = one run; Global = the whole dataset.
enum class NormScope { Group, Run, Global };
/// Dataset = all samples; Group = (benchmark, method, llm).
enum class StdScope { Dataset, Group };

struct CegOptions {
    Normalization normalize = Normalization::MinMax;
    Direction direction = Direction::Maximize;
    NormScope norm_scope = NormScope::Group;
    StdScope std_scope = StdScope::Dataset;
    /// fitness_norm assigned when every fitness in a scope is equal.
    double degenerate_fitness = 1.0;
};

struct CegNode {
    std::string sample_id;
    /// In [0, 1]; missing when the sample has no fitness.
    std::optional<double> fitness_norm;
    Eigen::VectorXd features_std;
    Eigen::VectorXd features_raw;
    long long evaluation_index = 0;
    /// Number of children, i.e. out-degree in the graph.
    int parent_frequency = 0;
};

/// Code Evolution Graph of one run: nodes in evaluation order and
/// parent->child edges taken from the validated lineage.
struct EvolutionGraph {
    GroupKey group_key;
    std::string run_id;
    std::vector<std::string> feature_names;
    std::vector<CegNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;

    /// Index of the node with the given sample id, or -1.
    long long index_of(const std::string& sample_id) const;
};

/// Builds one graph per run. Samples without a feature row (unparsable code)
/// are left out together with their edges; each such omission and each empty
/// run is reported through `warnings` when given.
std::vector<EvolutionGraph> build_ceg(const Dataset& dataset, const FeatureTable& features,
                                      const CegOptions& options = {},
                                      std::vector<std::string>* warnings = nullptr);

/// ceg.json document: an array with one object per graph.
std::string ceg_to_json(const std::vector<EvolutionGraph>& graphs);

}  // namespace codeevo
