#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "codeevo/astfeat.hpp"
#include "codeevo/codemetrics.hpp"
#include "codeevo/ingest.hpp"

namespace codeevo {

/// Named numeric map of one code sample's features.
struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    /// Value of the named feature; throws InvalidArgument when absent.
    double at(std::string_view name) const;
};

struct FeatureOptions {
    bool include_eigencentrality = false;
};

/// The 28 canonical columns (22 graph + 6 complexity), followed by the two
/// eigenvector-centrality columns when enabled.
std::vector<std::string> canonical_feature_names(bool include_eigencentrality = false);

/// Every feature the extractor produces: the canonical columns plus the
/// nesting metrics.
std::vector<std::string> all_feature_names(bool include_eigencentrality = false);

/// Parses `code` and computes every feature of all_feature_names().
/// Throws ParseError for invalid code.
FeatureVector extract_features(std::string_view code, const FeatureOptions& options = {});

struct InvalidSample {
    std::string sample_id;
    std::string message;
};

/// Features of a whole dataset. Rows follow dataset order and skip samples
/// whose code does not parse; those are listed in `invalid`.
struct FeatureTable {
    std::vector<std::string> names;
    std::vector<std::string> sample_ids;
    Eigen::MatrixXd values;
    std::vector<InvalidSample> invalid;

    /// Row of the given sample, or -1.
    Eigen::Index row_of(std::string_view sample_id) const;
    /// Column of the given feature, or -1.
    Eigen::Index column_of(std::string_view name) const;
};

/// Featurizes every sample. Work is spread over `threads` workers
/// (0 = hardware concurrency); the result does not depend on the count.
FeatureTable extract_dataset(const Dataset& dataset, const FeatureOptions& options = {}, unsigned threads = 0);

/// Resolves a feature-set spec: "ast22", "complexity6", "all28" or
/// "custom:<file>" (names separated by commas or whitespace, '#' comments).
/// Throws InvalidArgument for unknown sets or names outside `available`.
std::vector<std::string> resolve_feature_set(std::string_view spec, const std::vector<std::string>& available);

}  // namespace codeevo
