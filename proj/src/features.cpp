#include "codeevo/features.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace codeevo {

double FeatureVector::at(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

std::vector<std::string> canonical_feature_names(bool include_eigencentrality) {
    std::vector<std::string> names(kGraphFeatureNames.begin(), kGraphFeatureNames.end());
    names.insert(names.end(), kComplexityFeatureNames.begin(), kComplexityFeatureNames.end());
    if (include_eigencentrality) names.insert(names.end(), kEigenCentralityNames.begin(), kEigenCentralityNames.end());
    return names;
}

std::vector<std::string> all_feature_names(bool include_eigencentrality) {
    auto names = canonical_feature_names(include_eigencentrality);
    names.insert(names.end(), kNestingFeatureNames.begin(), kNestingFeatureNames.end());
    return names;
}

FeatureVector extract_features(std::string_view code, const FeatureOptions& options) {
    const pyast::SyntaxTree tree = pyast::parse_module(std::string(code));
    const pyast::AstGraph graph = pyast::to_graph(*tree.root);
    GraphFeatureOptions gopts;
    gopts.include_eigencentrality = options.include_eigencentrality;
    const GraphFeatures gf = compute_graph_features(graph, gopts);
    const ComplexityMetrics cm = compute_complexity(tree);

    FeatureVector fv;
    fv.names = all_feature_names(options.include_eigencentrality);
    const auto g = gf.values();
    const auto c = cm.values();
    fv.values.assign(g.begin(), g.end());
    fv.values.insert(fv.values.end(), c.begin(), c.end());
    if (options.include_eigencentrality) {
        fv.values.push_back(*gf.eig_centrality_max);
        fv.values.push_back(*gf.eig_centrality_mean);
    }
    fv.values.push_back(static_cast<double>(cm.nesting_max));
    fv.values.push_back(cm.nesting_mean);
    return fv;
}

Eigen::Index FeatureTable::row_of(std::string_view sample_id) const {
    auto it = std::find(sample_ids.begin(), sample_ids.end(), sample_id);
    return it == sample_ids.end() ? -1 : static_cast<Eigen::Index>(it - sample_ids.begin());
}

Eigen::Index FeatureTable::column_of(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<Eigen::Index>(it - names.begin());
}

FeatureTable extract_dataset(const Dataset& dataset, const FeatureOptions& options, unsigned threads) {
    const auto& samples = dataset.samples();
    const std::size_t n = samples.size();
    std::vector<std::optional<FeatureVector>> results(n);
    std::vector<std::string> errors(n);

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < n; i += stride) {
            try {
                results[i] = extract_features(samples[i].code, options);
            } catch (const ParseError& e) {
                errors[i] = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    FeatureTable table;
    table.names = all_feature_names(options.include_eigencentrality);
    std::size_t valid = 0;
    for (const auto& r : results) valid += r.has_value();
    table.values.resize(static_cast<Eigen::Index>(valid), static_cast<Eigen::Index>(table.names.size()));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!results[i]) {
            table.invalid.push_back(InvalidSample{samples[i].id, errors[i]});
            continue;
        }
        table.sample_ids.push_back(samples[i].id);
        for (std::size_t j = 0; j < results[i]->values.size(); ++j) {
            table.values(row, static_cast<Eigen::Index>(j)) = results[i]->values[j];
        }
        ++row;
    }
    return table;
}

std::vector<std::string> resolve_feature_set(std::string_view spec, const std::vector<std::string>& available) {
    std::vector<std::string> names;
    if (spec == "ast22") {
        names.assign(kGraphFeatureNames.begin(), kGraphFeatureNames.end());
    } else if (spec == "complexity6") {
        names.assign(kComplexityFeatureNames.begin(), kComplexityFeatureNames.end());
    } else if (spec == "all28") {
        names = canonical_feature_names(false);
    } else if (spec.substr(0, 7) == "custom:") {
        const std::string path(spec.substr(7));
        std::ifstream in(path);
        if (!in) throw IoError("cannot open feature set file " + path);
        std::string line;
        while (std::getline(in, line)) {
            line = line.substr(0, line.find('#'));
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream words(line);
            std::string w;
            while (words >> w) names.push_back(w);
        }
        if (names.empty()) throw InvalidArgument("feature set file " + path + " names no features");
    } else {
        throw InvalidArgument("unknown feature set '" + std::string(spec) + "'");
    }
    for (const auto& name : names) {
        if (std::find(available.begin(), available.end(), name) == available.end()) {
            throw InvalidArgument("feature '" + name + "' is not available");
        }
    }
    return names;
}

}  // namespace codeevo
