#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "codeevo/pyast.hpp"

namespace codeevo {

/// Canonical column names of the AST-graph features, in export order.
inline constexpr std::array<std::string_view, 22> kGraphFeatureNames = {
    "node_count",     "edge_count",     "edge_density",    "degree_min",        "degree_max",
    "degree_mean",    "degree_var",     "degree_entropy",  "assortativity",     "depth_min",
    "depth_max",      "depth_mean",     "depth_entropy",   "clustering_min",    "clustering_max",
    "clustering_mean", "clustering_var", "transitivity",   "diameter",          "radius",
    "mean_eccentricity", "avg_shortest_path"};

inline constexpr std::array<std::string_view, 2> kEigenCentralityNames = {"eig_centrality_max",
                                                                          "eig_centrality_mean"};

/// Graph metrics of an AST. Degree, distance and clustering metrics use the
/// undirected view; entropies are in nats; variances are population variances.
struct GraphFeatures {
    double node_count = 0;
    double edge_count = 0;
    double edge_density = 0;  // edges / nodes
    double degree_min = 0;
    double degree_max = 0;
    double degree_mean = 0;
    double degree_var = 0;
    double degree_entropy = 0;
    double assortativity = 0;
    double depth_min = 0;
    double depth_max = 0;
    double depth_mean = 0;
    double depth_entropy = 0;
    double clustering_min = 0;
    double clustering_max = 0;
    double clustering_mean = 0;
    double clustering_var = 0;
    double transitivity = 0;
    double diameter = 0;
    double radius = 0;
    double mean_eccentricity = 0;
    double avg_shortest_path = 0;
    std::optional<double> eig_centrality_max;
    std::optional<double> eig_centrality_mean;

    /// The 22 canonical values in kGraphFeatureNames order.
    std::array<double, 22> values() const;
};

struct GraphFeatureOptions {
    bool include_eigencentrality = false;
    double eigencentrality_tolerance = 1e-10;
    int eigencentrality_max_iterations = 1000;
};

/// Computes all graph features. Distances use linear-time tree algorithms
/// when the graph is a tree and breadth-first search otherwise; a
/// disconnected graph is rejected with InvalidArgument.
GraphFeatures compute_graph_features(const pyast::AstGraph& graph, const GraphFeatureOptions& options = {});

/// Eigenvector centrality by power iteration on A + I of the undirected
/// view; the shift keeps the iteration convergent on bipartite graphs.
/// Result has unit Euclidean norm.
std::vector<double> eigenvector_centrality(const pyast::AstGraph& graph, double tolerance = 1e-10,
                                           int max_iterations = 1000);

}  // namespace codeevo
