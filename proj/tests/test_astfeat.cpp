#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "codeevo/astfeat.hpp"
#include "graph_oracle.hpp"
#include "python_fuzzer.hpp"

using namespace codeevo;
using pyast::AstGraph;
using pyast::parse_to_graph;

namespace {

std::map<std::string, double> as_map(const GraphFeatures& f) {
    std::map<std::string, double> m;
    const auto v = f.values();
    for (std::size_t i = 0; i < v.size(); ++i) m[std::string(kGraphFeatureNames[i])] = v[i];
    return m;
}

}  // namespace

TEST(AstFeat, SingleNodeGraph) {
    const GraphFeatures f = compute_graph_features(parse_to_graph(""));
    EXPECT_EQ(f.node_count, 1);
    EXPECT_EQ(f.edge_count, 0);
    EXPECT_EQ(f.edge_density, 0);
    EXPECT_EQ(f.diameter, 0);
    EXPECT_EQ(f.radius, 0);
    EXPECT_EQ(f.mean_eccentricity, 0);
    EXPECT_EQ(f.avg_shortest_path, 0);
    EXPECT_EQ(f.degree_min, 0);
    EXPECT_EQ(f.degree_max, 0);
    EXPECT_EQ(f.degree_var, 0);
    EXPECT_EQ(f.assortativity, 0);
}

TEST(AstFeat, ThreeNodePath) {
    const GraphFeatures f = compute_graph_features(parse_to_graph("1"));
    EXPECT_EQ(f.node_count, 3);
    EXPECT_EQ(f.degree_min, 1);
    EXPECT_EQ(f.degree_max, 2);
    EXPECT_DOUBLE_EQ(f.degree_mean, 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(f.depth_mean, 1.0);
    EXPECT_EQ(f.diameter, 2);
    EXPECT_EQ(f.radius, 1);
    EXPECT_NEAR(f.mean_eccentricity, 5.0 / 3.0, 1e-12);
    EXPECT_NEAR(f.avg_shortest_path, 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(f.degree_entropy, std::log(3.0) - 2.0 / 3.0 * std::log(2.0), 1e-12);
    EXPECT_NEAR(f.degree_entropy, 0.6365, 1e-4);
    EXPECT_EQ(f.clustering_max, 0);
    EXPECT_EQ(f.transitivity, 0);
}

TEST(AstFeat, FourNodeStar) {
    const GraphFeatures f = compute_graph_features(parse_to_graph("pass\npass\npass"));
    EXPECT_EQ(f.node_count, 4);
    EXPECT_DOUBLE_EQ(f.edge_density, 0.75);
    EXPECT_EQ(f.diameter, 2);
    EXPECT_EQ(f.radius, 1);
    EXPECT_NEAR(f.assortativity, -1.0, 1e-12);
    EXPECT_EQ(f.transitivity, 0);
}

TEST(AstFeat, EigenCentralityIsOptional) {
    const AstGraph g = parse_to_graph("pass\npass\npass");
    EXPECT_FALSE(compute_graph_features(g).eig_centrality_max.has_value());
    GraphFeatureOptions opt;
    opt.include_eigencentrality = true;
    const GraphFeatures f = compute_graph_features(g, opt);
    ASSERT_TRUE(f.eig_centrality_max.has_value());
    // Star K1,3: centre 1/sqrt(2), leaves 1/sqrt(6).
    EXPECT_NEAR(*f.eig_centrality_max, 1.0 / std::sqrt(2.0), 1e-8);
    EXPECT_NEAR(*f.eig_centrality_mean, (1.0 / std::sqrt(2.0) + 3.0 / std::sqrt(6.0)) / 4.0, 1e-8);
}

TEST(AstFeat, EigenCentralityMatchesDenseEigensolver) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const AstGraph g = parse_to_graph(fuzz::PythonFuzzer(seed).module(3));
        const auto n = static_cast<Eigen::Index>(g.nodes.size());
        if (n < 3) continue;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (auto [p, c] : g.edges) A(p, c) = A(c, p) = 1;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        Eigen::VectorXd v = es.eigenvectors().col(n - 1);
        if (v.sum() < 0) v = -v;
        const auto got = eigenvector_centrality(g, 1e-12, 100000);
        for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(got[static_cast<std::size_t>(i)], v(i), 1e-5) << seed;
    }
}

TEST(AstFeatProperty, MatchesBruteForceOracle) {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        const AstGraph g = parse_to_graph(fuzz::PythonFuzzer(seed).module(1 + static_cast<int>(seed % 6)));
        if (g.nodes.size() > 200) continue;
        const auto got = as_map(compute_graph_features(g));
        const auto want = oracle::graph_features(g);
        for (const auto& [name, value] : want) {
            EXPECT_NEAR(got.at(name), value, 1e-9) << name << " seed " << seed;
        }
        ++checked;
    }
    EXPECT_GT(checked, 150);
}

TEST(AstFeatProperty, NonTreeGraphsUseGeneralPath) {
    // A 4-cycle with a chord: two triangles.
    AstGraph g;
    for (std::uint32_t i = 0; i < 4; ++i) g.nodes.push_back({i, "X", 0});
    g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
    g.nodes[1].depth = g.nodes[2].depth = g.nodes[3].depth = 1;
    const GraphFeatures f = compute_graph_features(g);
    const auto want = oracle::graph_features(g);
    EXPECT_NEAR(f.transitivity, want.at("transitivity"), 1e-12);
    EXPECT_NEAR(f.clustering_mean, want.at("clustering_mean"), 1e-12);
    EXPECT_NEAR(f.diameter, want.at("diameter"), 0);
    EXPECT_NEAR(f.avg_shortest_path, want.at("avg_shortest_path"), 1e-12);
    EXPECT_GT(f.transitivity, 0);
}

TEST(AstFeatProperty, AddingLeafGrowsCountsByOne) {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        AstGraph g = parse_to_graph(fuzz::PythonFuzzer(seed).module(4));
        const GraphFeatures before = compute_graph_features(g);
        const auto parent = static_cast<std::uint32_t>(rng() % g.nodes.size());
        const auto id = static_cast<std::uint32_t>(g.nodes.size());
        g.nodes.push_back({id, "Pass", g.nodes[parent].depth + 1});
        g.edges.emplace_back(parent, id);
        const GraphFeatures after = compute_graph_features(g);
        EXPECT_EQ(after.node_count, before.node_count + 1);
        EXPECT_EQ(after.edge_count, before.edge_count + 1);
        EXPECT_GE(after.depth_max, before.depth_max);
    }
}

TEST(AstFeatProperty, RelabelingInvariance) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const AstGraph g = parse_to_graph(fuzz::PythonFuzzer(seed).module(5));
        std::vector<std::uint32_t> perm(g.nodes.size());
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        AstGraph h;
        h.nodes.resize(g.nodes.size());
        for (const auto& n : g.nodes) h.nodes[perm[n.id]] = {perm[n.id], n.kind, n.depth};
        for (auto [p, c] : g.edges) h.edges.emplace_back(perm[p], perm[c]);
        std::shuffle(h.edges.begin(), h.edges.end(), rng);
        h.root_id = perm[g.root_id];
        const auto a = compute_graph_features(g).values();
        const auto b = compute_graph_features(h).values();
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(a[i], b[i], 1e-12 * std::max(1.0, std::abs(a[i]))) << kGraphFeatureNames[i];
        }
    }
}

TEST(AstFeatProperty, TreeInvariants) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const AstGraph g = parse_to_graph(fuzz::PythonFuzzer(seed).module(6));
        const GraphFeatures f = compute_graph_features(g);
        const double ln_n = std::log(f.node_count);
        EXPECT_EQ(f.edge_count, f.node_count - 1);
        EXPECT_LE(f.degree_min, f.degree_mean);
        EXPECT_LE(f.degree_mean, f.degree_max);
        EXPECT_LE(f.depth_min, f.depth_mean);
        EXPECT_LE(f.depth_mean, f.depth_max);
        EXPECT_LE(f.radius, f.diameter);
        EXPECT_LE(f.diameter, 2 * f.radius);
        EXPECT_GE(f.degree_entropy, 0);
        EXPECT_LE(f.degree_entropy, ln_n + 1e-12);
        EXPECT_GE(f.depth_entropy, 0);
        EXPECT_LE(f.depth_entropy, ln_n + 1e-12);
        EXPECT_GE(f.assortativity, -1 - 1e-12);
        EXPECT_LE(f.assortativity, 1 + 1e-12);
        EXPECT_EQ(f.clustering_min, 0);
        EXPECT_EQ(f.clustering_max, 0);
        EXPECT_EQ(f.transitivity, 0);
    }
}

TEST(AstFeat, DisconnectedGraphRejected) {
    AstGraph g;
    g.nodes = {{0, "Module", 0}, {1, "Pass", 1}, {2, "Pass", 1}};
    g.edges = {{0, 1}};
    EXPECT_THROW(compute_graph_features(g), InvalidArgument);
}
