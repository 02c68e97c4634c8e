#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "codeevo/embed.hpp"

using namespace codeevo;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = g(rng);
    }
    return X;
}

}  // namespace

// ---------------------------------------------------------------- PCA

TEST(Pca, RankOneData) {
    MatrixXd X(10, 3);
    for (int t = 1; t <= 10; ++t) X.row(t - 1) << t, 2 * t, 3 * t;
    const auto r = pca(X, 1);
    EXPECT_NEAR(r.explained_variance_ratio(0), 1.0, 1e-9);
    const VectorXd dir = VectorXd::LinSpaced(3, 1, 3).normalized();
    EXPECT_NEAR(r.components.row(0).dot(dir), 1.0, 1e-12);
}

TEST(Pca, EqualEigenvalues) {
    MatrixXd X(4, 2);
    X << 1, 0, -1, 0, 0, 1, 0, -1;
    const auto r = pca(X, 2);
    EXPECT_NEAR(r.explained_variance_ratio(0), 0.5, 1e-12);
    EXPECT_NEAR(r.explained_variance_ratio(1), 0.5, 1e-12);
    for (Eigen::Index i = 0; i < 2; ++i) {
        Eigen::Index pivot;
        r.components.row(i).cwiseAbs().maxCoeff(&pivot);
        EXPECT_GT(r.components(i, pivot), 0);
    }
}

TEST(Pca, FullRankRatiosSumToOne) {
    const auto r = pca(random_matrix(30, 6, 1), 6);
    EXPECT_NEAR(r.explained_variance_ratio.sum(), 1.0, 1e-9);
}

TEST(Pca, ArgumentChecks) {
    EXPECT_THROW(pca(random_matrix(1, 3, 1), 1), InvalidArgument);
    EXPECT_THROW(pca(random_matrix(5, 3, 1), 0), InvalidArgument);
    EXPECT_THROW(pca(random_matrix(5, 3, 1), 4), InvalidArgument);
    EXPECT_THROW(pca(random_matrix(3, 5, 1), 3), InvalidArgument);
}

TEST(Pca, WorksWithFloat) {
    const Eigen::MatrixXf X = random_matrix(20, 4, 2).cast<float>();
    const auto r = pca(X, 2);
    static_assert(std::is_same_v<decltype(r.components), Eigen::MatrixXf>);
    EXPECT_NEAR(r.components.row(0).norm(), 1.0f, 1e-5f);
}

TEST(PcaProperty, OrthonormalSortedComponents) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(seed % 9);
        const MatrixXd X = random_matrix(40, d, seed) * random_matrix(d, d, seed + 100);
        const auto r = pca(X, d);
        const MatrixXd gram = r.components * r.components.transpose();
        EXPECT_LE((gram - MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-9);
        for (Eigen::Index i = 1; i < d; ++i) {
            EXPECT_LE(r.explained_variance_ratio(i), r.explained_variance_ratio(i - 1));
        }
        EXPECT_LE(r.explained_variance_ratio.sum(), 1.0 + 1e-12);
        EXPECT_GE(r.explained_variance_ratio.minCoeff(), 0.0);
    }
}

TEST(PcaProperty, FullRankReconstruction) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MatrixXd X = random_matrix(25, 7, seed) * 3.0;
        const auto r = pca(X, 7);
        EXPECT_LE((r.reconstruct() - X).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(PcaProperty, RowPermutationInvariance) {
    std::mt19937_64 rng(4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MatrixXd X = random_matrix(30, 5, seed);
        std::vector<int> perm(30);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        MatrixXd Y(30, 5);
        for (int i = 0; i < 30; ++i) Y.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
        const auto a = pca(X, 3);
        const auto b = pca(Y, 3);
        EXPECT_LE((a.explained_variance_ratio - b.explained_variance_ratio).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((a.components - b.components).cwiseAbs().maxCoeff(), 1e-8);
        for (int i = 0; i < 30; ++i) {
            EXPECT_LE((b.projected.row(i) - a.projected.row(perm[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff(),
                      1e-8);
        }
    }
}

// ---------------------------------------------------------------- t-SNE

TEST(Tsne, GradientMatchesFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const MatrixXd X = random_matrix(6, 4, seed);
        const MatrixXd P = tsne_affinities(X, 1.5);
        const MatrixXd Y = random_matrix(6, 2, seed + 50);
        const MatrixXd grad = tsne_gradient<double>(P, Y);
        MatrixXd fd(6, 2);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < 6; ++i) {
            for (Eigen::Index c = 0; c < 2; ++c) {
                MatrixXd Yp = Y;
                MatrixXd Ym = Y;
                Yp(i, c) += h;
                Ym(i, c) -= h;
                fd(i, c) = (tsne_kl_divergence<double>(P, Yp) - tsne_kl_divergence<double>(P, Ym)) / (2 * h);
            }
        }
        EXPECT_LE((grad - fd).norm() / fd.norm(), 1e-4) << "seed " << seed;
    }
}

TEST(Tsne, AffinitiesMatchPerplexity) {
    const MatrixXd X = random_matrix(30, 5, 8);
    const double perplexity = 7.0;
    const MatrixXd P = tsne_affinities(X, perplexity);
    EXPECT_NEAR(P.sum(), 1.0, 1e-9);
    EXPECT_LE((P - P.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(P.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Tsne, SeparatesTwoClusters) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    MatrixXd X(20, 5);
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = 0; j < 5; ++j) X(i, j) = g(rng) + (i < 10 ? 0.0 : 100.0);
    }
    TsneOptions opt;
    opt.perplexity = 5;
    opt.seed = 3;
    const auto r = tsne(X, opt);
    double within = 0;
    double between = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = i + 1; j < 20; ++j) {
            const double dist = (r.coords.row(i) - r.coords.row(j)).norm();
            if ((i < 10) == (j < 10)) {
                within = std::max(within, dist);
            } else {
                between = std::min(between, dist);
            }
        }
    }
    EXPECT_GT(between, within);
}

TEST(Tsne, FixedSeedIsBitwiseDeterministic) {
    const MatrixXd X = random_matrix(25, 4, 2);
    TsneOptions opt;
    opt.perplexity = 6;
    opt.seed = 99;
    opt.iterations = 300;
    const auto a = tsne(X, opt);
    const auto b = tsne(X, opt);
    EXPECT_EQ(std::memcmp(a.coords.data(), b.coords.data(), sizeof(double) * 50), 0);
    opt.seed = 100;
    const auto c = tsne(X, opt);
    EXPECT_NE(std::memcmp(a.coords.data(), c.coords.data(), sizeof(double) * 50), 0);
    EXPECT_EQ(a.seed, 99u);
    EXPECT_EQ(a.iterations, 300);
    EXPECT_EQ(a.perplexity, 6.0);
}

TEST(Tsne, SquareStaysFinite) {
    MatrixXd X(4, 2);
    X << 0, 0, 1, 0, 1, 1, 0, 1;
    TsneOptions opt;
    opt.perplexity = 1;
    const auto r = tsne(X, opt);
    EXPECT_TRUE(r.coords.allFinite());
    EXPECT_EQ(r.coords.rows(), 4);
    EXPECT_EQ(r.coords.cols(), 2);
}

TEST(Tsne, ArgumentChecks) {
    TsneOptions opt;
    opt.perplexity = 2;
    EXPECT_THROW(tsne(random_matrix(3, 2, 1), opt), InvalidArgument);
    opt.perplexity = 4;  // (10 - 1) / 3 = 3
    EXPECT_THROW(tsne(random_matrix(10, 2, 1), opt), InvalidArgument);
    opt.perplexity = 0.5;
    EXPECT_THROW(tsne(random_matrix(10, 2, 1), opt), InvalidArgument);
}

// ---------------------------------------------------------------- Spearman

TEST(Spearman, Examples) {
    EXPECT_EQ(spearman({1, 2, 3}, {10, 20, 30}), 1.0);
    EXPECT_EQ(spearman({1, 2, 3}, {3, 2, 1}), -1.0);
    EXPECT_EQ(spearman({1, 2, 3}, {2, 1, 3}), 0.5);
}

TEST(Spearman, TiesUseAverageRanks) {
    // Ranks x: 1, 2.5, 2.5, 4; y: 1..4. Pearson on those ranks.
    const auto rho = spearman({1, 5, 5, 9}, {1, 2, 3, 4});
    const double rx[] = {1, 2.5, 2.5, 4};
    const double ry[] = {1, 2, 3, 4};
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 4; ++i) {
        sxy += (rx[i] - 2.5) * (ry[i] - 2.5);
        sxx += (rx[i] - 2.5) * (rx[i] - 2.5);
        syy += (ry[i] - 2.5) * (ry[i] - 2.5);
    }
    ASSERT_TRUE(rho.has_value());
    EXPECT_NEAR(*rho, sxy / std::sqrt(sxx * syy), 1e-15);
}

TEST(Spearman, ConstantAndMissing) {
    EXPECT_EQ(spearman({4, 4, 4, 4}, {1, 2, 3, 4}), 0.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_FALSE(spearman({1, 2, nan, 4}, {1, nan, 3, 4}).has_value());
    EXPECT_EQ(spearman({1, 2, nan, 4, 5}, {1, 2, 3, 4, 5}), 1.0);
    EXPECT_FALSE(spearman({1, 2}, {1, 2}).has_value());
    EXPECT_THROW(spearman({1, 2, 3}, {1, 2}), InvalidArgument);
}

TEST(SpearmanProperty, ClosedFormWithoutTies) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 60;
        std::vector<double> x(n);
        std::vector<double> y(n);
        std::iota(x.begin(), x.end(), 1.0);
        std::iota(y.begin(), y.end(), 1.0);
        std::shuffle(y.begin(), y.end(), rng);
        long long d2 = 0;
        for (std::size_t i = 0; i < n; ++i) d2 += static_cast<long long>((x[i] - y[i]) * (x[i] - y[i]));
        const auto nn = static_cast<long long>(n);
        const double closed = static_cast<double>(nn * (nn * nn - 1) - 6 * d2) / static_cast<double>(nn * (nn * nn - 1));
        EXPECT_EQ(*spearman(x, y), closed);
        EXPECT_NEAR(*spearman(x, y), 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0)), 1e-15);
    }
}

TEST(SpearmanProperty, RankInvariance) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    const std::vector<std::function<double(double)>> transforms = {
        [](double v) { return 3 * v + 1; },       [](double v) { return v * v * v + v; },
        [](double v) { return std::exp(v); },     [](double v) { return std::atan(v); },
        [](double v) { return std::sinh(v) - 4; }, [](double v) { return v + 0.5 * std::sin(v); }};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(25);
        std::vector<double> y(25);
        for (auto& v : x) v = std::round(u(rng) * 4) / 4;  // ties included
        for (auto& v : y) v = u(rng);
        const auto& g = transforms[rng() % transforms.size()];
        const auto& h = transforms[rng() % transforms.size()];
        std::vector<double> gx(25);
        std::vector<double> hy(25);
        std::transform(x.begin(), x.end(), gx.begin(), g);
        std::transform(y.begin(), y.end(), hy.begin(), h);
        EXPECT_EQ(spearman(x, y), spearman(gx, hy));
    }
}

// ---------------------------------------------------------------- correlation table

namespace {

EvolutionGraph graph(const std::string& method, const std::string& run, const std::vector<double>& fitness,
                     const std::vector<std::vector<double>>& features) {
    EvolutionGraph g;
    g.group_key = {"bbob", method, "llm"};
    g.run_id = run;
    g.feature_names = {"token_total", "flat", "anti"};
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        CegNode n;
        n.sample_id = method + run + std::to_string(i);
        if (!std::isnan(fitness[i])) n.fitness_norm = fitness[i];
        n.features_raw = Eigen::Map<const VectorXd>(features[i].data(), 3);
        n.features_std = n.features_raw;
        g.nodes.push_back(n);
    }
    return g;
}

}  // namespace

TEST(CorrelationTable, PoolsRunsPerGroup) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::vector<EvolutionGraph> cegs = {
        graph("A", "r1", {0.1, 0.5, nan}, {{10, 1, 5}, {30, 1, 3}, {5, 1, 9}}),
        graph("B", "r1", {0.2, 0.4}, {{1, 1, 1}, {2, 1, 2}}),
        graph("A", "r2", {0.3, 0.9}, {{20, 1, 4}, {40, 1, 1}}),
    };
    const auto t = correlation_table(cegs, {"token_total", "flat", "anti"});
    ASSERT_EQ(t.groups.size(), 2u);
    EXPECT_EQ(t.groups[0].method, "A");
    EXPECT_EQ(t.rho[0][0], 1.0);
    EXPECT_EQ(t.rho[0][1], 0.0);
    EXPECT_EQ(t.rho[0][2], -1.0);
    for (const auto& cell : t.rho[1]) EXPECT_FALSE(cell.has_value());
    EXPECT_EQ(t.to_csv(),
              "group,token_total,flat,anti\n"
              "bbob/A/llm,1,0,-1\n"
              "bbob/B/llm,,,\n");
    EXPECT_THROW(correlation_table(cegs, {"unknown"}), InvalidArgument);
}
