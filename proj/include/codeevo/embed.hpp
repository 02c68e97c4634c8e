#pragma once

// PCA, exact t-SNE and Spearman rank correlation on Eigen matrices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codeevo/ceg.hpp"
#include "codeevo/error.hpp"

namespace codeevo {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------- PCA

template <typename Scalar>
struct PcaResult {
    /// k x d, orthonormal rows.
    MatrixX<Scalar> components;
    VectorX<Scalar> explained_variance_ratio;
    /// n x k scores of the centred data.
    MatrixX<Scalar> projected;
    VectorX<Scalar> mean;

    /// Maps the projected scores back to input space.
    MatrixX<Scalar> reconstruct() const {
        MatrixX<Scalar> x = projected * components;
        x.rowwise() += mean.transpose();
        return x;
    }
};

/// Principal components of the sample covariance of `X` (rows = samples).
/// Each component is signed so that its largest-magnitude coefficient is
/// positive; ties in magnitude go to the lowest index.
template <typename Derived>
PcaResult<typename Derived::Scalar> pca(const Eigen::MatrixBase<Derived>& X, Eigen::Index k) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (n < 2) throw InvalidArgument("pca needs at least 2 samples");
    if (k < 1 || k > d || k > n - 1) {
        throw InvalidArgument("pca: k = " + std::to_string(k) + " outside [1, min(n-1, d)]");
    }
    if (!X.allFinite()) throw InvalidArgument("pca: input contains non-finite values");

    PcaResult<Scalar> r;
    r.mean = X.colwise().mean().transpose();
    MatrixX<Scalar> centered = X.rowwise() - r.mean.transpose();
    MatrixX<Scalar> cov = (centered.transpose() * centered) / static_cast<Scalar>(n - 1);

    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(cov);
    if (solver.info() != Eigen::Success) throw InvalidArgument("pca: eigendecomposition failed");
    VectorX<Scalar> eigenvalues = solver.eigenvalues().cwiseMax(Scalar(0));
    const MatrixX<Scalar>& vectors = solver.eigenvectors();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return eigenvalues(a) > eigenvalues(b); });

    const Scalar total = eigenvalues.sum();
    r.components.resize(k, d);
    r.explained_variance_ratio.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        VectorX<Scalar> v = vectors.col(src);
        Eigen::Index pivot = 0;
        for (Eigen::Index j = 1; j < d; ++j) {
            if (std::abs(v(j)) > std::abs(v(pivot))) pivot = j;
        }
        if (v(pivot) < 0) v = -v;
        r.components.row(i) = v.transpose();
        r.explained_variance_ratio(i) = total > 0 ? eigenvalues(src) / total : Scalar(0);
    }
    r.projected = centered * r.components.transpose();
    return r;
}

// ---------------------------------------------------------------- t-SNE

struct TsneOptions {
    double perplexity = 30.0;
    std::uint64_t seed = 0;
    int iterations = 1000;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    int exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch = 250;
    /// Per-coordinate step gains: grow by gain_increase while the descent
    /// direction agrees with the current update, shrink by gain_decay
    /// otherwise, floored at min_gain.
    double gain_increase = 0.2;
    double gain_decay = 0.8;
    double min_gain = 0.01;
    double init_stddev = 1e-4;
    double bisection_tolerance = 1e-5;
    int bisection_steps = 50;
};

template <typename Scalar>
struct TsneResult {
    /// n x 2 embedding.
    MatrixX<Scalar> coords;
    double perplexity = 0;
    std::uint64_t seed = 0;
    int iterations = 0;
};

namespace detail {

/// Standard normal draws from mt19937_64 via Box-Muller. Written out so the
/// sequence is the same with every standard library.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0;
    bool has_spare_ = false;
};

template <typename Scalar>
MatrixX<Scalar> squared_distances(const MatrixX<Scalar>& X) {
    const Eigen::Index n = X.rows();
    MatrixX<Scalar> D = MatrixX<Scalar>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Scalar v = (X.row(i) - X.row(j)).squaredNorm();
            D(i, j) = v;
            D(j, i) = v;
        }
    }
    return D;
}

}  // namespace detail

/// Symmetrized joint probabilities P of exact t-SNE. Each row's Gaussian
/// bandwidth is found by bisection so that its entropy in bits matches
/// log2(perplexity).
template <typename Derived>
MatrixX<typename Derived::Scalar> tsne_affinities(const Eigen::MatrixBase<Derived>& X, double perplexity,
                                                  double tolerance = 1e-5, int max_steps = 50) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = X.rows();
    const MatrixX<Scalar> D = detail::squared_distances<Scalar>(X.eval());
    const double target = std::log2(perplexity);
    MatrixX<Scalar> P = MatrixX<Scalar>::Zero(n, n);
    std::vector<double> row(static_cast<std::size_t>(n));

    for (Eigen::Index i = 0; i < n; ++i) {
        double min_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) min_d = std::min(min_d, static_cast<double>(D(i, j)));
        }
        double beta = 1.0;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        for (int step = 0; step < max_steps; ++step) {
            double sum = 0.0;
            double weighted = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) {
                    row[static_cast<std::size_t>(j)] = 0.0;
                    continue;
                }
                const double shifted = static_cast<double>(D(i, j)) - min_d;
                const double p = std::exp(-beta * shifted);
                row[static_cast<std::size_t>(j)] = p;
                sum += p;
                weighted += p * shifted;
            }
            // Shannon entropy in nats of the normalized row, converted to bits.
            const double entropy = (std::log(sum) + beta * weighted / sum) / std::numbers::ln2;
            const double diff = entropy - target;
            if (std::abs(diff) < tolerance) break;
            if (diff > 0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
        }
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double p = std::exp(-beta * (static_cast<double>(D(i, j)) - min_d));
            row[static_cast<std::size_t>(j)] = p;
            sum += p;
        }
        for (Eigen::Index j = 0; j < n; ++j) P(i, j) = static_cast<Scalar>(row[static_cast<std::size_t>(j)] / sum);
    }

    MatrixX<Scalar> joint = (P + P.transpose()) / static_cast<Scalar>(2 * n);
    joint = joint.cwiseMax(Scalar(1e-12));
    joint.diagonal().setZero();
    return joint;
}

/// KL(P || Q) where Q is the Student-t affinity of the embedding Y.
template <typename Scalar>
Scalar tsne_kl_divergence(const MatrixX<Scalar>& P, const MatrixX<Scalar>& Y) {
    const Eigen::Index n = Y.rows();
    const MatrixX<Scalar> D = detail::squared_distances<Scalar>(Y);
    Scalar z = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) z += Scalar(1) / (Scalar(1) + D(i, j));
        }
    }
    Scalar kl = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || P(i, j) <= 0) continue;
            const Scalar q = (Scalar(1) / (Scalar(1) + D(i, j))) / z;
            kl += P(i, j) * std::log(P(i, j) / q);
        }
    }
    return kl;
}

/// Analytic gradient of tsne_kl_divergence with respect to Y:
/// 4 * sum_j (p_ij - q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2).
template <typename Scalar>
MatrixX<Scalar> tsne_gradient(const MatrixX<Scalar>& P, const MatrixX<Scalar>& Y) {
    const Eigen::Index n = Y.rows();
    MatrixX<Scalar> num = detail::squared_distances<Scalar>(Y);
    Scalar z = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            num(i, j) = i == j ? Scalar(0) : Scalar(1) / (Scalar(1) + num(i, j));
            z += num(i, j);
        }
    }
    MatrixX<Scalar> grad = MatrixX<Scalar>::Zero(n, Y.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const Scalar w = (P(i, j) - num(i, j) / z) * num(i, j);
            grad.row(i) += w * (Y.row(i) - Y.row(j));
        }
    }
    return Scalar(4) * grad;
}

/// Exact t-SNE to two dimensions. Requires n >= 4 and
/// 1 <= perplexity <= (n - 1) / 3.
template <typename Derived>
TsneResult<typename Derived::Scalar> tsne(const Eigen::MatrixBase<Derived>& X, const TsneOptions& options = {}) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = X.rows();
    if (n < 4) throw InvalidArgument("tsne needs at least 4 samples");
    const double max_perplexity = static_cast<double>(n - 1) / 3.0;
    if (!(options.perplexity >= 1.0 && options.perplexity <= max_perplexity)) {
        throw InvalidArgument("tsne: perplexity " + std::to_string(options.perplexity) + " outside [1, " +
                              std::to_string(max_perplexity) + "]");
    }
    if (options.iterations < 0) throw InvalidArgument("tsne: negative iteration count");
    if (!X.allFinite()) throw InvalidArgument("tsne: input contains non-finite values");

    const MatrixX<Scalar> P = tsne_affinities(X, options.perplexity, options.bisection_tolerance,
                                              options.bisection_steps);

    MatrixX<Scalar> Y(n, 2);
    detail::GaussianStream gauss(options.seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < 2; ++c) Y(i, c) = static_cast<Scalar>(options.init_stddev * gauss.next());
    }

    MatrixX<Scalar> velocity = MatrixX<Scalar>::Zero(n, 2);
    MatrixX<Scalar> gains = MatrixX<Scalar>::Ones(n, 2);
    const MatrixX<Scalar> P_exaggerated = P * static_cast<Scalar>(options.early_exaggeration);
    const auto inc = static_cast<Scalar>(options.gain_increase);
    const auto decay = static_cast<Scalar>(options.gain_decay);
    const auto min_gain = static_cast<Scalar>(options.min_gain);
    for (int it = 0; it < options.iterations; ++it) {
        const MatrixX<Scalar>& Pi = it < options.exaggeration_iterations ? P_exaggerated : P;
        const Scalar momentum =
            static_cast<Scalar>(it < options.momentum_switch ? options.initial_momentum : options.final_momentum);
        const MatrixX<Scalar> grad = tsne_gradient<Scalar>(Pi, Y);
        for (Eigen::Index k = 0; k < grad.size(); ++k) {
            const bool agrees = (grad(k) > 0) != (velocity(k) > 0);
            gains(k) = std::max(agrees ? gains(k) + inc : gains(k) * decay, min_gain);
        }
        velocity = momentum * velocity - static_cast<Scalar>(options.learning_rate) * gains.cwiseProduct(grad);
        Y += velocity;
        const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> centre = Y.colwise().mean();
        Y.rowwise() -= centre;
    }

    TsneResult<Scalar> r;
    r.coords = std::move(Y);
    r.perplexity = options.perplexity;
    r.seed = options.seed;
    r.iterations = options.iterations;
    return r;
}

// ---------------------------------------------------------------- Spearman

namespace detail {

/// Twice the average (1-based) rank of each value, so tied ranks stay integral.
inline std::vector<long long> doubled_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<long long> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const auto doubled = static_cast<long long>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = doubled;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

/// Spearman's rho: Pearson correlation of average ranks. NaN entries are
/// missing and removed pairwise. Returns nullopt when fewer than 3 pairs
/// remain and 0 when either side is constant.
template <typename DX, typename DY>
std::optional<double> spearman(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
    if (x.size() != y.size()) throw InvalidArgument("spearman: length mismatch");
    std::vector<double> xs;
    std::vector<double> ys;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double a = static_cast<double>(x(i));
        const double b = static_cast<double>(y(i));
        if (std::isnan(a) || std::isnan(b)) continue;
        xs.push_back(a);
        ys.push_back(b);
    }
    const std::size_t n = xs.size();
    if (n < 3) return std::nullopt;
    const auto rx = detail::doubled_ranks(xs);
    const auto ry = detail::doubled_ranks(ys);
    // Centred doubled ranks: 2r - (n + 1). All sums are exact integers.
    const auto shift = static_cast<long long>(n + 1);
    long long sxy = 0;
    long long sxx = 0;
    long long syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long long a = rx[i] - shift;
        const long long b = ry[i] - shift;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0 || syy == 0) return 0.0;
    const double denom = sxx == syy ? static_cast<double>(sxx)
                                    : std::sqrt(static_cast<double>(sxx)) * std::sqrt(static_cast<double>(syy));
    return std::clamp(static_cast<double>(sxy) / denom, -1.0, 1.0);
}

inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return spearman(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                    Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
}

// ---------------------------------------------------------------- correlation table

/// Spearman correlation of each feature with fitness, one row per group.
struct CorrelationTable {
    std::vector<GroupKey> groups;
    std::vector<std::string> features;
    /// rho[group][feature]; nullopt when too few valid nodes.
    std::vector<std::vector<std::optional<double>>> rho;

    /// CSV with a "group" column followed by one column per feature;
    /// missing values are empty cells.
    std::string to_csv() const;
};

/// Pools the nodes of all runs of each (benchmark, method, llm) group and
/// correlates raw feature values with fitness_norm. Groups keep their order
/// of first appearance in `cegs`.
CorrelationTable correlation_table(const std::vector<EvolutionGraph>& cegs, const std::vector<std::string>& feature_set);

}  // namespace codeevo
