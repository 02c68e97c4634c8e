#include "codeevo/astfeat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>

namespace codeevo {

namespace {

using pyast::AstGraph;

// Compressed undirected adjacency.
struct Adjacency {
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> targets;

    explicit Adjacency(const AstGraph& g) {
        const std::size_t n = g.nodes.size();
        offsets.assign(n + 1, 0);
        for (const auto& [a, b] : g.edges) {
            if (a >= n || b >= n) throw InvalidArgument("edge references unknown node");
            ++offsets[a + 1];
            ++offsets[b + 1];
        }
        for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
        targets.resize(offsets[n]);
        std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
        for (const auto& [a, b] : g.edges) {
            targets[fill[a]++] = b;
            targets[fill[b]++] = a;
        }
    }

    std::size_t size() const { return offsets.size() - 1; }
    std::uint32_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
    auto neighbors(std::size_t v) const {
        return std::span<const std::uint32_t>(targets.data() + offsets[v], degree(v));
    }
};

struct Moments {
    double min = 0;
    double max = 0;
    double mean = 0;
    double var = 0;
};

template <typename Range>
Moments moments(const Range& values) {
    Moments m;
    if (values.empty()) return m;
    m.min = *std::min_element(values.begin(), values.end());
    m.max = *std::max_element(values.begin(), values.end());
    double sum = 0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.var = ss / static_cast<double>(values.size());
    return m;
}

// Shannon entropy (nats) of the empirical distribution of integer values.
double entropy(const std::vector<std::uint32_t>& values) {
    if (values.empty()) return 0;
    std::map<std::uint32_t, std::size_t> counts;
    for (auto v : values) ++counts[v];
    const double n = static_cast<double>(values.size());
    double h = 0;
    for (const auto& [value, count] : counts) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

std::vector<std::uint32_t> bfs_distances(const Adjacency& adj, std::uint32_t source) {
    constexpr auto kUnreached = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(adj.size(), kUnreached);
    std::vector<std::uint32_t> queue;
    queue.reserve(adj.size());
    dist[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t v = queue[head];
        for (std::uint32_t w : adj.neighbors(v)) {
            if (dist[w] == kUnreached) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if (queue.size() != adj.size()) throw InvalidArgument("graph is not connected");
    return dist;
}

struct DistanceStats {
    double diameter = 0;
    double radius = 0;
    double mean_eccentricity = 0;
    double avg_shortest_path = 0;
};

DistanceStats finish_eccentricities(const std::vector<std::uint32_t>& ecc, std::uint64_t pair_distance_sum) {
    DistanceStats s;
    const std::size_t n = ecc.size();
    s.diameter = *std::max_element(ecc.begin(), ecc.end());
    s.radius = *std::min_element(ecc.begin(), ecc.end());
    std::uint64_t ecc_sum = 0;
    for (auto e : ecc) ecc_sum += e;
    s.mean_eccentricity = static_cast<double>(ecc_sum) / static_cast<double>(n);
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    s.avg_shortest_path = static_cast<double>(pair_distance_sum) / pairs;
    return s;
}

// Tree: eccentricity is the larger distance to the two ends of a diameter
// path; the pair-distance sum counts each edge size * (n - size) times.
DistanceStats tree_distances(const Adjacency& adj) {
    const std::size_t n = adj.size();
    const auto d0 = bfs_distances(adj, 0);
    const auto a = static_cast<std::uint32_t>(std::max_element(d0.begin(), d0.end()) - d0.begin());
    const auto da = bfs_distances(adj, a);
    const auto b = static_cast<std::uint32_t>(std::max_element(da.begin(), da.end()) - da.begin());
    const auto db = bfs_distances(adj, b);
    std::vector<std::uint32_t> ecc(n);
    for (std::size_t v = 0; v < n; ++v) ecc[v] = std::max(da[v], db[v]);

    // BFS order from node 0 gives parents before children.
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return d0[x] < d0[y] || (d0[x] == d0[y] && x < y); });
    std::vector<std::uint64_t> size(n, 1);
    std::uint64_t pair_sum = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::uint32_t v = *it;
        if (d0[v] == 0) continue;
        for (std::uint32_t w : adj.neighbors(v)) {
            if (d0[w] + 1 == d0[v]) {
                size[w] += size[v];
                pair_sum += size[v] * (n - size[v]);
                break;
            }
        }
    }
    return finish_eccentricities(ecc, pair_sum);
}

DistanceStats general_distances(const Adjacency& adj) {
    const std::size_t n = adj.size();
    std::vector<std::uint32_t> ecc(n);
    std::uint64_t pair_sum = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto d = bfs_distances(adj, v);
        ecc[v] = *std::max_element(d.begin(), d.end());
        for (std::uint32_t w = v + 1; w < n; ++w) pair_sum += d[w];
    }
    return finish_eccentricities(ecc, pair_sum);
}

}  // namespace

std::array<double, 22> GraphFeatures::values() const {
    return {node_count,     edge_count,     edge_density,    degree_min,     degree_max,      degree_mean,
            degree_var,     degree_entropy, assortativity,   depth_min,      depth_max,       depth_mean,
            depth_entropy,  clustering_min, clustering_max,  clustering_mean, clustering_var, transitivity,
            diameter,       radius,         mean_eccentricity, avg_shortest_path};
}

std::vector<double> eigenvector_centrality(const AstGraph& graph, double tolerance, int max_iterations) {
    const Adjacency adj(graph);
    const std::size_t n = adj.size();
    if (n == 0) return {};
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (int iter = 0; iter < max_iterations; ++iter) {
        for (std::size_t v = 0; v < n; ++v) {
            double s = x[v];
            for (std::uint32_t w : adj.neighbors(v)) s += x[w];
            next[v] = s;
        }
        double norm = 0;
        for (double v : next) norm += v * v;
        norm = std::sqrt(norm);
        double change = 0;
        for (std::size_t v = 0; v < n; ++v) {
            next[v] /= norm;
            change += std::abs(next[v] - x[v]);
        }
        x.swap(next);
        if (change < static_cast<double>(n) * tolerance) break;
    }
    return x;
}

GraphFeatures compute_graph_features(const AstGraph& graph, const GraphFeatureOptions& options) {
    const std::size_t n = graph.nodes.size();
    if (n == 0) throw InvalidArgument("AST graph has no nodes");
    const Adjacency adj(graph);
    GraphFeatures f;
    f.node_count = static_cast<double>(n);
    f.edge_count = static_cast<double>(graph.edges.size());
    f.edge_density = f.edge_count / f.node_count;

    std::vector<std::uint32_t> degrees(n);
    std::vector<double> degrees_real(n);
    for (std::size_t v = 0; v < n; ++v) {
        degrees[v] = adj.degree(v);
        degrees_real[v] = degrees[v];
    }
    const Moments dm = moments(degrees_real);
    f.degree_min = dm.min;
    f.degree_max = dm.max;
    f.degree_mean = dm.mean;
    f.degree_var = dm.var;
    f.degree_entropy = entropy(degrees);

    // Endpoint-degree correlation over both orientations of each edge; the
    // two marginals coincide, so one mean and one variance suffice.
    if (!graph.edges.empty()) {
        double sum = 0;
        for (const auto& [a, b] : graph.edges) sum += degrees_real[a] + degrees_real[b];
        const double mean = sum / (2.0 * static_cast<double>(graph.edges.size()));
        double cov = 0;
        double var = 0;
        for (const auto& [a, b] : graph.edges) {
            const double da = degrees_real[a] - mean;
            const double db = degrees_real[b] - mean;
            cov += 2.0 * da * db;
            var += da * da + db * db;
        }
        f.assortativity = var > 0 ? std::clamp(cov / var, -1.0, 1.0) : 0.0;
    }

    std::vector<std::uint32_t> depths(n);
    std::vector<double> depths_real(n);
    for (std::size_t v = 0; v < n; ++v) {
        depths[v] = graph.nodes[v].depth;
        depths_real[v] = depths[v];
    }
    const Moments pm = moments(depths_real);
    f.depth_min = pm.min;
    f.depth_max = pm.max;
    f.depth_mean = pm.mean;
    f.depth_entropy = entropy(depths);

    std::vector<double> clustering(n, 0.0);
    std::vector<std::uint32_t> mark(n, std::numeric_limits<std::uint32_t>::max());
    double triangle_corners = 0;
    double triples = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const double k = degrees[v];
        if (k < 2) continue;
        for (std::uint32_t u : adj.neighbors(v)) mark[u] = v;
        std::uint64_t links = 0;
        for (std::uint32_t u : adj.neighbors(v)) {
            for (std::uint32_t w : adj.neighbors(u)) {
                if (w > u && mark[w] == v) ++links;
            }
        }
        const double possible = k * (k - 1) / 2.0;
        clustering[v] = static_cast<double>(links) / possible;
        triangle_corners += static_cast<double>(links);
        triples += possible;
    }
    const Moments cm = moments(clustering);
    f.clustering_min = cm.min;
    f.clustering_max = cm.max;
    f.clustering_mean = cm.mean;
    f.clustering_var = cm.var;
    f.transitivity = triples > 0 ? triangle_corners / triples : 0.0;

    if (n > 1) {
        const bool tree = graph.edges.size() == n - 1;
        const DistanceStats ds = tree ? tree_distances(adj) : general_distances(adj);
        f.diameter = ds.diameter;
        f.radius = ds.radius;
        f.mean_eccentricity = ds.mean_eccentricity;
        f.avg_shortest_path = ds.avg_shortest_path;
    }

    if (options.include_eigencentrality) {
        const auto c = eigenvector_centrality(graph, options.eigencentrality_tolerance,
                                              options.eigencentrality_max_iterations);
        f.eig_centrality_max = *std::max_element(c.begin(), c.end());
        double sum = 0;
        for (double v : c) sum += v;
        f.eig_centrality_mean = sum / static_cast<double>(n);
    }
    return f;
}

}  // namespace codeevo
