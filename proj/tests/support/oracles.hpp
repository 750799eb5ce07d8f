#pragma once

// Slow reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "distinf.hpp"

namespace oracle {

using distinf::node_id;

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Bellman-Ford distances from every node of `sources` in one instance.
inline std::vector<double> bellman_ford(const distinf::instance& g, const std::vector<node_id>& sources) {
    const node_id n = g.node_count();
    std::vector<double> dist(n, inf);
    for (const node_id s : sources) {
        dist[s] = 0.0;
    }
    const auto edges = g.edges();
    for (node_id round = 0; round < n; ++round) {
        bool changed = false;
        for (const auto& e : edges) {
            if (dist[e.tail] + e.length < dist[e.head]) {
                dist[e.head] = dist[e.tail] + e.length;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
    }
    return dist;
}

// all_pairs[i][u][v] = d^(i)_{uv}.
inline std::vector<std::vector<std::vector<double>>> all_pairs(const distinf::multi_instance_graph& g) {
    std::vector<std::vector<std::vector<double>>> d(g.instance_count());
    for (std::uint32_t i = 0; i < g.instance_count(); ++i) {
        for (node_id u = 0; u < g.node_count(); ++u) {
            d[i].push_back(bellman_ford(g[i], {u}));
        }
    }
    return d;
}

// Influence by direct enumeration: (1/ell) sum_i sum_v alpha(min_{s in S} d_sv).
inline double influence(const distinf::multi_instance_graph& g, const std::vector<node_id>& seeds,
                        const distinf::decay_function& alpha) {
    if (seeds.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (std::uint32_t i = 0; i < g.instance_count(); ++i) {
        const auto dist = bellman_ford(g[i], seeds);
        for (const double d : dist) {
            total += alpha(d);
        }
    }
    return total / g.instance_count();
}

// Marginal gain by enumerating max{0, alpha(d_uv) - alpha(d_Sv)} over pairs.
inline double marginal_gain(const distinf::multi_instance_graph& g, const std::vector<node_id>& seeds, node_id u,
                            const distinf::decay_function& alpha) {
    double total = 0.0;
    for (std::uint32_t i = 0; i < g.instance_count(); ++i) {
        const auto from_s = seeds.empty() ? std::vector<double>(g.node_count(), inf) : bellman_ford(g[i], seeds);
        const auto from_u = bellman_ford(g[i], {u});
        for (node_id v = 0; v < g.node_count(); ++v) {
            total += std::max(0.0, alpha(from_u[v]) - alpha(from_s[v]));
        }
    }
    return total / g.instance_count();
}

// Random multi-instance graph: a random topology with exponential lengths.
inline distinf::multi_instance_graph random_graph(node_id n, double degree, std::uint32_t ell, std::uint64_t seed,
                                                  double mean_length = 1.0) {
    const auto edges = distinf::random_digraph(n, degree, seed);
    const auto base = distinf::multi_instance_graph::single(n, edges);
    return distinf::sample_instances(base, distinf::edge_length_model::exponential(mean_length, seed * 31 + 7), ell);
}

// Random multi-instance graph whose instances also differ in topology.
inline distinf::multi_instance_graph random_varied_graph(node_id n, double degree, std::uint32_t ell,
                                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<distinf::instance> instances;
    for (std::uint32_t i = 0; i < ell; ++i) {
        auto edges = distinf::random_digraph(n, degree, rng());
        std::uniform_real_distribution<double> len(0.05, 2.0);
        for (auto& e : edges) {
            e.length = len(rng);
        }
        instances.push_back(distinf::instance::from_edges(n, edges));
    }
    return {n, std::move(instances)};
}

// a -> b -> c with unit lengths.
inline distinf::multi_instance_graph graph_a() {
    const distinf::edge edges[] = {{0, 1, 1.0}, {1, 2, 1.0}};
    return distinf::multi_instance_graph::single(3, edges);
}

// Two instances over {a, b}: a -> b of length 1, and no edges.
inline distinf::multi_instance_graph graph_b() {
    const distinf::edge one[] = {{0, 1, 1.0}};
    std::vector<distinf::instance> instances;
    instances.push_back(distinf::instance::from_edges(2, one));
    instances.push_back(distinf::instance::from_edges(2, {}));
    return {2, std::move(instances)};
}

// Greedy by brute force with lowest-index tie-breaking.
inline std::vector<node_id> greedy(const distinf::multi_instance_graph& g, const distinf::decay_function& alpha,
                                   node_id s_max) {
    std::vector<node_id> seeds;
    std::vector<bool> used(g.node_count(), false);
    for (node_id s = 0; s < s_max; ++s) {
        double best = -1.0;
        node_id pick = 0;
        for (node_id u = 0; u < g.node_count(); ++u) {
            if (used[u]) {
                continue;
            }
            const double gain = marginal_gain(g, seeds, u, alpha);
            if (gain > best + 1e-12) {
                best = gain;
                pick = u;
            }
        }
        used[pick] = true;
        seeds.push_back(pick);
    }
    return seeds;
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (const double x : xs) {
        s += x;
    }
    return s / xs.size();
}

inline double stddev(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (const double x : xs) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / (xs.size() - 1));
}

} // namespace oracle
