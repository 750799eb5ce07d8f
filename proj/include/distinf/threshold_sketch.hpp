#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dijkstra.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "ranks.hpp"
#include "types.hpp"

namespace distinf {

// Bottom-k integer ranks of the pairs (v, i) within distance T of a node,
// in increasing order.
struct threshold_sketch {
    std::vector<std::uint64_t> ranks;

    friend bool operator==(const threshold_sketch&, const threshold_sketch&) = default;
};

// Reverse Dijkstras from every ranked pair in increasing rank order, cut at
// distance T. A node whose sketch is full is passed through unless all of
// its entries come from the searched instance and lie no farther than the
// current search distance; then every node behind it already holds k
// smaller ranks within T and the search is pruned there.
inline std::vector<threshold_sketch> build_threshold_sketches(const multi_instance_graph& g, const rank_assignment& ranks,
                                                              std::uint32_t k, double t) {
    if (k == 0) {
        throw validation_error("sketch parameter k must be at least 1");
    }
    if (!(t > 0.0)) {
        throw validation_error("threshold T must be positive");
    }
    const node_id n = g.node_count();
    if (ranks.node_count() != n || ranks.instance_count() != g.instance_count()) {
        throw contract_error("rank assignment does not match the graph");
    }
    std::vector<threshold_sketch> sketches(n);
    constexpr instance_id mixed = ~instance_id{0};
    std::vector<double> farthest(n, 0.0);
    std::vector<instance_id> source_instance(n, mixed);
    dijkstra_workspace ws(n);
    for (std::uint64_t r = 1; r <= ranks.ranked_count(); ++r) {
        const auto [v, i] = split_pair_index(ranks.pair_of(r), n);
        const node_id sources[] = {v};
        ws.run(reverse_arcs(g[i]), sources, [&](node_id u, double d) {
            auto& sk = sketches[u].ranks;
            if (sk.size() < k) {
                source_instance[u] = sk.empty() || source_instance[u] == i ? i : mixed;
                sk.push_back(r);
                farthest[u] = std::max(farthest[u], d);
                return scan_action::relax;
            }
            return source_instance[u] == i && farthest[u] <= d ? scan_action::prune : scan_action::relax;
        }, t);
    }
    return sketches;
}

// Bottom-k union-size estimate: the exact count when the union holds fewer
// than k distinct ranks, otherwise (k - 1) / tau_k with tau_k the k-th
// smallest rank divided by `divisor`.
inline double estimate_union_size(std::span<const threshold_sketch* const> sketches, std::uint32_t k, double divisor) {
    if (k < 2) {
        throw validation_error("union estimation needs k >= 2");
    }
    std::vector<std::uint64_t> all;
    for (const auto* sk : sketches) {
        if (sk->ranks.size() > k) {
            throw validation_error("sketch holds more than k ranks");
        }
        all.insert(all.end(), sk->ranks.begin(), sk->ranks.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() < k) {
        return static_cast<double>(all.size());
    }
    return (k - 1.0) / (static_cast<double>(all[k - 1]) / divisor);
}

// Threshold-influence oracle over bottom-k reachability sketches.
class threshold_oracle {
public:
    static threshold_oracle build(const multi_instance_graph& g, std::uint32_t k, double t, std::uint64_t seed) {
        threshold_oracle oracle;
        oracle.k_ = k;
        oracle.t_ = t;
        oracle.ranks_ = rank_assignment(g.node_count(), g.instance_count(), k, seed);
        oracle.sketches_ = build_threshold_sketches(g, oracle.ranks_, k, t);
        return oracle;
    }

    std::uint32_t k() const noexcept { return k_; }
    double threshold() const noexcept { return t_; }
    const rank_assignment& ranks() const noexcept { return ranks_; }
    const threshold_sketch& sketch(node_id v) const {
        if (v >= sketches_.size()) {
            throw validation_error("no sketch for node " + std::to_string(v));
        }
        return sketches_[v];
    }

    // Estimated number of pairs within T of S, divided by ell.
    double estimate(std::span<const node_id> seeds) const {
        if (seeds.empty()) {
            return 0.0;
        }
        std::vector<const threshold_sketch*> parts;
        parts.reserve(seeds.size());
        for (const node_id s : seeds) {
            parts.push_back(&sketch(s));
        }
        return estimate_union_size(parts, k_, ranks_.divisor()) / ranks_.instance_count();
    }

private:
    std::uint32_t k_ = 0;
    double t_ = 0.0;
    rank_assignment ranks_;
    std::vector<threshold_sketch> sketches_;
};

} // namespace distinf
