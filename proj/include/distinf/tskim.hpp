#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "dijkstra.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "graph.hpp"
#include "ranks.hpp"
#include "types.hpp"

namespace distinf {

struct tskim_config {
    double threshold = 1.0;
    std::uint32_t k = 64;
    node_id max_seeds = 50;
    std::uint64_t seed = 1;
    // Called after each seed with the number of seeds so far.
    std::function<void(std::size_t)> on_seed;
};

struct tskim_metrics {
    std::uint64_t pairs_started = 0;  // reverse searches started
    std::uint64_t reverse_scans = 0;  // nodes settled by reverse searches
    std::uint64_t forward_scans = 0;  // nodes settled by coverage updates
    std::size_t endgame_seeds = 0;    // seeds picked after all ranks were used
};

struct tskim_result {
    greedy_trace trace;
    tskim_metrics metrics;
};

// Greedy threshold-influence maximization over partial bottom-k sketches.
//
// Uncovered node-instance pairs are taken in rank order and searched
// backwards up to distance T; every node scanned gets a hit. The first node
// with k hits is the next seed. Its forward searches update the covered
// distances, and the hits that newly covered pairs had handed out are taken
// back, so counts always refer to the residual problem.
inline tskim_result run_tskim(const multi_instance_graph& g, const tskim_config& config) {
    const double t = config.threshold;
    const std::uint32_t k = config.k;
    if (!(t > 0.0)) {
        throw validation_error("threshold T must be positive");
    }
    if (k < 3) {
        throw validation_error("T-SKIM needs k >= 3");
    }
    const node_id n = g.node_count();
    const std::uint32_t ell = g.instance_count();
    if (config.max_seeds > n) {
        throw validation_error("seed count exceeds node count");
    }

    const rank_assignment ranks(n, ell, ell, config.seed);
    const pair_index pair_total = g.pair_count();

    std::vector<double> covered(pair_total, infinite_distance);
    std::vector<std::uint32_t> count(n, 0);
    std::vector<std::vector<node_id>> hits(pair_total);
    std::vector<bool> is_seed(n, false);
    pair_index covered_pairs = 0;

    std::uint64_t next_rank = 1;
    dijkstra_cursor cursor;
    pair_index cursor_pair = 0;
    std::uint64_t cursor_rank = 0;

    // Highest count first, ties to the lowest node index.
    auto endgame_order = [](const std::pair<std::uint32_t, node_id>& a, const std::pair<std::uint32_t, node_id>& b) {
        return a.first != b.first ? a.first < b.first : a.second > b.second;
    };
    std::priority_queue<std::pair<std::uint32_t, node_id>, std::vector<std::pair<std::uint32_t, node_id>>,
                        decltype(endgame_order)>
        endgame(endgame_order);
    bool endgame_ready = false;

    dijkstra_workspace ws(n);
    tskim_result result;
    auto& metrics = result.metrics;

    while (result.trace.entries.size() < config.max_seeds && covered_pairs < pair_total) {
        node_id selected = no_node;
        double estimate = 0.0;

        while (selected == no_node) {
            if (cursor.terminated()) {
                while (next_rank <= ranks.ranked_count() && covered[ranks.pair_of(next_rank)] <= t) {
                    ++next_rank;
                }
                if (next_rank > ranks.ranked_count()) {
                    break;
                }
                cursor_rank = next_rank++;
                cursor_pair = ranks.pair_of(cursor_rank);
                cursor = dijkstra_cursor(split_pair_index(cursor_pair, n).node);
                ++metrics.pairs_started;
            }
            const instance_id i = split_pair_index(cursor_pair, n).instance;
            const auto before = cursor.settled_count();
            cursor.resume(
                reverse_arcs(g[i]), [t](double d) { return d > t; },
                [&](node_id u, double) {
                    hits[cursor_pair].push_back(u);
                    if (++count[u] == k) {
                        selected = u;
                        return false;
                    }
                    return true;
                });
            metrics.reverse_scans += cursor.settled_count() - before;
            if (!cursor.terminated() && cursor.next_distance() > t) {
                cursor.terminate();
            }
            if (selected != no_node) {
                estimate = (k - 1.0) / ranks.normalized(cursor_pair) / ell;
            }
        }

        if (selected == no_node) {
            // Every uncovered pair has been searched; counts are exact and
            // only decrease from here, so a lazy max-heap suffices.
            if (!endgame_ready) {
                for (node_id u = 0; u < n; ++u) {
                    if (!is_seed[u] && count[u] > 0) {
                        endgame.push({count[u], u});
                    }
                }
                endgame_ready = true;
            }
            while (!endgame.empty()) {
                const auto [c, u] = endgame.top();
                endgame.pop();
                if (is_seed[u] || count[u] == 0) {
                    continue;
                }
                if (count[u] < c) {
                    endgame.push({count[u], u});
                    continue;
                }
                selected = u;
                break;
            }
            if (selected == no_node) {
                break;
            }
            estimate = static_cast<double>(count[selected]) / ell;
            ++metrics.endgame_seeds;
        }

        is_seed[selected] = true;
        std::uint64_t newly_covered = 0;
        const node_id sources[] = {selected};
        for (instance_id i = 0; i < ell; ++i) {
            ws.run(forward_arcs(g[i]), sources, [&](node_id v, double d) {
                ++metrics.forward_scans;
                const pair_index p = make_pair_index(v, i, n);
                if (d >= covered[p]) {
                    return scan_action::prune;
                }
                if (covered[p] > t) {
                    ++newly_covered;
                    ++covered_pairs;
                    for (const node_id u : hits[p]) {
                        --count[u];
                    }
                    hits[p] = {};
                }
                covered[p] = d;
                return scan_action::relax;
            }, t);
        }
        if (!cursor.terminated() && covered[cursor_pair] <= t) {
            cursor.terminate();
        }
        result.trace.entries.push_back({selected, static_cast<double>(newly_covered) / ell, estimate});
        if (config.on_seed) {
            config.on_seed(result.trace.entries.size());
        }
    }
    return result;
}

} // namespace distinf
