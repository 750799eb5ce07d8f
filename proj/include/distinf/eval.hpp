#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <span>
#include <vector>

#include "decay.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "graph.hpp"
#include "sampling.hpp"

namespace distinf {

struct prefix_influence {
    std::size_t prefix;
    double influence;
    double influence_pct; // of n * alpha(0)
};

// Exact influence of every prefix of `seeds` on the given instances.
inline std::vector<prefix_influence> prefix_influences(const multi_instance_graph& g, std::span<const node_id> seeds,
                                                       const decay_function& alpha) {
    std::vector<node_id> seen(seeds.begin(), seeds.end());
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw validation_error("seed list contains a duplicate");
    }
    for (const node_id s : seeds) {
        if (s >= g.node_count()) {
            throw validation_error("unknown node in seed list");
        }
    }
    residual_state residual(g);
    dijkstra_workspace ws(g.node_count());
    std::vector<prefix_influence> rows;
    rows.reserve(seeds.size());
    double total = 0.0;
    const double full = g.node_count() * alpha.alpha0();
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        total += add_seed(g, residual, seeds[j], alpha, ws);
        rows.push_back({j + 1, total, 100.0 * total / full});
    }
    return rows;
}

// Influence of each prefix on m freshly drawn instances. Lengths are drawn
// from the rng stream seed + 1 so they never coincide with the instances a
// seed set was computed on; per-edge distribution parameters are kept.
inline std::vector<prefix_influence> evaluate_held_out(const multi_instance_graph& base, edge_length_model model,
                                                       std::span<const node_id> seeds, const decay_function& alpha,
                                                       std::uint32_t m) {
    model.draw_offset += 1;
    const auto held_out = sample_instances(base, model, m);
    return prefix_influences(held_out, seeds, alpha);
}

inline void write_prefix_csv(std::ostream& out, std::span<const prefix_influence> rows) {
    out << "prefix,influence,influence_pct\n";
    out << std::setprecision(10);
    for (const auto& row : rows) {
        out << row.prefix << ',' << row.influence << ',' << std::fixed << std::setprecision(2) << row.influence_pct
            << std::defaultfloat << std::setprecision(10) << '\n';
    }
}

} // namespace distinf
