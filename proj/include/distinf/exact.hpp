#pragma once

#include <algorithm>
#include <iomanip>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

#include "decay.hpp"
#include "dijkstra.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "types.hpp"

namespace distinf {

// Distances delta(v, i) from the current seed set, defining the residual
// problem in which influence equals marginal influence.
class residual_state {
public:
    residual_state(node_id n, std::uint32_t ell)
        : n_(n), ell_(ell), delta_(static_cast<std::size_t>(n) * ell, infinite_distance), is_seed_(n, false) {}

    explicit residual_state(const multi_instance_graph& g) : residual_state(g.node_count(), g.instance_count()) {}

    node_id node_count() const noexcept { return n_; }
    std::uint32_t instance_count() const noexcept { return ell_; }

    double delta(node_id v, instance_id i) const noexcept { return delta_[make_pair_index(v, i, n_)]; }
    double delta(pair_index p) const noexcept { return delta_[p]; }
    void set_delta(pair_index p, double d) noexcept { delta_[p] = d; }

    bool is_seed(node_id v) const noexcept { return is_seed_[v]; }
    const std::vector<node_id>& seeds() const noexcept { return seeds_; }
    void mark_seed(node_id v) {
        if (is_seed_[v]) {
            throw contract_error("node is already a seed");
        }
        is_seed_[v] = true;
        seeds_.push_back(v);
    }

private:
    node_id n_;
    std::uint32_t ell_;
    std::vector<double> delta_;
    std::vector<bool> is_seed_;
    std::vector<node_id> seeds_;
};

struct trace_entry {
    node_id seed;
    double exact_marginal;
    std::optional<double> estimated_marginal;
};

// Seeds in selection order with their marginal influences.
struct greedy_trace {
    std::vector<trace_entry> entries;
    // Accumulated shortfall of exact below (1 - eps) times estimated
    // marginals; set by runs that check their estimates.
    std::optional<double> error_sum;

    std::vector<node_id> seeds() const {
        std::vector<node_id> s;
        s.reserve(entries.size());
        for (const auto& e : entries) {
            s.push_back(e.seed);
        }
        return s;
    }
    double total_exact() const {
        double sum = 0.0;
        for (const auto& e : entries) {
            sum += e.exact_marginal;
        }
        return sum;
    }
};

// CSV `rank,seed,exact_marginal,estimated_marginal`; seeds are printed with
// their original labels and a missing estimate is an empty field.
inline void write_trace_csv(std::ostream& out, const greedy_trace& trace, const multi_instance_graph& g) {
    out << "rank,seed,exact_marginal,estimated_marginal\n";
    out << std::setprecision(17);
    std::size_t rank = 1;
    for (const auto& e : trace.entries) {
        out << rank++ << ',' << g.label(e.seed) << ',' << e.exact_marginal << ',';
        if (e.estimated_marginal) {
            out << *e.estimated_marginal;
        }
        out << '\n';
    }
    if (trace.error_sum) {
        out << "# error_sum," << *trace.error_sum << '\n';
    }
}

namespace detail {

inline void check_node(const multi_instance_graph& g, node_id u) {
    if (u >= g.node_count()) {
        throw contract_error("node id out of range");
    }
}

} // namespace detail

// (1/ell) * sum over instances and nodes of alpha(distance from S).
inline double influence_exact(const multi_instance_graph& g, std::span<const node_id> seeds, const decay_function& alpha,
                              dijkstra_workspace& ws) {
    for (const node_id s : seeds) {
        detail::check_node(g, s);
    }
    if (seeds.empty()) {
        return 0.0;
    }
    const double bound = alpha.support_bound();
    double total = 0.0;
    for (instance_id i = 0; i < g.instance_count(); ++i) {
        ws.run(forward_arcs(g[i]), seeds, [&](node_id, double d) {
            const double a = alpha(d);
            total += a;
            return a > 0.0 ? scan_action::relax : scan_action::prune;
        }, bound);
    }
    return total / g.instance_count();
}

inline double influence_exact(const multi_instance_graph& g, std::span<const node_id> seeds, const decay_function& alpha) {
    dijkstra_workspace ws(g.node_count());
    return influence_exact(g, seeds, alpha, ws);
}

// Marginal influence of u in the residual problem: (1/ell) * sum over pairs of
// max{0, alpha(d_uv) - alpha(delta_v)}.
inline double marg_gain(const multi_instance_graph& g, const residual_state& residual, node_id u,
                        const decay_function& alpha, dijkstra_workspace& ws) {
    detail::check_node(g, u);
    const node_id n = g.node_count();
    const node_id sources[] = {u};
    double total = 0.0;
    for (instance_id i = 0; i < g.instance_count(); ++i) {
        ws.run(forward_arcs(g[i]), sources, [&](node_id v, double d) {
            const double delta = residual.delta(make_pair_index(v, i, n));
            if (d >= delta) {
                return scan_action::prune;
            }
            const double a = alpha(d);
            if (a == 0.0) {
                return scan_action::prune;
            }
            total += a - alpha(delta);
            return scan_action::relax;
        }, alpha.support_bound());
    }
    return total / g.instance_count();
}

inline double marg_gain(const multi_instance_graph& g, const residual_state& residual, node_id u,
                        const decay_function& alpha) {
    dijkstra_workspace ws(g.node_count());
    return marg_gain(g, residual, u, alpha, ws);
}

// Adds u to the seed set, lowering delta wherever u is closer, and returns
// the realized marginal influence.
inline double add_seed(const multi_instance_graph& g, residual_state& residual, node_id u, const decay_function& alpha,
                       dijkstra_workspace& ws) {
    detail::check_node(g, u);
    residual.mark_seed(u);
    const node_id n = g.node_count();
    const node_id sources[] = {u};
    double total = 0.0;
    for (instance_id i = 0; i < g.instance_count(); ++i) {
        ws.run(forward_arcs(g[i]), sources, [&](node_id v, double d) {
            const pair_index p = make_pair_index(v, i, n);
            const double delta = residual.delta(p);
            if (d >= delta) {
                return scan_action::prune;
            }
            const double a = alpha(d);
            if (a == 0.0) {
                return scan_action::prune;
            }
            total += a - alpha(delta);
            residual.set_delta(p, d);
            return scan_action::relax;
        }, alpha.support_bound());
    }
    return total / g.instance_count();
}

inline double add_seed(const multi_instance_graph& g, residual_state& residual, node_id u, const decay_function& alpha) {
    dijkstra_workspace ws(g.node_count());
    return add_seed(g, residual, u, alpha, ws);
}

// Exact greedy with lazy (CELF) evaluation. Ties go to the lowest node index.
inline greedy_trace lazy_greedy(const multi_instance_graph& g, const decay_function& alpha, node_id s_max) {
    const node_id n = g.node_count();
    if (s_max > n) {
        throw validation_error("seed count exceeds node count");
    }
    residual_state residual(g);
    dijkstra_workspace ws(n);

    struct candidate {
        double gain;
        node_id node;
        node_id round; // seed count when gain was computed
    };
    auto before = [](const candidate& a, const candidate& b) {
        return a.gain != b.gain ? a.gain < b.gain : a.node > b.node;
    };
    std::priority_queue<candidate, std::vector<candidate>, decltype(before)> queue(before);
    for (node_id u = 0; u < n; ++u) {
        queue.push({marg_gain(g, residual, u, alpha, ws), u, 0});
    }

    greedy_trace trace;
    while (trace.entries.size() < s_max) {
        candidate top = queue.top();
        queue.pop();
        const auto round = static_cast<node_id>(trace.entries.size());
        if (top.round != round) {
            top.gain = marg_gain(g, residual, top.node, alpha, ws);
            top.round = round;
            queue.push(top);
            continue;
        }
        const double gain = add_seed(g, residual, top.node, alpha, ws);
        trace.entries.push_back({top.node, gain, std::nullopt});
    }
    return trace;
}

} // namespace distinf
