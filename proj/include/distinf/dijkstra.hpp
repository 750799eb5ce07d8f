#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "types.hpp"

namespace distinf {

// What a Dijkstra visitor wants done with the node it was just handed.
enum class scan_action {
    relax, // expand the node's arcs
    prune, // settle the node but do not expand it
    halt,  // stop the whole search
};

struct settled_node {
    node_id node;
    double distance;

    friend bool operator==(const settled_node&, const settled_node&) = default;
};

namespace detail {

using heap_item = std::pair<double, node_id>;

// Min-heap on (distance, node); the node id breaks ties deterministically.
struct heap_after {
    bool operator()(const heap_item& a, const heap_item& b) const noexcept { return a > b; }
};

} // namespace detail

// Reusable labels for many short Dijkstra runs over graphs with the same node
// count. Labels are invalidated by bumping an epoch, so a run costs time
// proportional to what it touches rather than to n.
class dijkstra_workspace {
public:
    explicit dijkstra_workspace(node_id n) : distance_(n), stamp_(n, 0), settled_stamp_(n, 0) {}

    node_id node_count() const noexcept { return static_cast<node_id>(distance_.size()); }

    // Multi-source search: every source starts at distance 0. `adjacency(v)`
    // yields the arcs to follow out of v; `visit(v, d)` is called once per
    // settled node in non-decreasing distance order. Tentative distances above
    // `max_distance` are never queued.
    template <typename Adjacency, typename Visit>
    void run(Adjacency&& adjacency, std::span<const node_id> sources, Visit&& visit,
             double max_distance = infinite_distance) {
        next_epoch();
        heap_.clear();
        for (const node_id s : sources) {
            if (!has_label(s)) {
                set_label(s, 0.0);
                heap_.emplace_back(0.0, s);
            }
        }
        std::make_heap(heap_.begin(), heap_.end(), detail::heap_after{});

        while (!heap_.empty()) {
            std::pop_heap(heap_.begin(), heap_.end(), detail::heap_after{});
            const auto [d, v] = heap_.back();
            heap_.pop_back();
            if (settled_stamp_[v] == epoch_ || d > distance_[v]) {
                continue;
            }
            settled_stamp_[v] = epoch_;

            const scan_action action = visit(v, d);
            if (action == scan_action::halt) {
                return;
            }
            if (action == scan_action::prune) {
                continue;
            }
            for (const arc& a : adjacency(v)) {
                const double candidate = d + a.length;
                if (candidate > max_distance || settled_stamp_[a.head] == epoch_) {
                    continue;
                }
                if (!has_label(a.head) || candidate < distance_[a.head]) {
                    set_label(a.head, candidate);
                    heap_.emplace_back(candidate, a.head);
                    std::push_heap(heap_.begin(), heap_.end(), detail::heap_after{});
                }
            }
        }
    }

private:
    void next_epoch() {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            std::fill(settled_stamp_.begin(), settled_stamp_.end(), 0);
            epoch_ = 1;
        }
    }
    bool has_label(node_id v) const noexcept { return stamp_[v] == epoch_; }
    void set_label(node_id v, double d) noexcept {
        stamp_[v] = epoch_;
        distance_[v] = d;
    }

    std::vector<double> distance_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> settled_stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<detail::heap_item> heap_;
};

inline auto forward_arcs(const instance& g) {
    return [&g](node_id v) { return g.out(v); };
}

inline auto reverse_arcs(const instance& g) {
    return [&g](node_id v) { return g.in(v); };
}

// Settled nodes of a single-source search in instance i. A node for which
// `prune(v, d)` is true is reported but not expanded.
template <typename Prune>
std::vector<settled_node> forward_dijkstra(const multi_instance_graph& g, instance_id i, node_id source, Prune&& prune) {
    if (source >= g.node_count()) {
        throw contract_error("source node out of range");
    }
    dijkstra_workspace ws(g.node_count());
    std::vector<settled_node> order;
    const node_id sources[] = {source};
    ws.run(forward_arcs(g.at(i)), sources, [&](node_id v, double d) {
        order.push_back({v, d});
        return prune(v, d) ? scan_action::prune : scan_action::relax;
    });
    return order;
}

inline std::vector<settled_node> forward_dijkstra(const multi_instance_graph& g, instance_id i, node_id source) {
    return forward_dijkstra(g, i, source, [](node_id, double) { return false; });
}

// A single-source search that can stop part way and later continue exactly
// where it left off. The adjacency is supplied on every call, so one cursor
// works on either orientation of an instance; callers must keep it fixed.
//
// next_distance() is the smallest tentative distance not yet settled (0
// before the first step, infinity once the frontier is empty).
class dijkstra_cursor {
public:
    dijkstra_cursor() = default;

    explicit dijkstra_cursor(node_id source) : source_(source), started_(true) {
        frontier_.emplace_back(0.0, source);
        labels_.emplace(source, label{0.0, false});
    }

    node_id source() const noexcept { return source_; }
    double next_distance() const noexcept { return next_distance_; }
    bool terminated() const noexcept { return !started_ || terminated_; }
    std::uint64_t settled_count() const noexcept { return settled_count_; }

    // Drops the frontier and labels; the cursor cannot be resumed afterwards.
    void terminate() noexcept {
        terminated_ = true;
        next_distance_ = infinite_distance;
        frontier_ = {};
        labels_ = {};
    }

    // Settles nodes in non-decreasing distance until `stop(d)` holds for the
    // next frontier distance d, `visit(v, d)` returns false, or the frontier
    // runs dry (which terminates the cursor).
    template <typename Adjacency, typename Stop, typename Visit>
    void resume(Adjacency&& adjacency, Stop&& stop, Visit&& visit) {
        if (terminated()) {
            throw contract_error("resuming a terminated Dijkstra cursor");
        }
        while (true) {
            if (!refresh_next()) {
                return;
            }
            if (stop(next_distance_)) {
                return;
            }
            std::pop_heap(frontier_.begin(), frontier_.end(), detail::heap_after{});
            const auto [d, v] = frontier_.back();
            frontier_.pop_back();
            labels_[v].settled = true;
            ++settled_count_;
            for (const arc& a : adjacency(v)) {
                const double candidate = d + a.length;
                auto [it, inserted] = labels_.try_emplace(a.head, label{candidate, false});
                if (inserted || (!it->second.settled && candidate < it->second.distance)) {
                    it->second.distance = candidate;
                    frontier_.emplace_back(candidate, a.head);
                    std::push_heap(frontier_.begin(), frontier_.end(), detail::heap_after{});
                }
            }
            if (!visit(v, d)) {
                refresh_next();
                return;
            }
        }
    }

private:
    struct label {
        double distance;
        bool settled;
    };

    // Discards stale frontier entries; returns false (and terminates) when
    // nothing is left to settle.
    bool refresh_next() {
        while (!frontier_.empty()) {
            const auto& [d, v] = frontier_.front();
            const auto& l = labels_.at(v);
            if (!l.settled && d <= l.distance) {
                next_distance_ = d;
                return true;
            }
            std::pop_heap(frontier_.begin(), frontier_.end(), detail::heap_after{});
            frontier_.pop_back();
        }
        terminate();
        return false;
    }

    node_id source_ = no_node;
    bool started_ = false;
    bool terminated_ = false;
    double next_distance_ = 0.0;
    std::uint64_t settled_count_ = 0;
    std::vector<detail::heap_item> frontier_;
    std::unordered_map<node_id, label> labels_;
};

} // namespace distinf
