#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "decay.hpp"
#include "dijkstra.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "ranks.hpp"
#include "types.hpp"

namespace distinf {

// One rank-distance record of a combined all-distances sketch. The pair
// (node, instance) identifies where the rank came from; it also breaks ties
// between equal distances.
struct cads_entry {
    double rank; // normalized
    double distance;
    node_id node;
    instance_id instance;

    friend bool operator==(const cads_entry&, const cads_entry&) = default;
};

// Total order used to decide which pairs are "closer": distance, then node,
// then instance.
inline bool entry_before(const cads_entry& a, const cads_entry& b) noexcept {
    if (a.distance != b.distance) {
        return a.distance < b.distance;
    }
    if (a.node != b.node) {
        return a.node < b.node;
    }
    return a.instance < b.instance;
}

using cads = std::vector<cads_entry>;

namespace detail {

struct entry_key {
    double distance;
    node_id node;
    instance_id instance;

    friend auto operator<=>(const entry_key&, const entry_key&) = default;
};

// The k smallest ranks seen so far, largest on top.
class bottom_k_ranks {
public:
    explicit bottom_k_ranks(std::uint32_t k) : k_(k) {}

    bool full() const noexcept { return heap_.size() >= k_; }
    // k-th smallest rank, or 1 (the top of the rank domain) if fewer than k.
    double threshold() const noexcept { return full() ? heap_.top() : 1.0; }
    bool admits(double r) const noexcept { return !full() || r < heap_.top(); }
    void insert(double r) {
        heap_.push(r);
        if (heap_.size() > k_) {
            heap_.pop();
        }
    }

private:
    std::uint32_t k_;
    std::priority_queue<double> heap_;
};

inline void check_k(std::uint32_t k) {
    if (k == 0) {
        throw validation_error("sketch parameter k must be at least 1");
    }
}

} // namespace detail

// Single-instance all-distances sketches of every node: (u, d_vu) is kept in
// ADS(v) iff u's rank is below the k-th smallest rank of pairs closer to v.
// Built by reverse Dijkstras from the ranked nodes of instance i in
// increasing rank order, pruned at nodes that already hold k closer entries.
inline std::vector<cads> build_ads_instance(const multi_instance_graph& g, instance_id i, const rank_assignment& ranks,
                                            std::uint32_t k) {
    detail::check_k(k);
    const node_id n = g.node_count();
    if (ranks.node_count() != n || i >= ranks.instance_count() || i >= g.instance_count()) {
        throw contract_error("rank assignment does not cover the instance");
    }
    std::vector<cads> lists(n);
    // Per node, the k smallest keys among its entries as a max-heap in a
    // fixed slot of k keys.
    std::vector<detail::entry_key> closest(static_cast<std::size_t>(n) * k);
    std::vector<std::uint32_t> closest_size(n, 0);
    dijkstra_workspace ws(n);
    const auto& transpose = g[i];

    for (const pair_index p : ranks.pairs_by_rank()) {
        const auto [u, inst] = split_pair_index(p, n);
        if (inst != i) {
            continue;
        }
        const double r = ranks.normalized(p);
        const node_id sources[] = {u};
        ws.run(reverse_arcs(transpose), sources, [&](node_id v, double d) {
            const detail::entry_key key{d, u, i};
            const auto heap = closest.begin() + static_cast<std::ptrdiff_t>(v) * k;
            auto& size = closest_size[v];
            if (size == k) {
                if (heap[0] < key) {
                    return scan_action::prune;
                }
                std::pop_heap(heap, heap + k);
                heap[k - 1] = key;
                std::push_heap(heap, heap + k);
            } else {
                heap[size++] = key;
                std::push_heap(heap, heap + size);
            }
            lists[v].push_back({r, d, u, i});
            return scan_action::relax;
        });
    }
    for (auto& list : lists) {
        std::sort(list.begin(), list.end(), entry_before);
    }
    return lists;
}

namespace detail {

// Shared tail of merge and union: keeps the k smallest-rank distance-0
// entries, then every positive entry whose rank is below the k-th smallest
// rank of the kept entries before it.
inline cads sweep_sorted(const std::vector<cads_entry>& all, std::uint32_t k) {
    const auto first_positive =
        std::find_if(all.begin(), all.end(), [](const cads_entry& e) { return e.distance > 0.0; });

    std::vector<cads_entry> zero(all.begin(), first_positive);
    if (zero.size() > k) {
        std::nth_element(zero.begin(), zero.begin() + k, zero.end(),
                         [](const cads_entry& a, const cads_entry& b) { return a.rank < b.rank; });
        zero.resize(k);
        std::sort(zero.begin(), zero.end(), entry_before);
    }

    bottom_k_ranks kept(k);
    cads result = zero;
    for (const auto& e : zero) {
        kept.insert(e.rank);
    }
    for (auto it = first_positive; it != all.end(); ++it) {
        if (kept.admits(it->rank)) {
            result.push_back(*it);
            kept.insert(it->rank);
        }
    }
    return result;
}

inline cads sweep_cads(std::vector<cads_entry> all, std::uint32_t k) {
    std::sort(all.begin(), all.end(), entry_before);
    return sweep_sorted(all, k);
}

// Keeps one record per (node, instance), the one with the smallest distance.
inline void keep_closest_per_pair(std::vector<cads_entry>& all) {
    std::sort(all.begin(), all.end(), [](const cads_entry& a, const cads_entry& b) {
        if (a.node != b.node) {
            return a.node < b.node;
        }
        if (a.instance != b.instance) {
            return a.instance < b.instance;
        }
        return a.distance < b.distance;
    });
    all.erase(std::unique(all.begin(), all.end(),
                          [](const cads_entry& a, const cads_entry& b) {
                              return a.node == b.node && a.instance == b.instance;
                          }),
              all.end());
}

inline void check_sorted(std::span<const cads_entry> list) {
    for (std::size_t j = 1; j < list.size(); ++j) {
        if (list[j].distance < list[j - 1].distance) {
            throw contract_error("sketch entries must be sorted by distance");
        }
    }
}

} // namespace detail

// Combines sketches of one node (per-instance ADSs, or partial combined
// sketches) into its combined sketch. The result does not depend on the
// order or grouping of the inputs.
inline cads merge_cads(std::span<const cads> lists, std::uint32_t k) {
    detail::check_k(k);
    std::vector<cads_entry> all;
    for (const auto& list : lists) {
        detail::check_sorted(list);
        all.insert(all.end(), list.begin(), list.end());
    }
    detail::keep_closest_per_pair(all);
    return detail::sweep_cads(std::move(all), k);
}

// Sketch of distances from the set S given the sketches of its members.
// Pairs of seed nodes are at distance 0 from S, so their positive-distance
// records from other seeds are dropped.
inline cads union_cads(std::span<const cads* const> sketches, std::span<const node_id> seeds, std::uint32_t k) {
    detail::check_k(k);
    std::vector<cads_entry> all;
    for (const cads* sk : sketches) {
        detail::check_sorted(*sk);
        all.insert(all.end(), sk->begin(), sk->end());
    }
    std::vector<node_id> sorted_seeds(seeds.begin(), seeds.end());
    std::sort(sorted_seeds.begin(), sorted_seeds.end());
    std::erase_if(all, [&](const cads_entry& e) {
        return e.distance > 0.0 && std::binary_search(sorted_seeds.begin(), sorted_seeds.end(), e.node);
    });
    detail::keep_closest_per_pair(all);
    return detail::sweep_cads(std::move(all), k);
}

// HIP threshold tau(x): the k-th smallest rank among entries at distance
// below x, or 1 when there are fewer than k of them.
inline double hip_threshold(std::span<const cads_entry> sketch, double x, std::uint32_t k) {
    detail::check_k(k);
    if (!(x > 0.0)) {
        throw validation_error("HIP threshold needs a positive distance");
    }
    detail::bottom_k_ranks kept(k);
    for (const auto& e : sketch) {
        if (!(e.distance < x)) {
            break;
        }
        kept.insert(e.rank);
    }
    return kept.threshold();
}

// HIP estimate of the influence of a set from its (union) sketch:
// |S| alpha(0) + (1/ell) sum over positive entries of alpha(d) / tau, where
// tau is the k-th smallest rank among entries ordered before the entry.
//
// Ranks drawn without replacement from a grid of step `rank_unit` make the
// chance of falling below a k-th smallest rank tau equal to tau - rank_unit
// rather than tau, so that is the probability divided by. With
// rank_unit = 0 the ranks are treated as continuous.
inline double estimate_from_cads(std::span<const cads_entry> sketch, std::size_t seed_count, const decay_function& alpha,
                                 std::uint32_t k, std::uint32_t ell, double rank_unit = 0.0) {
    detail::check_k(k);
    detail::bottom_k_ranks kept(k);
    double sum = 0.0;
    for (const auto& e : sketch) {
        if (e.distance > 0.0) {
            const double a = alpha(e.distance);
            if (a == 0.0) {
                break;
            }
            sum += a / (kept.full() ? kept.threshold() - rank_unit : 1.0);
        }
        kept.insert(e.rank);
    }
    return static_cast<double>(seed_count) * alpha.alpha0() + sum / ell;
}

inline constexpr char cads_magic[4] = {'D', 'C', 'A', 'D'};
inline constexpr std::uint32_t cads_format_version = 1;

// Combined all-distances sketches of every node plus the ranks they were
// built with. Answers influence queries for any decay function.
class cads_oracle {
public:
    static cads_oracle build(const multi_instance_graph& g, std::uint32_t k, std::uint64_t seed) {
        detail::check_k(k);
        cads_oracle oracle;
        oracle.k_ = k;
        oracle.ranks_ = rank_assignment(g.node_count(), g.instance_count(), k, seed);
        oracle.sketches_.assign(g.node_count(), {});
        for (instance_id i = 0; i < g.instance_count(); ++i) {
            auto lists = build_ads_instance(g, i, oracle.ranks_, k);
            cads merged;
            for (node_id v = 0; v < g.node_count(); ++v) {
                auto& sketch = oracle.sketches_[v];
                if (sketch.empty()) {
                    sketch = std::move(lists[v]);
                    continue;
                }
                // Instances never share a pair, so a plain sorted merge
                // replaces the general merge_cads.
                merged.clear();
                std::merge(sketch.begin(), sketch.end(), lists[v].begin(), lists[v].end(), std::back_inserter(merged),
                           entry_before);
                sketch = detail::sweep_sorted(merged, k);
            }
        }
        return oracle;
    }

    node_id node_count() const noexcept { return ranks_.node_count(); }
    std::uint32_t instance_count() const noexcept { return ranks_.instance_count(); }
    std::uint32_t k() const noexcept { return k_; }
    std::uint64_t seed() const noexcept { return ranks_.seed(); }
    const rank_assignment& ranks() const noexcept { return ranks_; }

    const cads& sketch(node_id v) const {
        if (v >= sketches_.size()) {
            throw validation_error("no sketch for node " + std::to_string(v));
        }
        return sketches_[v];
    }

    double mean_sketch_size() const {
        std::size_t total = 0;
        for (const auto& s : sketches_) {
            total += s.size();
        }
        return sketches_.empty() ? 0.0 : static_cast<double>(total) / sketches_.size();
    }

    double estimate(std::span<const node_id> seeds, const decay_function& alpha) const {
        if (seeds.empty()) {
            return 0.0;
        }
        std::vector<node_id> unique(seeds.begin(), seeds.end());
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        if (unique.size() == 1) {
            return estimate_from_cads(sketch(unique[0]), 1, alpha, k_, instance_count(), 1.0 / ranks_.divisor());
        }
        std::vector<const cads*> parts;
        parts.reserve(unique.size());
        for (const node_id s : unique) {
            parts.push_back(&sketch(s));
        }
        const cads merged = union_cads(parts, unique, k_);
        return estimate_from_cads(merged, unique.size(), alpha, k_, instance_count(), 1.0 / ranks_.divisor());
    }

    // Header (n, ell, k, rank seed), then per node a count followed by
    // (integer rank, distance) records. Node and instance of each record are
    // recovered on load by regenerating the ranks.
    void write(std::ostream& out) const {
        out.write(cads_magic, 4);
        detail::write_pod(out, cads_format_version);
        detail::write_pod<std::uint64_t>(out, node_count());
        detail::write_pod<std::uint32_t>(out, instance_count());
        detail::write_pod<std::uint32_t>(out, k_);
        detail::write_pod<std::uint64_t>(out, seed());
        for (const auto& s : sketches_) {
            detail::write_pod<std::uint64_t>(out, s.size());
            for (const auto& e : s) {
                detail::write_pod<std::uint64_t>(out, ranks_.rank(e.node, e.instance));
                detail::write_pod<double>(out, e.distance);
            }
        }
        if (!out) {
            throw std::runtime_error("failed writing sketch file");
        }
    }

    static cads_oracle read(std::istream& in) {
        char magic[4] = {};
        if (!in.read(magic, 4) || std::memcmp(magic, cads_magic, 4) != 0) {
            throw format_error("not a sketch file");
        }
        if (detail::read_pod<std::uint32_t>(in) != cads_format_version) {
            throw format_error("unsupported sketch file version");
        }
        const auto n = detail::read_pod<std::uint64_t>(in);
        const auto ell = detail::read_pod<std::uint32_t>(in);
        const auto k = detail::read_pod<std::uint32_t>(in);
        const auto seed = detail::read_pod<std::uint64_t>(in);
        if (n == 0 || n >= no_node || ell == 0 || k == 0) {
            throw format_error("implausible sketch header");
        }
        cads_oracle oracle;
        oracle.k_ = k;
        oracle.ranks_ = rank_assignment(static_cast<node_id>(n), ell, k, seed);
        oracle.sketches_.resize(n);
        for (auto& s : oracle.sketches_) {
            const auto count = detail::read_pod<std::uint64_t>(in);
            if (count > oracle.ranks_.ranked_count()) {
                throw format_error("implausible sketch size");
            }
            s.reserve(count);
            for (std::uint64_t j = 0; j < count; ++j) {
                const auto r = detail::read_pod<std::uint64_t>(in);
                const auto d = detail::read_pod<double>(in);
                if (r == 0 || r > oracle.ranks_.ranked_count() || !(d >= 0.0)) {
                    throw format_error("invalid sketch record");
                }
                const auto [v, i] = split_pair_index(oracle.ranks_.pair_of(r), static_cast<node_id>(n));
                s.push_back({oracle.ranks_.normalize(r), d, v, i});
            }
        }
        return oracle;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot open " + path + " for writing");
        }
        write(out);
    }

    static cads_oracle load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw std::runtime_error("cannot open " + path);
        }
        return read(in);
    }

    friend bool operator==(const cads_oracle& a, const cads_oracle& b) {
        return a.k_ == b.k_ && a.ranks_ == b.ranks_ && a.sketches_ == b.sketches_;
    }

private:
    std::uint32_t k_ = 0;
    rank_assignment ranks_;
    std::vector<cads> sketches_;
};

} // namespace distinf
