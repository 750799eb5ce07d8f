#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "types.hpp"

namespace distinf {

// Structured permutation ranks over node-instance pairs.
//
// There are min(ell, k) blocks of n consecutive ranks. Each node draws a
// random order of the instances and gives its b-th instance a rank in block
// b; within a block the nodes are ranked by an independent random
// permutation. When ell > k the pairs past the first k instances of a node
// stay unranked (rank 0, normalized rank infinity).
class rank_assignment {
public:
    rank_assignment() = default;

    rank_assignment(node_id n, std::uint32_t ell, std::uint32_t k, std::uint64_t seed)
        : n_(n), ell_(ell), k_(k), seed_(seed) {
        if (n == 0 || ell == 0 || k == 0) {
            throw validation_error("rank assignment needs n, ell, k >= 1");
        }
        blocks_ = std::min(ell, k);
        rank_.assign(static_cast<std::size_t>(n) * ell, 0);
        by_rank_.assign(static_cast<std::size_t>(n) * blocks_, 0);

        std::mt19937_64 rng(seed);
        std::vector<instance_id> order(ell);
        std::vector<std::vector<instance_id>> chosen(n);
        for (node_id v = 0; v < n; ++v) {
            for (instance_id i = 0; i < ell; ++i) {
                order[i] = i;
            }
            // Partial Fisher-Yates: the first `blocks_` positions are a
            // uniform selection without replacement, in random order.
            for (std::uint32_t b = 0; b < blocks_; ++b) {
                const auto j = b + static_cast<std::uint32_t>(uniform_below(rng, ell - b));
                std::swap(order[b], order[j]);
            }
            chosen[v].assign(order.begin(), order.begin() + blocks_);
        }
        for (std::uint32_t b = 0; b < blocks_; ++b) {
            const auto perm = random_permutation<node_id>(n, rng);
            for (node_id v = 0; v < n; ++v) {
                const std::uint64_t r = static_cast<std::uint64_t>(b) * n + perm[v] + 1;
                const pair_index p = make_pair_index(v, chosen[v][b], n);
                rank_[p] = r;
                by_rank_[r - 1] = p;
            }
        }
    }

    // Uses caller-chosen integer ranks, indexed by pair. They must be a
    // permutation of 1..n * min(ell, k) plus zeros for unranked pairs.
    static rank_assignment from_ranks(node_id n, std::uint32_t ell, std::uint32_t k, std::vector<std::uint64_t> ranks) {
        if (n == 0 || ell == 0 || k == 0 || ranks.size() != static_cast<std::size_t>(n) * ell) {
            throw validation_error("rank vector does not match n * ell");
        }
        rank_assignment a;
        a.n_ = n;
        a.ell_ = ell;
        a.k_ = k;
        a.blocks_ = std::min(ell, k);
        a.by_rank_.assign(static_cast<std::size_t>(n) * a.blocks_, no_pair);
        for (pair_index p = 0; p < ranks.size(); ++p) {
            const auto r = ranks[p];
            if (r == 0) {
                continue;
            }
            if (r > a.by_rank_.size() || a.by_rank_[r - 1] != no_pair) {
                throw validation_error("ranks are not a permutation");
            }
            a.by_rank_[r - 1] = p;
        }
        if (std::find(a.by_rank_.begin(), a.by_rank_.end(), no_pair) != a.by_rank_.end()) {
            throw validation_error("ranks are not a permutation");
        }
        a.rank_ = std::move(ranks);
        return a;
    }

    node_id node_count() const noexcept { return n_; }
    std::uint32_t instance_count() const noexcept { return ell_; }
    std::uint32_t k() const noexcept { return k_; }
    std::uint32_t blocks() const noexcept { return blocks_; }
    std::uint64_t seed() const noexcept { return seed_; }

    // Number of ranked pairs, n * min(ell, k).
    std::uint64_t ranked_count() const noexcept { return by_rank_.size(); }
    double divisor() const noexcept { return static_cast<double>(n_) * ell_; }

    std::uint64_t rank(node_id v, instance_id i) const noexcept { return rank_[make_pair_index(v, i, n_)]; }
    std::uint64_t rank(pair_index p) const noexcept { return rank_[p]; }
    double normalized(node_id v, instance_id i) const noexcept { return normalize(rank(v, i)); }
    double normalized(pair_index p) const noexcept { return normalize(rank_[p]); }
    double normalize(std::uint64_t r) const noexcept {
        return r == 0 ? infinite_distance : static_cast<double>(r) / divisor();
    }

    // Pair holding integer rank r, for 1 <= r <= ranked_count().
    pair_index pair_of(std::uint64_t r) const { return by_rank_.at(r - 1); }
    const std::vector<pair_index>& pairs_by_rank() const noexcept { return by_rank_; }

    friend bool operator==(const rank_assignment&, const rank_assignment&) = default;

private:
    static constexpr pair_index no_pair = ~pair_index{0};

    node_id n_ = 0;
    std::uint32_t ell_ = 0;
    std::uint32_t k_ = 0;
    std::uint32_t blocks_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<std::uint64_t> rank_;
    std::vector<pair_index> by_rank_;
};

} // namespace distinf
