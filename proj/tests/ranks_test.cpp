#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "support/oracles.hpp"

using namespace distinf;

TEST(Ranks, SingleBlockIsPermutation) {
    const rank_assignment r(3, 1, 2, 5);
    std::vector<std::uint64_t> got = {r.rank(0, 0), r.rank(1, 0), r.rank(2, 0)};
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<std::uint64_t>{1, 2, 3}));
    EXPECT_EQ(r.blocks(), 1u);
}

TEST(Ranks, BlocksArePermutationsOfNodes) {
    const rank_assignment r(2, 3, 2, 9);
    EXPECT_EQ(r.ranked_count(), 4u);
    std::set<std::uint64_t> block0;
    std::set<std::uint64_t> block1;
    for (node_id v = 0; v < 2; ++v) {
        std::size_t ranked = 0;
        for (instance_id i = 0; i < 3; ++i) {
            const auto x = r.rank(v, i);
            if (x == 0) {
                EXPECT_EQ(r.normalized(v, i), oracle::inf);
                continue;
            }
            ++ranked;
            (x <= 2 ? block0 : block1).insert(x);
            EXPECT_EQ(r.pair_of(x), make_pair_index(v, i, 2));
            EXPECT_DOUBLE_EQ(r.normalized(v, i), x / 6.0);
        }
        EXPECT_EQ(ranked, 2u);
    }
    EXPECT_EQ(block0, (std::set<std::uint64_t>{1, 2}));
    EXPECT_EQ(block1, (std::set<std::uint64_t>{3, 4}));
}

TEST(Ranks, Deterministic) {
    EXPECT_EQ(rank_assignment(50, 8, 4, 1), rank_assignment(50, 8, 4, 1));
    EXPECT_FALSE(rank_assignment(50, 8, 4, 1) == rank_assignment(50, 8, 4, 2));
}

TEST(Ranks, EachNodeDrawsInstancesUniformly) {
    // With ell = 4 and k = 1 each node ranks exactly one instance, chosen
    // uniformly; check the empirical frequencies.
    std::vector<int> hits(4, 0);
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        const rank_assignment r(1, 4, 1, 100 + t);
        for (instance_id i = 0; i < 4; ++i) {
            hits[i] += r.rank(0, i) != 0;
        }
    }
    for (const int h : hits) {
        EXPECT_NEAR(h / double(trials), 0.25, 0.03);
    }
}

TEST(Ranks, ExplicitRanksValidated) {
    const auto r = rank_assignment::from_ranks(3, 1, 3, {2, 1, 3});
    EXPECT_EQ(r.pair_of(1), 1u);
    EXPECT_THROW(rank_assignment::from_ranks(3, 1, 3, {2, 2, 3}), validation_error);
    EXPECT_THROW(rank_assignment::from_ranks(3, 1, 3, {2, 1}), validation_error);
    EXPECT_THROW(rank_assignment(0, 1, 1, 1), validation_error);
}
