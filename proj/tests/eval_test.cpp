#include <gtest/gtest.h>

#include <numeric>
#include <sstream>
#include <vector>

#include "support/oracles.hpp"

using namespace distinf;

TEST(Eval, HeldOutPathExample) {
    const node_id seeds[] = {0};
    const auto rows =
        evaluate_held_out(oracle::graph_a(), edge_length_model::unit(), seeds, decay_function::threshold(1.5), 4);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].influence, 2.0);
    std::ostringstream out;
    write_prefix_csv(out, rows);
    EXPECT_EQ(out.str(), "prefix,influence,influence_pct\n1,2,66.67\n");
}

TEST(Eval, EmptyAndFullPrefixes) {
    const auto g = oracle::random_graph(20, 2.0, 2, 4);
    EXPECT_TRUE(prefix_influences(g, {}, decay_function::harmonic(1.0)).empty());
    std::vector<node_id> all(20);
    std::iota(all.begin(), all.end(), 0);
    const auto rows = prefix_influences(g, all, decay_function::harmonic(1.0));
    EXPECT_NEAR(rows.back().influence_pct, 100.0, 1e-9);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const std::vector<node_id> prefix(all.begin(), all.begin() + j + 1);
        EXPECT_NEAR(rows[j].influence, oracle::influence(g, prefix, decay_function::harmonic(1.0)), 1e-9);
    }
}

TEST(Eval, HeldOutUsesFreshInstances) {
    const auto base = oracle::graph_a();
    const auto model = edge_length_model::exponential(1.0, 5);
    const auto training = sample_instances(base, model, 3);
    const auto held_out = sample_instances(base, edge_length_model::exponential(1.0, 6), 3);
    EXPECT_FALSE(training == held_out);
    const node_id seeds[] = {0};
    const auto rows = evaluate_held_out(base, model, seeds, decay_function::harmonic(1.0), 3);
    EXPECT_NEAR(rows[0].influence, influence_exact(held_out, seeds, decay_function::harmonic(1.0)), 1e-12);
}

TEST(Eval, RejectsBadSeedLists) {
    const node_id dup[] = {0, 0};
    EXPECT_THROW(prefix_influences(oracle::graph_a(), dup, decay_function::harmonic(1.0)), validation_error);
    const node_id unknown[] = {3};
    EXPECT_THROW(prefix_influences(oracle::graph_a(), unknown, decay_function::harmonic(1.0)), validation_error);
}
