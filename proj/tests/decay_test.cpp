#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"

using namespace distinf;

TEST(Decay, Threshold) {
    const auto a = decay_function::threshold(1.5);
    EXPECT_EQ(a(1.0), 1.0);
    EXPECT_EQ(a(2.0), 0.0);
    EXPECT_EQ(a(1.5), 1.0);
    EXPECT_EQ(a(oracle::inf), 0.0);
    EXPECT_EQ(a.support_bound(), 1.5);
}

TEST(Decay, Exponential) {
    const auto a = decay_function::exponential(10.0);
    EXPECT_EQ(a(0.0), 1.0);
    EXPECT_NEAR(a(0.1), 0.3678794, 1e-7);
    EXPECT_EQ(a(oracle::inf), 0.0);
    EXPECT_EQ(a.support_bound(), oracle::inf);
}

TEST(Decay, Harmonic) {
    EXPECT_EQ(decay_function::harmonic(10.0)(0.0), 1.0);
    EXPECT_DOUBLE_EQ(decay_function::harmonic(10.0)(0.1), 0.5);
    EXPECT_EQ(decay_function::harmonic(1.0)(1.0), 0.5);
    EXPECT_EQ(decay_function::harmonic(1.0)(oracle::inf), 0.0);
}

TEST(Decay, RejectsNonPositiveParameters) {
    EXPECT_THROW(decay_function::threshold(0.0), validation_error);
    EXPECT_THROW(decay_function::exponential(-1.0), validation_error);
    EXPECT_THROW(decay_function::harmonic(0.0), validation_error);
}

TEST(Decay, Truncation) {
    const auto e = decay_function::exponential(2.0).truncated(0.01);
    const double bound = e.support_bound();
    EXPECT_NEAR(bound, std::log(100.0) / 2.0, 1e-12);
    EXPECT_GT(e(bound * 0.999), 0.0);
    EXPECT_EQ(e(bound * 1.001), 0.0);
    const auto h = decay_function::harmonic(1.0).truncated(0.1);
    EXPECT_NEAR(h.support_bound(), 9.0, 1e-12);
    EXPECT_GT(h(8.9), 0.0);
    EXPECT_EQ(h(9.1), 0.0);
}

TEST(Decay, MonotoneFuzz) {
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> dist(0.5);
    const decay_function fs[] = {decay_function::threshold(1.3), decay_function::exponential(10.0),
                                 decay_function::harmonic(10.0), decay_function::exponential(1.0).truncated(0.05)};
    for (const auto& f : fs) {
        for (int t = 0; t < 10000; ++t) {
            double d1 = dist(rng);
            double d2 = dist(rng);
            if (d1 > d2) {
                std::swap(d1, d2);
            }
            EXPECT_GE(f(d1), f(d2));
            EXPECT_LE(f(d1), f.alpha0());
            if (d2 > f.support_bound()) {
                EXPECT_EQ(f(d2), 0.0);
            }
        }
    }
}

TEST(Decay, SpecStrings) {
    EXPECT_EQ(parse_decay("threshold:1.5").kind(), decay_kind::threshold);
    EXPECT_EQ(parse_decay("exp:10").parameter(), 10.0);
    EXPECT_EQ(parse_decay("harmonic:10").kind(), decay_kind::harmonic);
    EXPECT_EQ(parse_decay("harmonic:2.5").to_string(), "harmonic:2.5");
    EXPECT_THROW(parse_decay("gauss:1"), validation_error);
    EXPECT_THROW(parse_decay("exp"), validation_error);
    EXPECT_THROW(parse_decay("exp:x"), validation_error);
    EXPECT_THROW(parse_decay("threshold:-2"), validation_error);
}
