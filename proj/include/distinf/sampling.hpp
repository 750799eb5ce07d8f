#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "random.hpp"

namespace distinf {

enum class length_distribution { unit, file_given, exponential, weibull };

// How per-instance edge lengths are drawn from a base topology.
struct edge_length_model {
    length_distribution kind = length_distribution::exponential;
    double mean = 1.0;        // exponential
    double scale_max = 10.0;  // weibull: per-edge scale drawn from (0, scale_max]
    double shape_max = 10.0;  // weibull: per-edge shape drawn from (0, shape_max]
    std::uint64_t seed = 1;
    // Added to `seed` for the per-instance draws only, so a shifted model
    // draws fresh instances from the same per-edge distributions.
    std::uint64_t draw_offset = 0;

    static edge_length_model unit() { return {length_distribution::unit}; }
    static edge_length_model file_given() { return {length_distribution::file_given}; }
    static edge_length_model exponential(double mean, std::uint64_t seed) {
        return {length_distribution::exponential, mean, 10.0, 10.0, seed};
    }
    static edge_length_model weibull(double scale_max, double shape_max, std::uint64_t seed) {
        return {length_distribution::weibull, 1.0, scale_max, shape_max, seed};
    }

    void validate() const {
        if (kind == length_distribution::exponential && !(mean > 0.0 && std::isfinite(mean))) {
            throw validation_error("exponential mean must be positive");
        }
        if (kind == length_distribution::weibull &&
            !(scale_max > 0.0 && shape_max > 0.0 && std::isfinite(scale_max) && std::isfinite(shape_max))) {
            throw validation_error("weibull parameter ranges must be positive");
        }
    }
};

// Parses "unit", "file", "exp:MEAN" or "weibull:SCALE_MAX:SHAPE_MAX".
inline edge_length_model parse_length_model(std::string_view spec, std::uint64_t seed) {
    auto number = [&](std::string_view text) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(std::string(text), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size() || text.empty()) {
            throw validation_error("bad number in length model '" + std::string(spec) + "'");
        }
        return value;
    };
    edge_length_model model;
    if (spec == "unit") {
        model = edge_length_model::unit();
    } else if (spec == "file") {
        model = edge_length_model::file_given();
    } else if (spec.starts_with("exp:")) {
        model = edge_length_model::exponential(number(spec.substr(4)), seed);
    } else if (spec.starts_with("weibull:")) {
        const auto rest = spec.substr(8);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) {
            throw validation_error("weibull model needs SCALE_MAX:SHAPE_MAX");
        }
        model = edge_length_model::weibull(number(rest.substr(0, colon)), number(rest.substr(colon + 1)), seed);
    } else {
        throw validation_error("unknown length model '" + std::string(spec) + "'");
    }
    model.seed = seed;
    model.validate();
    return model;
}

namespace detail {

// Keeps continuous draws strictly positive; -ln(1) is exactly zero.
inline double positive_length(double x) {
    return x > 0.0 ? x : std::numeric_limits<double>::min();
}

} // namespace detail

// Draws `ell` instances over the topology of `base` (which must hold a single
// instance). Each (edge, instance) length is a pure function of
// (seed, edge index, instance index).
inline multi_instance_graph sample_instances(const multi_instance_graph& base, const edge_length_model& model,
                                             std::uint32_t ell) {
    if (base.instance_count() != 1) {
        throw contract_error("sample_instances expects a single-instance base graph");
    }
    if (ell == 0) {
        throw validation_error("instance count must be at least 1");
    }
    model.validate();

    const instance& topology = base[0];
    const auto arcs = topology.out_arcs();
    const std::size_t m = arcs.size();

    // Weibull parameters are fixed per edge and shared by all instances.
    std::vector<double> scale;
    std::vector<double> shape;
    if (model.kind == length_distribution::weibull) {
        scale.resize(m);
        shape.resize(m);
        for (std::size_t e = 0; e < m; ++e) {
            scale[e] = model.scale_max * unit_interval_open_closed(hash_coords(model.seed, e, ~std::uint64_t{0}));
            shape[e] = model.shape_max * unit_interval_open_closed(hash_coords(model.seed, e, ~std::uint64_t{1}));
        }
    }

    std::vector<instance> instances;
    instances.reserve(ell);
    std::vector<double> lengths(m);
    const std::uint64_t draw_seed = model.seed + model.draw_offset;
    for (std::uint32_t i = 0; i < ell; ++i) {
        for (std::size_t e = 0; e < m; ++e) {
            switch (model.kind) {
            case length_distribution::unit:
                lengths[e] = 1.0;
                break;
            case length_distribution::file_given:
                lengths[e] = arcs[e].length;
                break;
            case length_distribution::exponential: {
                const double x = unit_interval_open_closed(hash_coords(draw_seed, e, i));
                lengths[e] = detail::positive_length(-std::log(x) * model.mean);
                break;
            }
            case length_distribution::weibull: {
                const double x = unit_interval_open_closed(hash_coords(draw_seed, e, i));
                lengths[e] = detail::positive_length(scale[e] * std::pow(-std::log(x), 1.0 / shape[e]));
                break;
            }
            }
        }
        instances.push_back(topology.with_lengths(lengths));
    }
    return {base.node_count(), std::move(instances), base.labels()};
}

// Directed random topology with round(mean_out_degree * n) arcs whose
// endpoints are uniform; duplicates collapse when an instance is built.
inline std::vector<edge> random_digraph(node_id n, double mean_out_degree, std::uint64_t seed) {
    if (n < 2) {
        return {};
    }
    std::mt19937_64 rng(seed);
    std::vector<edge> edges;
    const auto total = static_cast<std::uint64_t>(std::llround(mean_out_degree * n));
    edges.reserve(total);
    for (std::uint64_t e = 0; e < total; ++e) {
        const auto tail = static_cast<node_id>(uniform_below(rng, n));
        auto head = static_cast<node_id>(uniform_below(rng, n - 1));
        if (head >= tail) {
            ++head;
        }
        edges.push_back({tail, head, 1.0});
    }
    return edges;
}

} // namespace distinf
