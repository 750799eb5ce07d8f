#pragma once

#include <cstdint>
#include <limits>

namespace distinf {

using node_id = std::uint32_t;
using instance_id = std::uint32_t;
// Dense index of a node-instance pair: instance * n + node.
using pair_index = std::uint64_t;

inline constexpr double infinite_distance = std::numeric_limits<double>::infinity();
inline constexpr node_id no_node = std::numeric_limits<node_id>::max();

struct node_instance {
    node_id node;
    instance_id instance;

    friend bool operator==(const node_instance&, const node_instance&) = default;
};

inline constexpr pair_index make_pair_index(node_id v, instance_id i, node_id n) noexcept {
    return static_cast<pair_index>(i) * n + v;
}

inline constexpr node_instance split_pair_index(pair_index p, node_id n) noexcept {
    return {static_cast<node_id>(p % n), static_cast<instance_id>(p / n)};
}

} // namespace distinf
