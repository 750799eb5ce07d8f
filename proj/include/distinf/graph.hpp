#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace distinf {

struct edge {
    node_id tail;
    node_id head;
    double length;
};

// One adjacency entry. In the transpose view `head` is the original tail.
struct arc {
    node_id head;
    double length;

    friend bool operator==(const arc&, const arc&) = default;
};

// A single weighted directed graph stored as forward and transpose CSR.
//
// Parallel edges collapse to the shortest one and self-loops are dropped;
// neither changes any shortest-path distance.
class instance {
public:
    instance() = default;

    static instance from_edges(node_id n, std::span<const edge> edges) {
        for (const auto& e : edges) {
            if (e.tail >= n || e.head >= n) {
                throw validation_error("edge endpoint out of range");
            }
            if (!(e.length > 0.0) || std::isnan(e.length)) {
                throw validation_error("edge length must be positive");
            }
        }

        instance g;
        g.n_ = n;
        g.out_offsets_ = bucket_offsets(n, edges, [](const edge& e) { return e.tail; });
        g.out_arcs_.resize(g.out_offsets_.back());
        {
            auto cursor = g.out_offsets_;
            for (const auto& e : edges) {
                if (e.tail != e.head) {
                    g.out_arcs_[cursor[e.tail]++] = arc{e.head, e.length};
                }
            }
        }
        g.compact_out();
        g.build_transpose();
        return g;
    }

    // Rebuilds an instance from its forward CSR arrays as returned by
    // out_offsets()/out_arcs().
    static instance from_csr(node_id n, std::vector<std::uint64_t> offsets, std::vector<arc> arcs) {
        if (offsets.size() != static_cast<std::size_t>(n) + 1 || offsets.front() != 0 ||
            offsets.back() != arcs.size() || !std::is_sorted(offsets.begin(), offsets.end())) {
            throw format_error("inconsistent CSR offsets");
        }
        for (const auto& a : arcs) {
            if (a.head >= n || !(a.length > 0.0)) {
                throw format_error("invalid arc in CSR data");
            }
        }
        instance g;
        g.n_ = n;
        g.out_offsets_ = std::move(offsets);
        g.out_arcs_ = std::move(arcs);
        g.build_transpose();
        return g;
    }

    node_id node_count() const noexcept { return n_; }
    std::size_t arc_count() const noexcept { return out_arcs_.size(); }

    std::span<const arc> out(node_id v) const noexcept {
        return {out_arcs_.data() + out_offsets_[v], out_arcs_.data() + out_offsets_[v + 1]};
    }
    std::span<const arc> in(node_id v) const noexcept {
        return {in_arcs_.data() + in_offsets_[v], in_arcs_.data() + in_offsets_[v + 1]};
    }

    // Arc storage in forward CSR order; the position of an arc here is its
    // stable edge index.
    std::span<const std::uint64_t> out_offsets() const noexcept { return out_offsets_; }
    std::span<const arc> out_arcs() const noexcept { return out_arcs_; }

    // Same topology with new lengths, given per forward arc index.
    instance with_lengths(std::span<const double> lengths) const {
        if (lengths.size() != out_arcs_.size()) {
            throw contract_error("length vector does not match arc count");
        }
        instance g = *this;
        for (std::size_t a = 0; a < lengths.size(); ++a) {
            if (!(lengths[a] > 0.0)) {
                throw validation_error("edge length must be positive");
            }
            g.out_arcs_[a].length = lengths[a];
        }
        g.build_transpose();
        return g;
    }

    std::vector<edge> edges() const {
        std::vector<edge> result;
        result.reserve(out_arcs_.size());
        for (node_id v = 0; v < n_; ++v) {
            for (const auto& a : out(v)) {
                result.push_back({v, a.head, a.length});
            }
        }
        return result;
    }

    friend bool operator==(const instance& a, const instance& b) {
        return a.n_ == b.n_ && a.out_offsets_ == b.out_offsets_ && a.out_arcs_ == b.out_arcs_;
    }

private:
    template <typename Key>
    static std::vector<std::uint64_t> bucket_offsets(node_id n, std::span<const edge> edges, Key key) {
        std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
        for (const auto& e : edges) {
            if (e.tail != e.head) {
                ++offsets[key(e) + 1];
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            offsets[v + 1] += offsets[v];
        }
        return offsets;
    }

    // Sorts each adjacency by head and keeps the shortest of parallel arcs.
    void compact_out() {
        std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n_) + 1, 0);
        std::size_t write = 0;
        for (node_id v = 0; v < n_; ++v) {
            auto first = out_arcs_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[v]);
            auto last = out_arcs_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[v + 1]);
            std::sort(first, last, [](const arc& a, const arc& b) {
                return a.head != b.head ? a.head < b.head : a.length < b.length;
            });
            node_id previous = no_node;
            for (auto it = first; it != last; ++it) {
                if (it->head != previous) {
                    out_arcs_[write++] = *it;
                    previous = it->head;
                }
            }
            offsets[v + 1] = write;
        }
        out_arcs_.resize(write);
        out_arcs_.shrink_to_fit();
        out_offsets_ = std::move(offsets);
    }

    void build_transpose() {
        in_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (const auto& a : out_arcs_) {
            ++in_offsets_[a.head + 1];
        }
        for (std::size_t v = 0; v < n_; ++v) {
            in_offsets_[v + 1] += in_offsets_[v];
        }
        in_arcs_.resize(out_arcs_.size());
        auto cursor = in_offsets_;
        for (node_id v = 0; v < n_; ++v) {
            for (const auto& a : out(v)) {
                in_arcs_[cursor[a.head]++] = arc{v, a.length};
            }
        }
    }

    node_id n_ = 0;
    std::vector<std::uint64_t> out_offsets_{0};
    std::vector<arc> out_arcs_;
    std::vector<std::uint64_t> in_offsets_{0};
    std::vector<arc> in_arcs_;
};

// A set of instances over a shared node set.
class multi_instance_graph {
public:
    multi_instance_graph() = default;

    multi_instance_graph(node_id n, std::vector<instance> instances, std::vector<std::uint64_t> labels = {})
        : n_(n), instances_(std::move(instances)), labels_(std::move(labels)) {
        if (instances_.empty()) {
            throw validation_error("a multi-instance graph needs at least one instance");
        }
        for (const auto& g : instances_) {
            if (g.node_count() != n_) {
                throw validation_error("all instances must share the node set");
            }
        }
        if (!labels_.empty() && labels_.size() != n_) {
            throw validation_error("label count must equal node count");
        }
    }

    static multi_instance_graph single(node_id n, std::span<const edge> edges, std::vector<std::uint64_t> labels = {}) {
        std::vector<instance> one;
        one.push_back(instance::from_edges(n, edges));
        return {n, std::move(one), std::move(labels)};
    }

    node_id node_count() const noexcept { return n_; }
    std::uint32_t instance_count() const noexcept { return static_cast<std::uint32_t>(instances_.size()); }
    pair_index pair_count() const noexcept { return static_cast<pair_index>(n_) * instances_.size(); }

    const instance& at(instance_id i) const { return instances_.at(i); }
    const instance& operator[](instance_id i) const noexcept { return instances_[i]; }
    std::span<const instance> instances() const noexcept { return instances_; }

    // Original identifiers of the dense nodes; identity when empty.
    std::uint64_t label(node_id v) const { return labels_.empty() ? v : labels_[v]; }
    const std::vector<std::uint64_t>& labels() const noexcept { return labels_; }

    friend bool operator==(const multi_instance_graph&, const multi_instance_graph&) = default;

private:
    node_id n_ = 0;
    std::vector<instance> instances_;
    std::vector<std::uint64_t> labels_;
};

} // namespace distinf
