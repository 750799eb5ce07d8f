#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace distinf {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

// Parses whitespace-separated "tail head [length]" lines. Blank lines and
// lines starting with '#' or '%' are skipped. Node labels are non-negative
// integers, remapped to dense ids in order of first appearance. Without
// `weighted`, every edge gets length 1 and a third column is ignored.
inline multi_instance_graph read_edge_list(std::istream& in, bool weighted) {
    std::unordered_map<std::uint64_t, node_id> dense;
    std::vector<std::uint64_t> labels;
    std::vector<edge> edges;

    auto intern = [&](std::uint64_t label) {
        auto [it, inserted] = dense.try_emplace(label, static_cast<node_id>(labels.size()));
        if (inserted) {
            labels.push_back(label);
        }
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#' || line[first] == '%') {
            continue;
        }
        std::istringstream fields(line);
        std::string tail_text;
        std::string head_text;
        fields >> tail_text >> head_text;
        auto parse_label = [&](const std::string& text) {
            if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
                throw parse_error(line_no, "expected a non-negative integer node id, got '" + text + "'");
            }
            try {
                return static_cast<std::uint64_t>(std::stoull(text));
            } catch (const std::out_of_range&) {
                throw parse_error(line_no, "node id out of range: '" + text + "'");
            }
        };
        const auto tail_label = parse_label(tail_text);
        const auto head_label = parse_label(head_text);

        double length = 1.0;
        std::string length_text;
        if (fields >> length_text) {
            if (weighted) {
                std::size_t used = 0;
                try {
                    length = std::stod(length_text, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != length_text.size()) {
                    throw parse_error(line_no, "malformed edge length '" + length_text + "'");
                }
                if (!(length > 0.0) || std::isinf(length)) {
                    throw validation_error("line " + std::to_string(line_no) + ": edge length must be positive and finite");
                }
            }
            std::string extra;
            if (fields >> extra) {
                throw parse_error(line_no, "too many columns");
            }
        } else if (weighted) {
            throw parse_error(line_no, "missing edge length");
        }
        const node_id tail = intern(tail_label);
        const node_id head = intern(head_label);
        edges.push_back({tail, head, length});
    }
    const auto n = static_cast<node_id>(labels.size());
    return multi_instance_graph::single(n, edges, std::move(labels));
}

inline multi_instance_graph load_edge_list(const std::string& path, bool weighted) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_edge_list(in, weighted);
}

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void write_pod_vector(std::ostream& out, const std::vector<T>& values) {
    write_pod<std::uint64_t>(out, values.size());
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(T)));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw format_error("truncated binary file");
    }
    return value;
}

template <typename T>
std::vector<T> read_pod_vector(std::istream& in, std::uint64_t max_count) {
    const auto count = read_pod<std::uint64_t>(in);
    if (count > max_count) {
        throw format_error("implausible element count in binary file");
    }
    std::vector<T> values(count);
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)))) {
        throw format_error("truncated binary file");
    }
    return values;
}

} // namespace detail

inline constexpr char graph_magic[4] = {'D', 'I', 'G', 'R'};
inline constexpr std::uint32_t graph_format_version = 1;

// Binary graph cache: magic, version, n, instance count, labels, then each
// instance's forward CSR (offsets, then packed (head u32, pad u32, length f64) arcs).
inline void write_graph_binary(std::ostream& out, const multi_instance_graph& g) {
    out.write(graph_magic, 4);
    detail::write_pod(out, graph_format_version);
    detail::write_pod<std::uint64_t>(out, g.node_count());
    detail::write_pod<std::uint64_t>(out, g.instance_count());
    detail::write_pod_vector(out, g.labels());
    for (const auto& inst : g.instances()) {
        const auto offsets = inst.out_offsets();
        const auto arcs = inst.out_arcs();
        detail::write_pod_vector(out, std::vector<std::uint64_t>(offsets.begin(), offsets.end()));
        detail::write_pod<std::uint64_t>(out, arcs.size());
        for (const auto& a : arcs) {
            detail::write_pod<std::uint32_t>(out, a.head);
            detail::write_pod<std::uint32_t>(out, 0);
            detail::write_pod<double>(out, a.length);
        }
    }
    if (!out) {
        throw std::runtime_error("failed writing graph cache");
    }
}

inline bool has_graph_magic(std::istream& in) {
    char magic[4] = {};
    const auto start = in.tellg();
    in.read(magic, 4);
    const bool ok = in.gcount() == 4 && std::memcmp(magic, graph_magic, 4) == 0;
    in.clear();
    in.seekg(start);
    return ok;
}

inline multi_instance_graph read_graph_binary(std::istream& in) {
    char magic[4] = {};
    if (!in.read(magic, 4) || std::memcmp(magic, graph_magic, 4) != 0) {
        throw format_error("not a graph cache file");
    }
    if (detail::read_pod<std::uint32_t>(in) != graph_format_version) {
        throw format_error("unsupported graph cache version");
    }
    const auto n = detail::read_pod<std::uint64_t>(in);
    const auto ell = detail::read_pod<std::uint64_t>(in);
    if (n >= no_node || ell == 0 || ell > (1u << 20)) {
        throw format_error("implausible graph header");
    }
    auto labels = detail::read_pod_vector<std::uint64_t>(in, n);
    std::vector<instance> instances;
    instances.reserve(ell);
    for (std::uint64_t i = 0; i < ell; ++i) {
        auto offsets = detail::read_pod_vector<std::uint64_t>(in, n + 1);
        const auto m = detail::read_pod<std::uint64_t>(in);
        if (m > (std::uint64_t{1} << 40)) {
            throw format_error("implausible arc count");
        }
        std::vector<arc> arcs(m);
        for (auto& a : arcs) {
            a.head = detail::read_pod<std::uint32_t>(in);
            (void)detail::read_pod<std::uint32_t>(in);
            a.length = detail::read_pod<double>(in);
        }
        instances.push_back(instance::from_csr(static_cast<node_id>(n), std::move(offsets), std::move(arcs)));
    }
    return {static_cast<node_id>(n), std::move(instances), std::move(labels)};
}

inline void save_graph(const std::string& path, const multi_instance_graph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_graph_binary(out, g);
}

// Loads either a binary graph cache or a text edge list.
inline multi_instance_graph load_graph(const std::string& path, bool weighted) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    if (has_graph_magic(in)) {
        return read_graph_binary(in);
    }
    return read_edge_list(in, weighted);
}

} // namespace distinf
