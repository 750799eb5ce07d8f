#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace distinf {

// Finalizer of splitmix64; a bijective 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based hash of (seed, a, b). Used where a value must depend only on
// its coordinates, not on generation order.
inline constexpr std::uint64_t hash_coords(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

// Uniform value in (0, 1] with 53 random bits.
inline constexpr double unit_interval_open_closed(std::uint64_t bits) noexcept {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) drawn from a 64-bit engine. The standard
// distributions are implementation-defined, which would make outputs differ
// across standard libraries for the same seed.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <typename T>
void shuffle_in_place(std::span<T> values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

template <typename T>
std::vector<T> random_permutation(T count, std::mt19937_64& rng) {
    std::vector<T> perm(count);
    std::iota(perm.begin(), perm.end(), T{0});
    shuffle_in_place(std::span<T>(perm), rng);
    return perm;
}

} // namespace distinf
