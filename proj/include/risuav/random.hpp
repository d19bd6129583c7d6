#pragma once

#include <cstdint>
#include <random>

namespace risuav {

using Rng = std::mt19937_64;

/// Independent stream identifiers. Every random draw in a run comes from
/// Rng(derive_seed(run_seed, stream, index)).
enum class Stream : std::uint64_t {
    stage1_candidates = 1,  // index = route point k, round
    stage2_slot = 2,        // index = global slot index
    direct_link = 3,        // index = global slot index
    path_sampling = 4,
};

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint64_t sub = 0) {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = detail::splitmix64(h ^ index);
    return detail::splitmix64(h ^ sub);
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint64_t sub = 0) {
    return Rng(derive_seed(seed, stream, index, sub));
}

}  // namespace risuav
