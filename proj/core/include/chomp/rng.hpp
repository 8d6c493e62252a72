#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chomp {

// splitmix64, used to derive independent module seeds from the one
// user-facing --seed value.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = seed;
    for (char c : tag) h = splitmix64(h ^ static_cast<std::uint8_t>(c));
    return splitmix64(h);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::string_view tag) {
    return Rng(derive_seed(seed, tag));
}

}  // namespace chomp
