#pragma once

#include <cstdint>
#include <random>

namespace bufq {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t default_seed = 20140601;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent child seed for (master, stream); used to give every trial,
// message and worker its own reproducible stream.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Maps 64 random bits to a double strictly inside (0, 1).
constexpr double open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_open(Rng& rng) { return open_unit(rng()); }

}  // namespace bufq
