#pragma once

#include <cstdint>
#include <random>

namespace supercoh {

// splitmix64 step; used to whiten user seeds and derive independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream key for (base_seed, realization, role). Realization r of a sweep uses
// base ^ r, then the whole tuple is whitened so nearby seeds give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t realization = 0,
                                 std::uint64_t role = 0) {
    std::uint64_t s = (base ^ realization) + 0x632be59bd9b4e019ULL * (role + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

// Uniform double in the open interval (0,1); safe to feed through quantile functions.
inline double uniform01(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace supercoh
