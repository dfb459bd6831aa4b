#pragma once

#include "normgeo/types.hpp"

#include <cstdint>
#include <random>

namespace normgeo {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate (seed, index) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of substream `index` under `seed`. Pure, so any worker can derive
/// any substream without coordination.
constexpr Seed derive_seed(Seed seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index ^ 0x6a09e667f3bcc909ULL));
}

inline Engine substream(Seed seed, std::uint64_t index) {
    return Engine(derive_seed(seed, index));
}

/// Fills `out` with i.i.d. N(0,1) entries from `eng`.
inline void fill_gaussian(Engine& eng, Eigen::Ref<Vector> out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < out.size(); ++i) out[i] = normal(eng);
}

inline Vector gaussian_vector(Seed seed, std::uint64_t index, Index p) {
    Engine eng = substream(seed, index);
    Vector g(p);
    fill_gaussian(eng, g);
    return g;
}

}  // namespace normgeo
