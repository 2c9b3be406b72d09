#pragma once

#include <cstdint>
#include <random>

namespace qatsp {

// All randomness in this toolkit flows through std::mt19937_64 seeded
// explicitly; the standard fixes that generator's output sequence, so runs
// are reproducible across platforms as long as doubles are extracted with
// the helpers below rather than std::uniform_real_distribution (whose
// output is implementation-defined).
using rng64 = std::mt19937_64;

// Uniform double in [0,1) built from the top 53 bits of one draw.
inline double uniform_double(rng64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). floor(u*n) with u < 1 never reaches n.
inline std::size_t uniform_index(rng64& g, std::size_t n) {
    return static_cast<std::size_t>(uniform_double(g) * static_cast<double>(n));
}

// splitmix64 step, used to derive independent per-task seeds from a master
// seed (e.g. seed of instance k in an ensemble, or of loop iteration k).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for sub-task `index` of a run with master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

} // namespace qatsp
