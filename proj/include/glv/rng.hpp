#pragma once

// Deterministic sampling. std::mt19937_64 is fully specified by the standard,
// and the integer-to-double mapping below is fixed here, so identical
// (n, seed, lo, hi) produce identical bytes on every platform. The standard
// distributions are NOT specified and must not be used for anything that ends
// up in a report.

#include <cstdint>
#include <random>

#include "glv/errors.hpp"
#include "glv/linalg.hpp"

namespace glv {

// Uniform double in [0, 1) from the top 53 bits of the generator word.
inline double unit_double(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// Uniform state in [lo, hi)^n.
inline Vec random_state(int n, std::uint64_t seed, double lo, double hi) {
    if (!(lo < hi)) throw BadRange(lo, hi);
    std::mt19937_64 gen(seed);
    Vec x(static_cast<std::size_t>(n));
    for (auto& c : x) c = lo + (hi - lo) * unit_double(gen());
    return x;
}

// Mixes a stream of labels into a fresh seed (splitmix64 finalizer). Used to
// give every (check, pattern, point) its own reproducible substream.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t z = base;
    for (std::uint64_t l : labels) {
        z += 0x9e3779b97f4a7c15ULL + l;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
    }
    return z;
}

} // namespace glv
