#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace debrisense {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: the result depends only on the master seed
/// and the ordered key, never on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> key)
{
    std::uint64_t h = mix64(master);
    for (std::uint64_t k : key) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

/// Circular complex normal with E|w|^2 = variance.
inline std::complex<double> complex_normal(Rng& rng, double variance = 1.0)
{
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

}  // namespace debrisense
