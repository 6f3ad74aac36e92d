#ifndef BIASIM_RNG_HPP
#define BIASIM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

// Counter-based keyed randomness. Every draw is a pure function of a 64-bit
// key, so lookups are order-independent and identical for any worker count.

namespace biasim::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Fold one more word into a key.
inline constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t word) {
    return splitmix64(key ^ splitmix64(word));
}

// Domain-separation tags so distinct random streams never collide.
inline constexpr std::uint64_t kChannelStream = 0x634841ULL;   // block fading coefficients
inline constexpr std::uint64_t kNoiseStream = 0x4E4F49ULL;     // receiver AWGN
inline constexpr std::uint64_t kOffsetStream = 0x4F4653ULL;    // random user offsets
inline constexpr std::uint64_t kSymbolStream = 0x53594DULL;    // random payload symbols

/// Uniform double in (0, 1]; never returns 0, safe under log().
inline double unit_open(std::uint64_t key) {
    return static_cast<double>((splitmix64(key) >> 11) + 1) * 0x1.0p-53;
}

/// Uniform double in [0, 1).
inline double unit_half_open(std::uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n); multiply-shift, bias below 1e-15 for n < 2^44.
inline std::uint64_t bounded(std::uint64_t key, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(splitmix64(key)) * n) >> 64);
}

/// Circularly-symmetric complex Gaussian, unit variance (E|z|^2 = 1).
inline std::complex<double> complex_gaussian(std::uint64_t key) {
    const double u1 = unit_open(derive(key, 0));
    const double u2 = unit_half_open(derive(key, 1));
    const double radius = std::sqrt(-std::log(u1));
    const double phase = 2.0 * M_PI * u2;
    return {radius * std::cos(phase), radius * std::sin(phase)};
}

}  // namespace biasim::rng

#endif  // BIASIM_RNG_HPP
