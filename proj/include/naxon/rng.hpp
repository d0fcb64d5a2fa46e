#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace naxon {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A draw is a pure function of (key, counter), so any coordinate of the noise
 * field can be produced independently of evaluation order or thread layout.
 */
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Stream address of one Gaussian draw: (seed, component, time step, cell).
struct NoiseCoordinate {
    std::uint64_t seed = 0;
    std::uint32_t component = 0;
    std::uint64_t step = 0;
    std::uint32_t cell = 0;
};

namespace detail {

inline double u01_open(std::uint32_t hi, std::uint32_t lo) noexcept {
    // 53-bit mantissa, shifted by half an ulp so 0 is never returned.
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ULL << 53) - 1)) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normal draw at the given coordinate (Box-Muller on one Philox block).
inline double standard_normal(const NoiseCoordinate& c) noexcept {
    const Philox4x32::Counter ctr{c.cell, static_cast<std::uint32_t>(c.step),
                                  static_cast<std::uint32_t>(c.step >> 32), c.component};
    const Philox4x32::Key key{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32)};
    const auto r = Philox4x32::generate(ctr, key);
    const double u1 = detail::u01_open(r[0], r[1]);
    const double u2 = detail::u01_open(r[2], r[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Derives an independent 64-bit seed for a sub-experiment (SplitMix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace naxon
