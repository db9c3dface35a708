#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ccds {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// Stateless: every output block is a pure function of (counter, key), which is
/// what makes each Monte Carlo path reproducible in isolation.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

    static constexpr Key key_from_seed(std::uint64_t seed) {
        return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Independent draw streams sharing one (seed, path) key space.
enum class DrawStream : std::uint32_t { MtmDiffusion = 0, DefaultTime = 1 };

/// Two uniforms per Philox block, each with 53 random bits.
struct UniformPair {
    double open_closed;  // in (0, 1]
    double closed_open;  // in [0, 1)
};

inline UniformPair uniform_pair(std::uint64_t seed, std::uint64_t path_index, std::uint32_t step, DrawStream stream) {
    const Philox4x32::Counter ctr{step, static_cast<std::uint32_t>(path_index),
                                  static_cast<std::uint32_t>(path_index >> 32), static_cast<std::uint32_t>(stream)};
    const auto out = Philox4x32::generate(ctr, Philox4x32::key_from_seed(seed));
    constexpr double two_pow_m53 = 1.0 / 9007199254740992.0;
    const std::uint64_t a = ((static_cast<std::uint64_t>(out[0]) << 32) | out[1]) >> 11;
    const std::uint64_t b = ((static_cast<std::uint64_t>(out[2]) << 32) | out[3]) >> 11;
    return {static_cast<double>(a + 1) * two_pow_m53, static_cast<double>(b) * two_pow_m53};
}

/// Standard normal draw keyed by (seed, path, step) via Box-Muller.
inline double standard_normal(std::uint64_t seed, std::uint64_t path_index, std::uint32_t step) {
    const auto u = uniform_pair(seed, path_index, step, DrawStream::MtmDiffusion);
    return std::sqrt(-2.0 * std::log(u.open_closed)) * std::cos(2.0 * std::numbers::pi * u.closed_open);
}

}  // namespace ccds
