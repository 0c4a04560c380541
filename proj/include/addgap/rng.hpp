// SPDX-License-Identifier: Apache-2.0
//
// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
//
// A stream is addressed by (root_seed, stream_index, substream): the seed is
// the 64-bit key, the stream index and substream fill the upper counter
// words and the lower word counts blocks. Streams with different addresses
// never share a counter value.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace addgap {

namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kM0 = 0xD2511F53U;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57U;
inline constexpr std::uint32_t kW0 = 0x9E3779B9U;
inline constexpr std::uint32_t kW1 = 0xBB67AE85U;

constexpr Counter round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

/// Ten-round Philox4x32 bijection.
constexpr Counter block(Counter c, Key k) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        c = round(c, k);
    }
    return c;
}

}  // namespace philox

/// Satisfies UniformRandomBitGenerator; a single stream must not be shared
/// between threads.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t root_seed, std::uint64_t stream_index, std::uint32_t substream = 0)
        : root_seed_(root_seed), stream_index_(stream_index), substream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (cursor_ >= 2) {
            refill();
        }
        return buffer_[cursor_++];
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw (polar Box-Muller without caching, so every draw
    /// depends only on the stream position).
    double normal() {
        while (true) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                return u * std::sqrt(-2.0 * std::log(s) / s);
            }
        }
    }

    [[nodiscard]] std::uint64_t root_seed() const { return root_seed_; }
    [[nodiscard]] std::uint64_t stream_index() const { return stream_index_; }
    [[nodiscard]] std::uint32_t substream() const { return substream_; }

private:
    void refill() {
        const philox::Counter ctr{static_cast<std::uint32_t>(block_),
                                  substream_,
                                  static_cast<std::uint32_t>(stream_index_),
                                  static_cast<std::uint32_t>(stream_index_ >> 32)};
        const philox::Key key{static_cast<std::uint32_t>(root_seed_),
                              static_cast<std::uint32_t>(root_seed_ >> 32)};
        const auto out = philox::block(ctr, key);
        buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        ++block_;
        cursor_ = 0;
    }

    std::uint64_t root_seed_;
    std::uint64_t stream_index_;
    std::uint32_t substream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2;
};

}  // namespace addgap
