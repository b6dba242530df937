#pragma once

#include <array>
#include <cstdint>

namespace provol::rng {

// Counter-based random numbers: draw i of stream s under a master seed is a pure
// function of (seed, s, i), so any worker layout reproduces the same values.
//
// Generator: Philox 4x64 with 10 rounds. One block encrypts a 256-bit counter
// under a 128-bit key into four 64-bit words.

struct Block {
    std::array<std::uint64_t, 4> w;
};

Block philox4x64(const std::array<std::uint64_t, 4>& counter,
                 const std::array<std::uint64_t, 2>& key);

// Map 64 random bits to a uniform double in the open interval (0, 1):
// the top 53 bits scaled to [0,1) plus a half-ulp offset keeps both tails open.
inline double uniform_from_bits(std::uint64_t raw) {
    const std::uint64_t hi = raw >> 11;
    // The top cell's exact value 1 - 2^-54 would round to 1.0 (ties to even),
    // breaking the open interval; pin it to the nearest double inside (0, 1).
    if (hi == (1ull << 53) - 1) return 0x1.fffffffffffffp-1;
    return static_cast<double>(hi) * 0x1.0p-53 + 0x1.0p-54;
}

// Inverse of the standard normal CDF (Wichura's PPND16 rational approximations,
// ~16 significant digits over the full open interval).
double inverse_normal_cdf(double p);

// Raw 64-bit word i of stream `stream` under `seed`.
std::uint64_t raw_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t i);

// Standard normal draw i of stream `stream` under `seed`.
double normal_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t i);

// Sequential reader over one stream; caches the current Philox block so hot
// loops pay one block per four draws. Produces exactly normal_draw(seed, stream, i)
// for i = 0, 1, 2, ...
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : key_{seed, stream} {}

    double next() {
        const std::uint64_t word = index_ & 3u;
        if (word == 0) block_ = philox4x64({index_ >> 2, 0, 0, 0}, key_);
        ++index_;
        return inverse_normal_cdf(uniform_from_bits(block_.w[word]));
    }

private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t index_ = 0;
    Block block_{};
};

} // namespace provol::rng
