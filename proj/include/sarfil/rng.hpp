#pragma once

#include <cmath>
#include <cstdint>

namespace sarfil {

// SplitMix64: 64-bit counter-based generator with O(1) splitting, so
// fixtures are reproducible across platforms and sample order. The output
// function is the standard Stafford mix13 finalizer.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    // Independent substream k of the original seed; draws made on the
    // parent do not affect the fork.
    SplitMix64 fork(std::uint64_t stream) const {
        SplitMix64 scrambler(seed_ ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
        return SplitMix64(scrambler.next_u64());
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace sarfil
