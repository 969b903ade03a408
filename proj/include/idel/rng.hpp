#pragma once

#include <cstdint>

namespace idel {

/// Counter-based SplitMix64 stream: value(i) depends only on (seed, i), so
/// trials can be drawn concurrently and any implementation of the algorithm
/// reproduces the streams from the seed alone.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97f4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Independent stream for trial i of the given seed.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t trial) {
        SplitMix64 mix(seed ^ (0xA0761D6478BD642Full * (trial + 1)));
        mix.next_u64();
        return mix;
    }

private:
    std::uint64_t state_;
};

} // namespace idel
