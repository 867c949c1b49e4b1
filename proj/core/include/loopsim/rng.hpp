#pragma once

#include <cstdint>

namespace loopsim {

/// Stateless counter-based generator: every output word is a keyed hash of
/// (seed, stream, counter), so parallel consumers can draw from disjoint
/// streams and reproduce results bit-for-bit on any platform. The mixer is
/// the SplitMix64 finalizer applied over a Weyl sequence.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL))) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(key_ + counter * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform01(counter);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
};

/// Binomial(shots, p) by counting Bernoulli successes; counters
/// [counter_base, counter_base + shots) are consumed.
inline std::uint64_t binomial_draw(const CounterRng& rng, std::uint64_t counter_base,
                                   std::uint64_t shots, double p) {
    std::uint64_t ups = 0;
    for (std::uint64_t i = 0; i < shots; ++i)
        if (rng.uniform01(counter_base + i) < p) ++ups;
    return ups;
}

}  // namespace loopsim
