#pragma once

#include <cstdint>
#include <limits>

namespace betamix {

/// SplitMix64: a Weyl counter passed through a 64-bit finalizer. The n-th
/// output depends only on (seed, n), which makes independent streams cheap:
/// replication r of an experiment seeded with s draws from
/// Rng(stream_seed(s, r)).
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : counter_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        counter_ += kGamma;
        return mix(counter_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t counter_;
};

/// Seed of stream `index` derived from a master seed.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace betamix
