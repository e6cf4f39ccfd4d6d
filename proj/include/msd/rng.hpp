#pragma once

#include <cstdint>
#include <limits>

namespace msd {

/// Counter-based 64-bit generator.
///
/// Draw i of a generator with seed s is `mix64(key + (i + 1) * 0x9E3779B97F4A7C15)`
/// where `key = mix64(s)` and `mix64` is the SplitMix64 finalizer. Uniforms
/// take the top 53 bits, centred in their cell so they lie strictly in (0, 1).
/// Normals use the inverse normal CDF of one uniform (Acklam's rational
/// approximation refined by one Halley step against `std::erfc`), so every
/// normal variate consumes exactly one 64-bit draw.
///
/// The stream is fully defined by (seed, counter); results do not depend on
/// the standard library's distribution implementations.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;
    // Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t counter() const noexcept { return counter_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

// Independent child seed for stream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Standard normal quantile function, p in (0, 1).
double normal_quantile(double p) noexcept;

}  // namespace msd
