#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace kvariates {

/**
 * Deterministic random source shared by every randomized routine.
 *
 * All draws go through `uniform()` so that two algorithms consuming the same
 * number of draws in the same order produce identical outputs for a seed.
 * Conversions are done by hand rather than through `<random>` distributions,
 * whose output is implementation-defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform double in the open interval (0, 1).
    double open_uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    // Uniform index in [0, n). Consumes exactly one draw. n must be > 0.
    std::size_t uniform_index(std::size_t n);

    // Zero-mean Laplace draw with the given scale b (variance 2 b^2).
    double laplace(double scale);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Categorical draw proportional to `weights` using cumulative sums and a
// single uniform draw. Zero-weight entries are never selected; ties resolve
// to the lowest index. When every weight is zero the same draw selects an
// index uniformly. `weights` must be nonempty.
std::size_t draw_index(Rng& rng, std::span<const double> weights);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed for trial `index` derived from `base`; distinct indices give
// independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace kvariates
