#include "kvariates/random.hpp"

#include <cmath>

namespace kvariates {

std::size_t Rng::uniform_index(std::size_t n) {
    auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return idx < n ? idx : n - 1;
}

double Rng::laplace(double scale) {
    // Inverse CDF: u in (-1/2, 1/2).
    const double u = open_uniform() - 0.5;
    const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
    return u < 0.0 ? -magnitude : magnitude;
}

std::size_t draw_index(Rng& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = rng.uniform();
    const std::size_t n = weights.size();
    if (!(total > 0.0)) {
        const auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    const double target = u * total;
    double running = 0.0;
    std::size_t last_positive = n - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        running += weights[i];
        last_positive = i;
        if (target < running) return i;
    }
    // Rounding pushed the target onto the total.
    return last_positive;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(mix64(base) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace kvariates
