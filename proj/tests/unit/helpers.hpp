#pragma once

#include <cmath>
#include <vector>

#include "kvariates/geometry.hpp"
#include "kvariates/random.hpp"

namespace testutil {

inline kvariates::Dataset random_dataset(std::size_t m, std::size_t d, std::uint64_t seed, double scale = 10.0) {
    kvariates::Rng rng(seed);
    std::vector<double> v(m * d);
    for (double& x : v) x = scale * rng.uniform();
    return kvariates::Dataset(d, std::move(v));
}

// Brute-force potential over every (point, center) pair.
inline double naive_potential(const kvariates::Dataset& data, const kvariates::CenterSet& centers) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double best = INFINITY;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < data.dim(); ++j) {
                const double diff = data.row(i)[j] - centers.center(c)[j];
                s += diff * diff;
            }
            best = std::min(best, s);
        }
        total += data.weight(i) * best;
    }
    return total;
}

// Optimum over every labelling with k nonempty blocks (k^m enumeration).
inline double labelling_optimum(const kvariates::Dataset& data, std::size_t k) {
    const std::size_t m = data.size();
    const std::size_t d = data.dim();
    std::vector<std::size_t> label(m, 0);
    double best = INFINITY;
    while (true) {
        std::vector<double> sum(k * d, 0.0);
        std::vector<double> cnt(k, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            cnt[label[i]] += 1.0;
            for (std::size_t j = 0; j < d; ++j) sum[label[i] * d + j] += data.row(i)[j];
        }
        bool full = true;
        for (double c : cnt) full = full && c > 0.0;
        if (full) {
            double phi = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = data.row(i)[j] - sum[label[i] * d + j] / cnt[label[i]];
                    phi += diff * diff;
                }
            }
            best = std::min(best, phi);
        }
        std::size_t pos = 0;
        while (pos < m && ++label[pos] == k) label[pos++] = 0;
        if (pos == m) break;
    }
    return best;
}

}  // namespace testutil
