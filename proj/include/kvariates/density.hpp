#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "kvariates/geometry.hpp"
#include "kvariates/random.hpp"

namespace kvariates {

/**
 * Local (noise) distribution attached to one data point. A chosen reference
 * point emits its center by sampling its density.
 *
 *  - Dirac(mu): emits mu.
 *  - ProductLaplace(mu, b): independent Laplace(mu_i, b) per coordinate.
 *  - UniformOnSubset(members): uniform over a list of rows of the dataset.
 */
class LocalDensity {
public:
    enum class Kind { Dirac, ProductLaplace, UniformOnSubset };

    static LocalDensity dirac(Point mu);
    static LocalDensity product_laplace(Point mu, double scale);
    static LocalDensity uniform_on_subset(std::shared_ptr<const std::vector<std::size_t>> members);

    Kind kind() const { return kind_; }
    double scale() const { return scale_; }
    const std::vector<std::size_t>& members() const { return *members_; }

    // Expectation. UniformOnSubset needs the dataset its members index into.
    Point mean(const Dataset& data) const;
    // Trace of the covariance matrix.
    double covariance_trace(const Dataset& data) const;
    Point sample(const Dataset& data, Rng& rng) const;
    // Density at x. Dirac and UniformOnSubset are point masses: the value is
    // the probability mass sitting exactly on x.
    double pdf(const Dataset& data, Coords x) const;

private:
    Kind kind_ = Kind::Dirac;
    Point mu_;
    double scale_ = 0.0;
    std::shared_ptr<const std::vector<std::size_t>> members_;
};

using DensityList = std::vector<LocalDensity>;

DensityList dirac_densities(const Dataset& data);
// Product-Laplace centered at each point with per-coordinate scale b.
DensityList laplace_densities(const Dataset& data, double scale);
// Each point owns the uniform density over the members of its group.
DensityList uniform_subset_densities(const Dataset& data, const std::vector<std::size_t>& group_of);

// Sum over points of |mu_a - c_opt(a)|^2, c_opt(a) the optimal center nearest a.
double phi_bias(const Dataset& data, const DensityList& densities, const CenterSet& optimal);
// Sum over points of the trace of the density covariance.
double phi_variance(const Dataset& data, const DensityList& densities);

}  // namespace kvariates
