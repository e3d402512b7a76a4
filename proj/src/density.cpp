#include "kvariates/density.hpp"

#include <cmath>
#include <map>

#include "kvariates/error.hpp"

namespace kvariates {

LocalDensity LocalDensity::dirac(Point mu) {
    LocalDensity d;
    d.kind_ = Kind::Dirac;
    d.mu_ = std::move(mu);
    return d;
}

LocalDensity LocalDensity::product_laplace(Point mu, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("Laplace scale must be > 0");
    LocalDensity d;
    d.kind_ = Kind::ProductLaplace;
    d.mu_ = std::move(mu);
    d.scale_ = scale;
    return d;
}

LocalDensity LocalDensity::uniform_on_subset(std::shared_ptr<const std::vector<std::size_t>> members) {
    if (!members || members->empty()) throw InvalidArgument("uniform subset must be nonempty");
    LocalDensity d;
    d.kind_ = Kind::UniformOnSubset;
    d.members_ = std::move(members);
    return d;
}

Point LocalDensity::mean(const Dataset& data) const {
    if (kind_ == Kind::UniformOnSubset) {
        std::vector<double> sum(data.dim(), 0.0);
        for (std::size_t i : *members_) {
            auto r = data.row(i);
            for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += r[j];
        }
        for (double& v : sum) v /= static_cast<double>(members_->size());
        return Point(std::move(sum));
    }
    return mu_;
}

double LocalDensity::covariance_trace(const Dataset& data) const {
    switch (kind_) {
        case Kind::Dirac:
            return 0.0;
        case Kind::ProductLaplace:
            return static_cast<double>(mu_.dim()) * 2.0 * scale_ * scale_;
        case Kind::UniformOnSubset: {
            const Point c = mean(data);
            double s = 0.0;
            for (std::size_t i : *members_) s += sq_dist(data.row(i), c);
            return s / static_cast<double>(members_->size());
        }
    }
    return 0.0;
}

Point LocalDensity::sample(const Dataset& data, Rng& rng) const {
    switch (kind_) {
        case Kind::Dirac:
            return mu_;
        case Kind::ProductLaplace: {
            std::vector<double> x(mu_.values());
            for (double& v : x) v += rng.laplace(scale_);
            return Point(std::move(x));
        }
        case Kind::UniformOnSubset:
            return data.point((*members_)[rng.uniform_index(members_->size())]);
    }
    return mu_;
}

double LocalDensity::pdf(const Dataset& data, Coords x) const {
    switch (kind_) {
        case Kind::Dirac:
            return sq_dist(mu_, x) == 0.0 ? 1.0 : 0.0;
        case Kind::ProductLaplace: {
            double l1 = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) l1 += std::abs(x[j] - mu_[j]);
            const double d = static_cast<double>(x.size());
            return std::exp(-l1 / scale_ - d * std::log(2.0 * scale_));
        }
        case Kind::UniformOnSubset: {
            std::size_t hits = 0;
            for (std::size_t i : *members_) hits += sq_dist(data.row(i), x) == 0.0 ? 1 : 0;
            return static_cast<double>(hits) / static_cast<double>(members_->size());
        }
    }
    return 0.0;
}

DensityList dirac_densities(const Dataset& data) {
    DensityList out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(LocalDensity::dirac(data.point(i)));
    return out;
}

DensityList laplace_densities(const Dataset& data, double scale) {
    DensityList out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.push_back(LocalDensity::product_laplace(data.point(i), scale));
    }
    return out;
}

DensityList uniform_subset_densities(const Dataset& data, const std::vector<std::size_t>& group_of) {
    if (group_of.size() != data.size()) throw InvalidArgument("one group per point required");
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < group_of.size(); ++i) groups[group_of[i]].push_back(i);
    std::map<std::size_t, std::shared_ptr<const std::vector<std::size_t>>> shared;
    for (auto& [g, members] : groups) {
        shared[g] = std::make_shared<const std::vector<std::size_t>>(std::move(members));
    }
    DensityList out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.push_back(LocalDensity::uniform_on_subset(shared[group_of[i]]));
    }
    return out;
}

double phi_bias(const Dataset& data, const DensityList& densities, const CenterSet& optimal) {
    if (densities.size() != data.size()) throw InvalidArgument("one density per point required");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto [c, unused] = nearest_center(data.row(i), optimal);
        total += data.weight(i) * sq_dist(densities[i].mean(data), optimal.center(c));
    }
    return total;
}

double phi_variance(const Dataset& data, const DensityList& densities) {
    if (densities.size() != data.size()) throw InvalidArgument("one density per point required");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total += data.weight(i) * densities[i].covariance_trace(data);
    }
    return total;
}

}  // namespace kvariates
