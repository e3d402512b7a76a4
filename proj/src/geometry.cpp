#include "kvariates/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kvariates/error.hpp"

namespace kvariates {

namespace {

void check_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("non-finite coordinate");
    }
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw InvalidArgument("point dimension must be >= 1");
    check_finite(coords_);
}

Dataset::Dataset(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
    validate();
}

Dataset::Dataset(std::size_t dim, std::vector<double> values, std::vector<double> weights)
    : dim_(dim), values_(std::move(values)), weights_(std::move(weights)) {
    validate();
}

Dataset::Dataset(const std::vector<Point>& points) {
    if (points.empty()) throw InvalidArgument("dataset must be nonempty");
    dim_ = points.front().dim();
    values_.reserve(points.size() * dim_);
    for (const auto& p : points) {
        if (p.dim() != dim_) throw InvalidArgument("points do not share a dimension");
        values_.insert(values_.end(), p.values().begin(), p.values().end());
    }
    validate();
}

Dataset Dataset::from_scalars(const std::vector<double>& xs) { return Dataset(1, xs); }

void Dataset::validate() const {
    if (dim_ == 0) throw InvalidArgument("dataset dimension must be >= 1");
    if (values_.empty()) throw InvalidArgument("dataset must be nonempty");
    if (values_.size() % dim_ != 0) throw InvalidArgument("ragged dataset buffer");
    check_finite(values_);
    if (!weights_.empty()) {
        if (weights_.size() != size()) throw InvalidArgument("weights length differs from size");
        for (double w : weights_) {
            if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be positive");
        }
    }
}

double Dataset::total_weight() const {
    if (weights_.empty()) return static_cast<double>(size());
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    if (indices.empty()) throw InvalidArgument("empty subset");
    std::vector<double> values;
    values.reserve(indices.size() * dim_);
    std::vector<double> weights;
    for (std::size_t i : indices) {
        if (i >= size()) throw InvalidArgument("subset index out of range");
        auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
        if (weighted()) weights.push_back(weights_[i]);
    }
    return weighted() ? Dataset(dim_, std::move(values), std::move(weights))
                      : Dataset(dim_, std::move(values));
}

CenterSet::CenterSet(const std::vector<Point>& centers) {
    if (centers.empty()) return;
    dim_ = centers.front().dim();
    for (const auto& c : centers) add(c.coords());
}

void CenterSet::add(Coords center, CenterProvenance provenance) {
    if (dim_ == 0) dim_ = center.size();
    if (center.size() != dim_) throw InvalidArgument("center dimension mismatch");
    values_.insert(values_.end(), center.begin(), center.end());
    provenance_.push_back(provenance);
}

std::vector<std::size_t> CenterSet::reference_indices() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (const auto& p : provenance_) {
        out.push_back(p.reference.value_or(std::numeric_limits<std::size_t>::max()));
    }
    return out;
}

Distortion Distortion::total_jensen(double alpha, Generator generator) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (!generator) throw InvalidArgument("total Jensen needs a generator");
    Distortion d;
    d.kind_ = Kind::TotalJensen;
    d.alpha_ = alpha;
    d.generator_ = std::move(generator);
    return d;
}

double Distortion::operator()(Coords a, Coords b) const {
    if (kind_ == Kind::SquaredL2) return sq_dist(a, b);
    return kvariates::total_jensen(a, b, alpha_, generator_);
}

PotentialBreakdown PotentialBreakdown::assemble(double phi_opt, double phi_bias,
                                                double phi_variance, double eta) {
    if (phi_opt < 0.0 || phi_bias < 0.0 || phi_variance < 0.0 || eta < 0.0) {
        throw InvalidArgument("potential breakdown terms must be nonnegative");
    }
    return {phi_opt, phi_bias, phi_variance, eta,
            (6.0 + 4.0 * eta) * phi_opt + 2.0 * phi_bias + 2.0 * phi_variance};
}

double sq_dist(Coords a, Coords b) {
    if (a.size() != b.size()) throw InvalidArgument("dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

std::pair<std::size_t, double> nearest_center(Coords a, const CenterSet& centers,
                                              const Distortion& dist) {
    if (centers.empty()) throw InvalidArgument("empty center set");
    std::size_t best = 0;
    double best_d = dist(a, centers.center(0));
    for (std::size_t c = 1; c < centers.size(); ++c) {
        const double d = dist(a, centers.center(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return {best, best_d};
}

double potential(const Dataset& data, const CenterSet& centers, const Distortion& dist) {
    if (centers.empty()) throw InvalidArgument("empty center set");
    if (centers.dim() != data.dim()) throw InvalidArgument("dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total += data.weight(i) * nearest_center(data.row(i), centers, dist).second;
    }
    return total;
}

Point centroid(const Dataset& data, std::span<const std::size_t> indices) {
    if (indices.empty()) throw InvalidArgument("centroid of an empty subset");
    std::vector<double> sum(data.dim(), 0.0);
    double total = 0.0;
    for (std::size_t i : indices) {
        const double w = data.weight(i);
        auto r = data.row(i);
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += w * r[j];
        total += w;
    }
    for (double& v : sum) v /= total;
    return Point(std::move(sum));
}

Point centroid(const Dataset& data) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    return centroid(data, all);
}

namespace {

// Depth-first enumeration of restricted growth strings with exactly k blocks,
// in lexicographic order. Each leaf is scored from scratch so the result does
// not depend on the traversal path.
class PartitionSearch {
public:
    PartitionSearch(const Dataset& data, std::size_t k)
        : data_(data), k_(k), m_(data.size()), d_(data.dim()), labels_(m_, 0),
          weight_(k), sum_(k * d_) {}

    std::vector<std::size_t> run() {
        recurse(0, 0);
        return best_labels_;
    }

private:
    double cost() {
        std::fill(weight_.begin(), weight_.end(), 0.0);
        std::fill(sum_.begin(), sum_.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double w = data_.weight(i);
            auto r = data_.row(i);
            double* s = &sum_[labels_[i] * d_];
            for (std::size_t j = 0; j < d_; ++j) s[j] += w * r[j];
            weight_[labels_[i]] += w;
        }
        for (std::size_t b = 0; b < k_; ++b) {
            for (std::size_t j = 0; j < d_; ++j) sum_[b * d_ + j] /= weight_[b];
        }
        double total = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            total += data_.weight(i) * sq_dist(data_.row(i), Coords(&sum_[labels_[i] * d_], d_));
        }
        return total;
    }

    void recurse(std::size_t i, std::size_t used) {
        if (i == m_) {
            if (used != k_) return;
            const double c = cost();
            // Near-equal costs count as ties; the earlier partition wins.
            if (c < best_cost_ - 1e-12 * std::abs(best_cost_) || best_labels_.empty()) {
                best_cost_ = c;
                best_labels_ = labels_;
            }
            return;
        }
        // Remaining points must be able to open the missing blocks.
        if (k_ - used > m_ - i) return;
        const std::size_t limit = std::min(used + 1, k_);
        for (std::size_t b = 0; b < limit; ++b) {
            labels_[i] = b;
            recurse(i + 1, std::max(used, b + 1));
        }
    }

    const Dataset& data_;
    std::size_t k_, m_, d_;
    std::vector<std::size_t> labels_;
    std::vector<double> weight_, sum_;
    double best_cost_ = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_labels_;
};

}  // namespace

OptimalClustering brute_force_optimum(const Dataset& data, std::size_t k) {
    const std::size_t m = data.size();
    if (m > kBruteForceMaxPoints) {
        throw GuardExceeded("brute_force_optimum supports at most " +
                            std::to_string(kBruteForceMaxPoints) + " points");
    }
    if (k == 0 || k > m) throw InvalidArgument("need 1 <= k <= m");

    OptimalClustering result;
    result.labels = PartitionSearch(data, k).run();
    result.centers = CenterSet(data.dim());
    for (std::size_t b = 0; b < k; ++b) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < m; ++i) {
            if (result.labels[i] == b) members.push_back(i);
        }
        result.centers.add(centroid(data, members).coords(), {b + 1, std::nullopt, b, false});
    }
    // Recompute directly against the block centroids.
    double phi = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        phi += data.weight(i) * sq_dist(data.row(i), result.centers.center(result.labels[i]));
    }
    result.phi_opt = phi;
    return result;
}

namespace {

double l2_diameter(const Dataset& data) {
    const std::size_t m = data.size();
    if (m < 2) return 0.0;
    // Sort by distance to the centroid; |a - b| <= r_a + r_b prunes pairs.
    const Point c = centroid(data);
    std::vector<double> radius(m);
    for (std::size_t i = 0; i < m; ++i) radius[i] = std::sqrt(sq_dist(data.row(i), c));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return radius[a] > radius[b]; });

    double best_sq = 0.0;
    double best = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        const std::size_t i = order[p];
        if (2.0 * radius[i] <= best) break;
        for (std::size_t q = p + 1; q < m; ++q) {
            const std::size_t j = order[q];
            if (radius[i] + radius[j] <= best) break;
            const double s = sq_dist(data.row(i), data.row(j));
            if (s > best_sq) {
                best_sq = s;
                best = std::sqrt(s);
            }
        }
    }
    return best;
}

double l1_midrange_radius(const Dataset& data) {
    const std::size_t d = data.dim();
    std::vector<double> lo(data.row(0).begin(), data.row(0).end());
    std::vector<double> hi = lo;
    for (std::size_t i = 1; i < data.size(); ++i) {
        auto r = data.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], r[j]);
            hi[j] = std::max(hi[j], r[j]);
        }
    }
    std::vector<double> mid(d);
    for (std::size_t j = 0; j < d; ++j) mid[j] = 0.5 * (lo[j] + hi[j]);
    double best = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto r = data.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += std::abs(r[j] - mid[j]);
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

double enclosing_radius(const Dataset& data, Norm norm) {
    if (data.size() == 0) throw InvalidArgument("empty dataset");
    return norm == Norm::L2 ? l2_diameter(data) : l1_midrange_radius(data);
}

double total_jensen(Coords a, Coords b, double alpha, const Generator& generator) {
    if (a.size() != b.size()) throw InvalidArgument("dimension mismatch");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    const double norm_sq = sq_dist(a, b);
    if (norm_sq == 0.0) return 0.0;

    std::vector<double> mix(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mix[i] = alpha * a[i] + (1.0 - alpha) * b[i];
    const double ga = generator(a);
    const double gb = generator(b);
    const double gm = generator(mix);
    if (!std::isfinite(ga) || !std::isfinite(gb) || !std::isfinite(gm)) {
        throw InvalidArgument("generator returned a non-finite value");
    }
    const double jensen = alpha * ga + (1.0 - alpha) * gb - gm;
    const double slope = (ga - gb) / std::sqrt(norm_sq);
    // Convexity makes J >= 0; clamp rounding noise.
    return std::max(0.0, jensen) / std::sqrt(1.0 + slope * slope);
}

}  // namespace kvariates
