#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace kvariates {

using Coords = std::span<const double>;

// A point of R^d. Coordinates are finite and d >= 1.
class Point {
public:
    Point() = default;
    explicit Point(std::vector<double> coords);
    Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}
    explicit Point(Coords coords) : Point(std::vector<double>(coords.begin(), coords.end())) {}

    std::size_t dim() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    Coords coords() const { return coords_; }
    operator Coords() const { return coords_; }
    const std::vector<double>& values() const { return coords_; }

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::vector<double> coords_;
};

/**
 * Ordered, non-empty list of d-dimensional points with optional positive
 * weights. Storage is a single row-major buffer; `row(i)` is a view.
 */
class Dataset {
public:
    Dataset() = default;
    // `values` holds size()*dim doubles in row-major order.
    Dataset(std::size_t dim, std::vector<double> values);
    Dataset(std::size_t dim, std::vector<double> values, std::vector<double> weights);
    explicit Dataset(const std::vector<Point>& points);
    Dataset(std::initializer_list<Point> points) : Dataset(std::vector<Point>(points)) {}

    // Builds a 1-D dataset from scalars.
    static Dataset from_scalars(const std::vector<double>& xs);

    std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool weighted() const { return !weights_.empty(); }
    double weight(std::size_t i) const { return weights_.empty() ? 1.0 : weights_[i]; }
    double total_weight() const;

    Coords row(std::size_t i) const { return Coords(values_.data() + i * dim_, dim_); }
    Point point(std::size_t i) const { return Point(row(i)); }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }

    // Rows selected by `indices`, in that order, keeping weights.
    Dataset subset(std::span<const std::size_t> indices) const;

private:
    void validate() const;

    std::size_t dim_ = 0;
    std::vector<double> values_;
    std::vector<double> weights_;
};

// Where a center came from.
struct CenterProvenance {
    std::size_t iteration = 0;                   // 1-based seeding step
    std::optional<std::size_t> reference;        // index of the reference point in its source
    std::optional<std::size_t> source;           // peer, synopsis or minibatch id
    bool noisy = false;                          // sampled from a non-Dirac density
};

// Ordered list of chosen centers with provenance.
class CenterSet {
public:
    CenterSet() = default;
    explicit CenterSet(std::size_t dim) : dim_(dim) {}
    explicit CenterSet(const std::vector<Point>& centers);
    CenterSet(std::initializer_list<Point> centers) : CenterSet(std::vector<Point>(centers)) {}

    void add(Coords center, CenterProvenance provenance = {});

    std::size_t size() const { return provenance_.size(); }
    bool empty() const { return provenance_.empty(); }
    std::size_t dim() const { return dim_; }
    Coords center(std::size_t i) const { return Coords(values_.data() + i * dim_, dim_); }
    Point point(std::size_t i) const { return Point(center(i)); }
    const CenterProvenance& provenance(std::size_t i) const { return provenance_[i]; }
    const std::vector<double>& values() const { return values_; }

    // Reference indices in iteration order; unset references map to SIZE_MAX.
    std::vector<std::size_t> reference_indices() const;

private:
    std::size_t dim_ = 0;
    std::vector<double> values_;
    std::vector<CenterProvenance> provenance_;
};

// Convex scalar valuation used by the total Jensen divergence.
using Generator = std::function<double(Coords)>;

/**
 * Distortion between a point and a center. SquaredL2 is the default;
 * TotalJensen uses a caller-supplied convex generator and a skew alpha in (0, 1).
 */
class Distortion {
public:
    enum class Kind { SquaredL2, TotalJensen };

    static Distortion squared_l2() { return Distortion(); }
    static Distortion total_jensen(double alpha, Generator generator);

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double operator()(Coords a, Coords b) const;

private:
    Kind kind_ = Kind::SquaredL2;
    double alpha_ = 0.5;
    Generator generator_;
};

// Bound ingredients assembled for the general seeding guarantee.
struct PotentialBreakdown {
    double phi_opt = 0.0;
    double phi_bias = 0.0;
    double phi_variance = 0.0;
    double eta = 0.0;
    double Phi = 0.0;

    // Phi = (6 + 4 eta) phi_opt + 2 phi_bias + 2 phi_variance.
    static PotentialBreakdown assemble(double phi_opt, double phi_bias, double phi_variance,
                                       double eta);
};

double sq_dist(Coords a, Coords b);

// Index of the nearest center (lowest index on ties) and its distortion.
std::pair<std::size_t, double> nearest_center(Coords a, const CenterSet& centers,
                                              const Distortion& dist = Distortion::squared_l2());

// Sum over points of weight times distortion to the nearest center.
double potential(const Dataset& data, const CenterSet& centers,
                 const Distortion& dist = Distortion::squared_l2());

Point centroid(const Dataset& data);
Point centroid(const Dataset& data, std::span<const std::size_t> indices);

struct OptimalClustering {
    CenterSet centers;
    double phi_opt = 0.0;
    std::vector<std::size_t> labels;  // block index per point
};

inline constexpr std::size_t kBruteForceMaxPoints = 14;

// Exact k-means optimum by enumerating every partition into k blocks.
OptimalClustering brute_force_optimum(const Dataset& data, std::size_t k);

enum class Norm { L1, L2 };

// L2: diameter (max pairwise distance). L1: max L1 distance to the
// coordinate-wise midrange, an upper bound of the smallest enclosing L1 radius.
double enclosing_radius(const Dataset& data, Norm norm);

// tJ_alpha(a, b) = J_alpha(a, b) / sqrt(1 + U^2), U = (g(a) - g(b)) / |a - b|.
double total_jensen(Coords a, Coords b, double alpha, const Generator& generator);

}  // namespace kvariates
