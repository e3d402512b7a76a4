#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kvariates/density.hpp"
#include "kvariates/geometry.hpp"

namespace kvariates {

/**
 * Map from data points to R^d applied before computing sampling weights.
 *
 * Identity leaves points unchanged. NearestSynopsis replaces a point by its
 * nearest synopsis. MinibatchGate keeps the points of minibatch t-1 at
 * iteration t and sends every other point onto its nearest current center,
 * so that only the current minibatch carries sampling weight. Custom wraps a
 * caller-supplied map.
 */
class ProbeFunction {
public:
    enum class Kind { Identity, NearestSynopsis, MinibatchGate, Custom };
    // (point index, coordinates, 1-based iteration) -> probe image.
    using Map = std::function<Point(std::size_t, Coords, std::size_t)>;

    static ProbeFunction identity() { return ProbeFunction(); }
    static ProbeFunction nearest_synopsis(CenterSet synopses);
    static ProbeFunction minibatch_gate(std::vector<std::size_t> batch_of);
    static ProbeFunction custom(Map map, bool iteration_aware);

    Kind kind() const { return kind_; }
    bool iteration_aware() const { return iteration_aware_; }

    // Row-major probe images of every point at iteration t.
    std::vector<double> images(const Dataset& data, std::size_t t, const CenterSet& current) const;

private:
    Kind kind_ = Kind::Identity;
    bool iteration_aware_ = false;
    CenterSet synopses_;
    std::vector<std::size_t> batch_of_;
    Map map_;
};

// What D_t is measured against.
enum class Anchor {
    Centers,     // the emitted (possibly noisy) centers
    References,  // the chosen reference data points
};

struct SeedingConfig {
    std::size_t k = 1;
    Distortion distortion = Distortion::squared_l2();
    std::uint64_t seed = 0;
    ProbeFunction probe = ProbeFunction::identity();
    DensityList densities;  // empty: Dirac at every point
    Anchor anchor = Anchor::Centers;
};

// Called before every draw with the 1-based iteration and the sampling
// probabilities over the candidates.
using DrawObserver = std::function<void(std::size_t, std::span<const double>)>;

/**
 * Generalized D^2 seeding. The first reference point is drawn uniformly
 * (proportionally to weight for weighted data); later ones with probability
 * proportional to weight times D_t(a) = min over C of dist(probe_t(a), x).
 * The center is then sampled from the reference point's local density. When
 * every D_t vanishes the draw falls back to uniform.
 */
CenterSet kvariates_seed(const Dataset& data, const SeedingConfig& cfg,
                         const DrawObserver& observer = {});

// Classical k-means++ seeding.
CenterSet kmeanspp_seed(const Dataset& data, std::size_t k, std::uint64_t seed,
                        const DrawObserver& observer = {});

// Lloyd iterations; empty clusters keep their previous center. Stops early
// once assignments are stable.
CenterSet lloyd_refine(const Dataset& data, const CenterSet& centers, std::size_t iters);

struct EtaEstimate {
    double eta = 0.0;
    std::size_t valid_samples = 0;
    std::size_t skipped = 0;
    bool degenerate = false;  // every sample skipped
};

/**
 * Randomized lower estimate of the stretching factor of a probe. Candidate
 * center sets are random subsets of the data with 1 to |optimal| elements.
 * The probe is evaluated at iteration 1.
 */
EtaEstimate estimate_eta(const Dataset& data, const ProbeFunction& probe,
                         const CenterSet& optimal, std::size_t trials, std::uint64_t seed);

// Stretching ratio of one sample; nullopt when the probed denominator is 0.
std::optional<double> stretch_ratio(const Dataset& data, std::span<const double> images,
                                    std::span<const std::size_t> cluster, std::size_t anchor,
                                    const CenterSet& candidates);

}  // namespace kvariates
