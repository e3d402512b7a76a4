#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kvariates/density.hpp"
#include "kvariates/geometry.hpp"
#include "kvariates/random.hpp"
#include "kvariates/seeding.hpp"

namespace kvariates {

inline constexpr std::size_t kDeltaExactMaxPoints = 12;
inline constexpr std::size_t kDefaultEstimationTrials = 5000;

// f(k) = 4^(2k-4).
double f_of_k(std::size_t k);

// delta_w = R^2 / min over (N, B) of sum_{a in B} |a - nn_N(a)|^2, with
// |N| = k-1, |B| = m-1 and R the L2 diameter. Exhaustive; m <= 12.
// Throws Degenerate when the minimum is 0.
double delta_w_exact(const Dataset& data, std::size_t k);
// Same quantity minimized over `trials` random (N, B) pairs.
double delta_w_randomized(const Dataset& data, std::size_t k, std::size_t trials, std::uint64_t seed);

// Exhaustive delta_s: every N with 1..k-1 points and every nonempty subset of
// the rest passing n_packed_check, the added center being its centroid.
// Infinite when adding a center can zero the potential. m <= 12.
double delta_s_exact(const Dataset& data, std::size_t k);
// Random N and a random extra data point in place of the packed centroid.
double delta_s_randomized(const Dataset& data, std::size_t k, std::size_t trials, std::uint64_t seed);

// Sufficient test: the centroid of `subset` is strictly closer to each of its
// points than any point of `others`.
bool n_packed_check(const Dataset& subset, const Dataset& others);

struct EpsilonTilde {
    std::optional<double> value;
    std::string reason;  // set when value is empty
    bool defined() const { return value.has_value(); }
};

EpsilonTilde epsilon_tilde(double epsilon, double delta_w, double delta_s, std::size_t k);

// Calibrated noise 2 sqrt(2) R / eps_tilde and Laplace-mechanism noise
// 2 sqrt(2) k R / eps (standard deviations per coordinate).
double sigma_calibrated(double R, double eps_tilde);
double sigma_laplace_mechanism(double R, std::size_t k, double epsilon);

// mu plus independent Laplace(sigma / sqrt 2) noise per coordinate.
Point sample_product_laplace(const Point& mu, double sigma, Rng& rng);

enum class SpreadMethod { Exact, Randomized };

struct SpreadReport {
    double delta_w = 0.0;
    double delta_s = 0.0;
    double R_l1 = 0.0;
    double R_l2_diam = 0.0;
    std::size_t k = 0;
    SpreadMethod method = SpreadMethod::Randomized;
    std::size_t n_est = 0;
    double epsilon = 0.0;
    std::optional<double> epsilon_tilde;
    std::optional<double> sigma1;
    double sigma2 = 0.0;
};

SpreadReport spread_report(const Dataset& data, std::size_t k, double epsilon, SpreadMethod method,
                           std::size_t n_est, std::uint64_t seed);

enum class DpMode { Calibrated, LaplaceMechanism, Auto };

struct DpConfig {
    double epsilon = 1.0;
    DpMode mode = DpMode::Auto;
    double R = 0.0;  // L1 enclosing radius; 0 takes the report's value
    std::size_t k = 2;
};

struct DpRun {
    CenterSet centers;
    DpMode mode = DpMode::Calibrated;  // mode actually used
    double sigma = 0.0;
    // Data-independent part of the bound: 8 m R^2 / eps_tilde^2 or
    // 8 m k^2 R^2 / eps^2. Add 8 phi_opt for Phi1 / Phi2.
    double phi_noise = 0.0;
};

/**
 * k-variates with product-Laplace densities. Calibrated mode uses sigma1 and
 * refuses to run when eps_tilde is undefined; Auto picks the smaller of
 * sigma1 and sigma2.
 */
DpRun dp_kvariates(const Dataset& data, const DpConfig& cfg, const SpreadReport& spread,
                   std::uint64_t seed);

inline constexpr std::size_t kLikelihoodMaxPoints = 7;
inline constexpr std::size_t kLikelihoodMaxK = 3;

/**
 * Exact density of the unordered output C of k-variates (identity probes,
 * D measured against reference points), summing over all reference index
 * sequences and all orderings of C.
 */
double likelihood_exact(const CenterSet& centers, const Dataset& data, const DensityList& densities);

// rho(R) = exp(2 sqrt(2) R / sigma) for product-Laplace densities.
double laplace_rho(double R, double sigma);

// (1 + dw)^(k-1) + f(k) dw (1 + ds)^(k-1) rho.
double lr_bound_rhs(double delta_w, double delta_s, std::size_t k, double rho);

struct LargeSampleReport {
    double g = 0.0;
    double k_max = 0.0;   // (delta^2 / (4 rho_D)) sqrt(m)
    bool condition = false;
    double ratio_bound = 0.0;  // 1 + rho_D^k g
};

// g(m, k, d) = 4 / m^(1/4 + 1/(d+1)) + (64 / k^(2/d))^k rho(2R) / m.
double large_sample_g(double m, std::size_t k, std::size_t d, double rho_2R);
LargeSampleReport large_sample_report(double m, std::size_t k, std::size_t d, double R, double sigma,
                               double rho_D, double delta);

// Forgy initialization under the Laplace mechanism.
CenterSet forgy_dp_baseline(const Dataset& data, std::size_t k, double epsilon, double R,
                            std::uint64_t seed);

// ceil(m^0.4).
std::size_t gupt_blocks(std::size_t m);

/**
 * Sample-and-aggregate baseline: k-means++ plus Lloyd on each of l random
 * blocks, greedy alignment to the first block, averaging, then Laplace noise
 * with standard deviation 2 sqrt(2) k R / (l eps). blocks = 0 uses ceil(m^0.4).
 */
CenterSet gupt_style_baseline(const Dataset& data, std::size_t k, double epsilon, double R,
                              std::uint64_t seed, std::size_t blocks = 0, std::size_t lloyd_iters = 20);

std::string to_string(DpMode mode);
std::string to_string(SpreadMethod method);

}  // namespace kvariates
