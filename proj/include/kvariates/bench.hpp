#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kvariates/io.hpp"

namespace kvariates {

// One trial: seed in, potential out.
using TrialFn = std::function<double(std::uint64_t)>;

struct TrialReport {
    std::string algorithm;
    std::string dataset;
    std::size_t k = 0;
    std::size_t trials = 0;
    double mean_potential = 0.0;
    double stdev = 0.0;  // sample standard deviation, 0 for a single trial
    std::optional<double> bound_Phi;
    std::optional<double> bound_value;  // (2 + ln k) Phi
    std::size_t violations = 0;         // trials above bound_value
    std::uint64_t base_seed = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> potentials;
};

/**
 * Runs `trials` independent trials; trial i uses derive_seed(base_seed, i).
 * With jobs > 1 trials run on worker threads; aggregation is in trial order
 * so the report does not depend on scheduling. A failing trial is rethrown
 * with its index.
 */
TrialReport run_trials(const std::string& algorithm, const std::string& dataset, std::size_t k,
                       std::size_t trials, std::uint64_t base_seed, const TrialFn& fn, std::size_t jobs = 1);

// Sets the bound fields and counts the trials above it.
void attach_bound(TrialReport& report, double Phi);

// (2 + ln k) Phi.
double bound_value(double Phi, std::size_t k);

// 100 (phi_dkm - phi_h) / phi_h.
double rho_phi(double phi_dkm, double phi_h);
// phi_h / phi_kv.
double rho_prime_phi(double phi_h, double phi_kv);

struct RegressionFit {
    double a = 0.0;
    double b = 0.0;
    double residual_rms = 0.0;
};

// Least squares of eps_tilde = a + b ln m over (m, eps_tilde) pairs.
RegressionFit fit_log_model(const std::vector<std::pair<double, double>>& points);

enum class BoundForm {
    General,          // (6 + 4 eta) phi_opt + 2 phi_bias + 2 phi_variance
    DistProtected,    // 10 phi_opt + 6 phi_forgy
    DistPrivate,      // 10 phi_opt + 4 phi_forgy + 2 phi_variance
    Streaming,        // (8 + 4 eta) phi_opt + 2 phi_probe
    Online,           // (4 + 32 / varsigma^2) phi_opt
    DpCalibrated,     // 8 (phi_opt + m R^2 / eps_tilde^2)
    DpLaplace,        // 8 (phi_opt + m k^2 R^2 / eps^2)
};

struct BoundInputs {
    std::size_t k = 0;
    std::optional<double> phi_opt, phi_bias, phi_variance, eta, phi_forgy, phi_probe, varsigma;
    std::optional<double> m, R, eps_tilde, epsilon;
};

struct BoundReport {
    double Phi = 0.0;
    double bound = 0.0;  // (2 + ln k) Phi
};

// Throws InvalidArgument naming the first missing input.
BoundReport bound_report(BoundForm form, const BoundInputs& in);

Json to_json(const TrialReport& report);
// One row per trial: trial,seed,potential.
std::string trials_csv(const TrialReport& report);
std::string to_string(BoundForm form);

}  // namespace kvariates
