#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "kvariates/error.hpp"
#include "kvariates/privacy.hpp"

using namespace kvariates;

namespace {

// max over (N, x) of phi(N) / phi(N + x), minus 1; N of size 1..k-1, x outside N.
double delta_s_pairs_oracle(const std::vector<double>& xs, std::size_t k) {
    const std::size_t m = xs.size();
    double worst = 1.0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (size >= k) continue;
        for (std::size_t x = 0; x < m; ++x) {
            if (mask & (1u << x)) continue;
            double before = 0, after = 0;
            for (std::size_t i = 0; i < m; ++i) {
                double best = INFINITY;
                for (std::size_t j = 0; j < m; ++j) {
                    if (mask & (1u << j)) best = std::min(best, (xs[i] - xs[j]) * (xs[i] - xs[j]));
                }
                before += best;
                after += std::min(best, (xs[i] - xs[x]) * (xs[i] - xs[x]));
            }
            if (after > 0) worst = std::max(worst, before / after);
        }
    }
    return worst - 1.0;
}

double laplace_pdf(double x, double mu, double b) { return std::exp(-std::abs(x - mu) / b) / (2 * b); }

}  // namespace

TEST_SUITE("privacy") {

TEST_CASE("delta_w") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 2.0});
    CHECK(delta_w_exact(a, 2) == doctest::Approx(4.0));
    CHECK(delta_w_randomized(a, 2, 5000, 1) == doctest::Approx(4.0));
    CHECK_THROWS_AS(delta_w_exact(Dataset::from_scalars({3.0, 3.0}), 2), Degenerate);
    CHECK_THROWS_AS(delta_w_exact(testutil::random_dataset(13, 1, 0), 2), GuardExceeded);

    for (std::uint64_t s = 0; s < 10; ++s) {
        const Dataset b = testutil::random_dataset(9, 2, 50 + s);
        const double exact = delta_w_exact(b, 3);
        CHECK(exact >= delta_w_randomized(b, 3, 50, s) * (1 - 1e-12));
        CHECK(exact == doctest::Approx(delta_w_randomized(b, 3, 20000, s)));
    }
}

TEST_CASE("delta_w estimates grow toward the exact value with more samples") {
    const Dataset b = testutil::random_dataset(40, 2, 60);
    double few = 0, many = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        few += delta_w_randomized(b, 3, 10, s);
        many += delta_w_randomized(b, 3, 500, s);
    }
    CHECK(many >= few);
}

TEST_CASE("delta_s") {
    const std::vector<double> xs{0.0, 1.0, 100.0};
    const Dataset a = Dataset::from_scalars(xs);
    const double oracle = delta_s_pairs_oracle(xs, 2);
    CHECK(oracle == doctest::Approx(19800.0));
    CHECK(delta_s_randomized(a, 2, 5000, 3) == doctest::Approx(oracle));
    // Packed subsets may hold several points: N = {100}, S = {0, 1}.
    CHECK(delta_s_exact(a, 2) == doctest::Approx(39601.0));

    CHECK(delta_s_randomized(Dataset::from_scalars({2.0, 2.0, 2.0}), 2, 100, 0) == 0.0);
    CHECK(delta_s_exact(Dataset::from_scalars({2.0, 2.0, 2.0}), 2) == 0.0);

    for (std::uint64_t s = 0; s < 10; ++s) {
        const Dataset b = testutil::random_dataset(8, 1, 70 + s);
        std::vector<double> bx(b.values());
        const double est = delta_s_randomized(b, 3, 4000, s);
        CHECK(est >= 0.0);
        CHECK(est == doctest::Approx(delta_s_pairs_oracle(bx, 3)));
        CHECK(delta_s_exact(b, 3) >= est * (1 - 1e-12));
    }
}

TEST_CASE("N-packed check") {
    const Dataset others = Dataset::from_scalars({0.0, 10.0});
    CHECK(n_packed_check(Dataset::from_scalars({20.0, 20.5}), others));
    CHECK_FALSE(n_packed_check(Dataset::from_scalars({1.0, 9.0}), others));
    CHECK(n_packed_check(Dataset::from_scalars({4.0}), others));
}

TEST_CASE("epsilon tilde") {
    const auto et = epsilon_tilde(1.0, 0.001, 1.0, 2);
    REQUIRE(et.defined());
    CHECK(*et.value == doctest::Approx(std::log((std::exp(1.0) - 1.001) / 0.002)));
    CHECK(*et.value == doctest::Approx(6.755).epsilon(1e-3));
    CHECK(f_of_k(2) == 1.0);
    CHECK(f_of_k(3) == 16.0);
    CHECK(f_of_k(4) == 256.0);

    const auto bad = epsilon_tilde(1.0, 100.0, 1.0, 2);
    CHECK_FALSE(bad.defined());
    CHECK_FALSE(bad.reason.empty());

    CHECK(*epsilon_tilde(2.0, 0.001, 1.0, 2).value > *et.value);
    CHECK(*epsilon_tilde(1.0, 0.002, 1.0, 2).value < *et.value);
    CHECK(*epsilon_tilde(1.0, 0.001, 2.0, 2).value < *et.value);
}

TEST_CASE("noise calibration") {
    const double et = std::log((std::exp(1.0) - 1.001) / 0.002);
    CHECK(sigma_calibrated(1.0, et) == doctest::Approx(0.4187).epsilon(1e-3));
    CHECK(sigma_laplace_mechanism(1.0, 2, 1.0) == doctest::Approx(4 * std::sqrt(2.0)));
    CHECK(sigma_calibrated(1.0, 5.0) < sigma_laplace_mechanism(1.0, 2, 2.0));
}

TEST_CASE("product Laplace moments") {
    Rng rng(4);
    const Point mu{1.0, -2.0};
    const double sigma = 0.8;
    CHECK(sample_product_laplace(mu, 0.0, rng) == mu);
    const int n = 100000;
    double s0 = 0, q0 = 0, s1 = 0;
    for (int i = 0; i < n; ++i) {
        const Point x = sample_product_laplace(mu, sigma, rng);
        s0 += x[0];
        q0 += (x[0] - mu[0]) * (x[0] - mu[0]);
        s1 += x[1];
    }
    CHECK(std::abs(s0 / n - mu[0]) < 0.05 * sigma);
    CHECK(std::abs(s1 / n - mu[1]) < 0.05 * sigma);
    CHECK(q0 / n == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("spread report and DP seeding") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 2.0});
    const auto rep = spread_report(a, 2, 1.0, SpreadMethod::Exact, 0, 0);
    CHECK(rep.delta_w == doctest::Approx(4.0));
    CHECK_FALSE(rep.epsilon_tilde.has_value());
    CHECK_FALSE(rep.sigma1.has_value());
    CHECK(rep.sigma2 == doctest::Approx(sigma_laplace_mechanism(rep.R_l1, 2, 1.0)));

    DpConfig cfg;
    cfg.k = 2;
    cfg.epsilon = 1.0;
    cfg.mode = DpMode::Calibrated;
    try {
        dp_kvariates(a, cfg, rep, 0);
        FAIL("calibrated mode should refuse");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("sigma2") != std::string::npos);
        CHECK(msg.find("laplace") != std::string::npos);
    }
    cfg.mode = DpMode::Auto;
    const auto run = dp_kvariates(a, cfg, rep, 0);
    CHECK(run.mode == DpMode::LaplaceMechanism);
    CHECK(run.sigma == doctest::Approx(rep.sigma2));
    CHECK(run.centers.size() == 2);
    CHECK(run.phi_noise == doctest::Approx(8.0 * 3 * 4 * rep.R_l1 * rep.R_l1));

    SpreadReport tight = rep;
    tight.delta_w = 0.001;
    tight.delta_s = 1.0;
    cfg.R = 1.0;
    cfg.mode = DpMode::Calibrated;
    const auto cal = dp_kvariates(a, cfg, tight, 0);
    CHECK(cal.sigma == doctest::Approx(0.4187).epsilon(1e-3));
    cfg.mode = DpMode::Auto;
    CHECK(dp_kvariates(a, cfg, tight, 0).mode == DpMode::Calibrated);
}

TEST_CASE("exact likelihood: small cases") {
    const Dataset two = Dataset::from_scalars({0.0, 1.0});
    CHECK(likelihood_exact(CenterSet{{0.0}}, two, dirac_densities(two)) == doctest::Approx(0.5));
    const double b = 0.7;
    const double c = 0.3;
    CHECK(likelihood_exact(CenterSet{{c}}, two, laplace_densities(two, b)) ==
          doctest::Approx(0.5 * (laplace_pdf(c, 0.0, b) + laplace_pdf(c, 1.0, b))));
    CHECK_THROWS_AS(likelihood_exact(CenterSet{{0.0}}, testutil::random_dataset(8, 1, 0),
                                     dirac_densities(testutil::random_dataset(8, 1, 0))),
                    GuardExceeded);
}

TEST_CASE("exact likelihood matches sampling frequencies with Dirac densities") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 3.0, 7.0});
    const auto dens = dirac_densities(a);
    std::map<std::pair<std::size_t, std::size_t>, double> freq;
    const int n = 200000;
    SeedingConfig cfg;
    cfg.k = 2;
    cfg.densities = dens;
    cfg.anchor = Anchor::References;
    for (int s = 0; s < n; ++s) {
        cfg.seed = static_cast<std::uint64_t>(s);
        auto refs = kvariates_seed(a, cfg).reference_indices();
        freq[{std::min(refs[0], refs[1]), std::max(refs[0], refs[1])}] += 1.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double p = likelihood_exact(CenterSet{a.point(i), a.point(j)}, a, dens);
            total += p;
            const double sd = std::sqrt(p * (1 - p) / n);
            CHECK(std::abs(freq[{i, j}] / n - p) < 5 * sd + 1e-9);
        }
    }
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("exact likelihood matches binned sampling frequencies with Laplace densities") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 4.0});
    const double b = 0.5;
    const auto dens = laplace_densities(a, b);
    // Event: one center in [-0.5, 0.5], the other in [3.5, 4.5].
    const double lo1 = -0.5, hi1 = 0.5, lo2 = 3.5, hi2 = 4.5;
    const int grid = 60;
    const double h1 = (hi1 - lo1) / grid, h2 = (hi2 - lo2) / grid;
    double integral = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double x = lo1 + (i + 0.5) * h1, y = lo2 + (j + 0.5) * h2;
            integral += likelihood_exact(CenterSet{{x}, {y}}, a, dens) * h1 * h2;
        }
    }
    SeedingConfig cfg;
    cfg.k = 2;
    cfg.densities = dens;
    cfg.anchor = Anchor::References;
    const int n = 200000;
    double hits = 0;
    for (int s = 0; s < n; ++s) {
        cfg.seed = static_cast<std::uint64_t>(s);
        const auto c = kvariates_seed(a, cfg);
        const double u = std::min(c.center(0)[0], c.center(1)[0]);
        const double v = std::max(c.center(0)[0], c.center(1)[0]);
        if (u >= lo1 && u <= hi1 && v >= lo2 && v <= hi2) hits += 1;
    }
    const double p = hits / n;
    const double sd = std::sqrt(integral * (1 - integral) / n);
    CHECK(integral > 0.05);
    CHECK(std::abs(p - integral) < 5 * sd + 2e-3);
}

TEST_CASE("likelihood ratio bound") {
    CHECK(lr_bound_rhs(0.001, 1.0, 2, 100.0) == doctest::Approx(1.201));
    CHECK(lr_bound_rhs(1e-12, 1.0, 3, 10.0) == doctest::Approx(1.0));
    CHECK(lr_bound_rhs(0.3, 2.0, 2, 5.0) == doctest::Approx(1.3 + 0.3 * 3.0 * 5.0));
    CHECK(laplace_rho(1.0, 2.0 * std::sqrt(2.0)) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("large-sample likelihood bound") {
    CHECK(large_sample_g(1e4, 2, 2, 10.0) == doctest::Approx(4.0 / std::pow(10.0, 7.0 / 3.0) + 1.024));
    CHECK(large_sample_g(1e4, 2, 2, 10.0) == doctest::Approx(1.042566).epsilon(1e-5));
    CHECK(large_sample_g(1e12, 2, 2, 10.0) < 1e-6);
    CHECK(large_sample_g(1e7, 2, 2, 10.0) < large_sample_g(1e5, 2, 2, 10.0));

    // k_max = (0.25^2 / 4) * 128 = 2 exactly.
    const auto at = large_sample_report(16384.0, 2, 2, 1.0, 1.0, 1.0, 0.25);
    CHECK(at.k_max == doctest::Approx(2.0));
    CHECK(at.condition);
    CHECK_FALSE(large_sample_report(16384.0, 3, 2, 1.0, 1.0, 1.0, 0.25).condition);
    CHECK(at.ratio_bound == doctest::Approx(1.0 + at.g));
    CHECK_THROWS_AS(large_sample_report(100.0, 2, 2, 1.0, 1.0, 1.0, 0.6), InvalidArgument);
}

TEST_CASE("Forgy DP baseline") {
    const Dataset a = testutil::random_dataset(20, 2, 90);
    const auto exact = forgy_dp_baseline(a, 3, 1e15, 1.0, 0);
    for (std::size_t t = 0; t < 3; ++t) {
        const std::size_t ref = *exact.provenance(t).reference;
        CHECK(sq_dist(exact.center(t), a.row(ref)) < 1e-20);
    }
    CHECK_THROWS_AS(forgy_dp_baseline(a, 21, 1.0, 1.0, 0), InvalidArgument);

    const Dataset origin = Dataset::from_scalars({0.0, 0.0, 0.0});
    const double sigma = sigma_laplace_mechanism(1.0, 1, 2.0);
    double sq = 0;
    const int n = 10000;
    for (int s = 0; s < n; ++s) {
        const double x = forgy_dp_baseline(origin, 1, 2.0, 1.0, static_cast<std::uint64_t>(s)).center(0)[0];
        sq += x * x;
    }
    CHECK(sq / n == doctest::Approx(sigma * sigma).epsilon(0.1));
}

TEST_CASE("sample-and-aggregate baseline") {
    CHECK(gupt_blocks(100000) == 100);
    CHECK(gupt_blocks(1) == 1);
    CHECK(gupt_blocks(32) == 4);

    Rng rng(3);
    std::vector<double> v;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < 30; ++i) v.push_back(20.0 * c + rng.uniform());
    }
    const Dataset a(1, v);
    const auto one = gupt_style_baseline(a, 2, 1e15, 1.0, 0, 1);
    const auto again = lloyd_refine(a, one, 10);
    CHECK(again.values()[0] == doctest::Approx(one.values()[0]));
    CHECK(again.values()[1] == doctest::Approx(one.values()[1]));

    const Dataset flat(1, std::vector<double>(40, 5.0));
    const double sigma2 = sigma_laplace_mechanism(1.0, 2, 1.0);
    double sq1 = 0, sq4 = 0;
    const int n = 4000;
    for (int s = 0; s < n; ++s) {
        const double x1 = gupt_style_baseline(flat, 2, 1.0, 1.0, static_cast<std::uint64_t>(s), 1).center(0)[0] - 5.0;
        const double x4 = gupt_style_baseline(flat, 2, 1.0, 1.0, static_cast<std::uint64_t>(s), 4).center(0)[0] - 5.0;
        sq1 += x1 * x1;
        sq4 += x4 * x4;
    }
    CHECK(sq1 / n == doctest::Approx(sigma2 * sigma2).epsilon(0.1));
    CHECK(sq1 / sq4 == doctest::Approx(16.0).epsilon(0.15));
    CHECK_THROWS_AS(gupt_style_baseline(flat, 20, 1.0, 1.0, 0, 4), InvalidArgument);
}

}
