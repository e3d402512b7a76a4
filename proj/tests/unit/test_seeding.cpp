#include <cmath>
#include <map>
#include <memory>

#include "doctest.h"
#include "helpers.hpp"
#include "kvariates/density.hpp"
#include "kvariates/error.hpp"
#include "kvariates/seeding.hpp"

using namespace kvariates;

namespace {

struct Trace {
    std::vector<std::vector<double>> probs;
    DrawObserver observer() {
        return [this](std::size_t, std::span<const double> p) { probs.emplace_back(p.begin(), p.end()); };
    }
};

// Independent stretch ratio over every cluster, anchor and candidate subset of size 1..k.
double exhaustive_eta(const Dataset& a, const std::vector<Point>& images, const CenterSet& optimal) {
    const std::size_t m = a.size();
    const std::size_t k = optimal.size();
    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t i = 0; i < m; ++i) clusters[nearest_center(a.row(i), optimal).first].push_back(i);
    auto nearest = [](Coords x, const std::vector<Point>& cs) {
        double best = INFINITY;
        for (const auto& c : cs) best = std::min(best, sq_dist(x, c));
        return best;
    };
    double worst = 1.0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
        std::vector<Point> cand;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) cand.push_back(a.point(i));
        }
        for (const auto& cl : clusters) {
            for (std::size_t anchor : cl) {
                double rc = 0, ra = 0, pc = 0, pa = 0;
                for (std::size_t i : cl) {
                    rc += nearest(a.row(i), cand);
                    ra += sq_dist(a.row(i), a.row(anchor));
                    pc += nearest(images[i], cand);
                    pa += sq_dist(images[i], images[anchor]);
                }
                if (ra == 0 || pa == 0) continue;
                if (pc == 0) {
                    if (rc > 0) return INFINITY;
                    continue;
                }
                worst = std::max(worst, (rc / ra) / (pc / pa));
            }
        }
    }
    return worst - 1.0;
}

}  // namespace

TEST_SUITE("seeding") {

TEST_CASE("single point and k = m") {
    const Dataset one{{2.0, 3.0}};
    SeedingConfig cfg;
    cfg.k = 1;
    const auto c = kvariates_seed(one, cfg);
    REQUIRE(c.size() == 1);
    CHECK(c.point(0) == Point{2.0, 3.0});

    const Dataset a = testutil::random_dataset(9, 2, 4);
    for (std::uint64_t s = 0; s < 10; ++s) {
        cfg.k = 9;
        cfg.seed = s;
        CHECK(potential(a, kvariates_seed(a, cfg)) == 0.0);
        CHECK(potential(a, kmeanspp_seed(a, 9, s)) == 0.0);
    }
    cfg.k = 10;
    CHECK_THROWS_AS(kvariates_seed(a, cfg), InvalidArgument);
    CHECK_THROWS_AS(kmeanspp_seed(a, 0, 0), InvalidArgument);
}

TEST_CASE("Dirac densities and identity probe reduce to k-means++") {
    for (int weighted = 0; weighted < 2; ++weighted) {
        Dataset a = testutil::random_dataset(40, 3, 77);
        if (weighted) {
            std::vector<double> w(40);
            for (std::size_t i = 0; i < 40; ++i) w[i] = 1.0 + static_cast<double>(i % 5);
            a = Dataset(3, a.values(), w);
        }
        for (std::uint64_t s = 0; s < 25; ++s) {
            SeedingConfig cfg;
            cfg.k = 6;
            cfg.seed = s;
            Trace tk, tp;
            const auto kv = kvariates_seed(a, cfg, tk.observer());
            const auto pp = kmeanspp_seed(a, 6, s, tp.observer());
            CHECK(kv.reference_indices() == pp.reference_indices());
            CHECK(kv.values() == pp.values());
            REQUIRE(tk.probs.size() == tp.probs.size());
            for (std::size_t t = 0; t < tk.probs.size(); ++t) {
                for (std::size_t i = 0; i < tk.probs[t].size(); ++i) {
                    CHECK(tk.probs[t][i] == doctest::Approx(tp.probs[t][i]).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("expected potential stays under the k-means++ guarantee") {
    const Dataset a = testutil::random_dataset(12, 2, 101);
    const std::size_t k = 3;
    const double opt = brute_force_optimum(a, k).phi_opt;
    double sum = 0.0;
    const int runs = 2000;
    for (int s = 0; s < runs; ++s) {
        SeedingConfig cfg;
        cfg.k = k;
        cfg.seed = static_cast<std::uint64_t>(s);
        sum += potential(a, kvariates_seed(a, cfg));
    }
    CHECK(sum / runs <= 8.0 * (2.0 + std::log(3.0)) * opt);
}

TEST_CASE("first pick is uniform") {
    const Dataset a = Dataset::from_scalars({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    std::vector<double> counts(10, 0.0);
    const int n = 100000;
    for (int s = 0; s < n; ++s) {
        SeedingConfig cfg;
        cfg.k = 1;
        cfg.seed = static_cast<std::uint64_t>(s);
        counts[kvariates_seed(a, cfg).reference_indices()[0]] += 1;
    }
    double chi = 0.0;
    for (double c : counts) chi += (c - n / 10.0) * (c - n / 10.0) / (n / 10.0);
    CHECK(chi < 27.88);  // 9 dof, p = 0.001
}

TEST_CASE("second pick follows D^2 probabilities") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 3.0});
    Trace tr;
    for (std::uint64_t s = 0; s < 50; ++s) {
        tr.probs.clear();
        const auto c = kmeanspp_seed(a, 2, s, tr.observer());
        if (c.reference_indices()[0] != 0) continue;
        REQUIRE(tr.probs.size() == 2);
        CHECK(tr.probs[1][0] == 0.0);
        CHECK(tr.probs[1][1] == doctest::Approx(0.1));
        CHECK(tr.probs[1][2] == doctest::Approx(0.9));
    }
}

TEST_CASE("all-zero weights fall back to uniform") {
    const Dataset a = Dataset::from_scalars({5.0, 5.0, 5.0});
    Trace tr;
    const auto c = kmeanspp_seed(a, 3, 1, tr.observer());
    CHECK(c.size() == 3);
    for (double p : tr.probs[2]) CHECK(p == doctest::Approx(1.0 / 3));
}

TEST_CASE("densities drive the emitted centers") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 10.0, 11.0});
    const std::vector<std::size_t> group{0, 0, 1, 1};
    SeedingConfig cfg;
    cfg.k = 2;
    cfg.densities = uniform_subset_densities(a, group);
    for (std::uint64_t s = 0; s < 50; ++s) {
        cfg.seed = s;
        const auto c = kvariates_seed(a, cfg);
        for (std::size_t j = 0; j < c.size(); ++j) {
            const std::size_t ref = *c.provenance(j).reference;
            const double x = c.center(j)[0];
            const bool ok = group[ref] == 0 ? (x == 0.0 || x == 1.0) : (x == 10.0 || x == 11.0);
            CHECK(ok);
            CHECK(c.provenance(j).noisy);
        }
    }

    cfg.densities = laplace_densities(a, 0.5);
    cfg.k = 6;  // k may exceed m with continuous densities
    CHECK(kvariates_seed(a, cfg).size() == 6);
    cfg.densities.pop_back();
    CHECK_THROWS_AS(kvariates_seed(a, cfg), InvalidArgument);
}

TEST_CASE("Lloyd refinement") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 4.0});
    const auto c = lloyd_refine(a, CenterSet{{0.9}, {4.1}}, 10);
    CHECK(c.center(0)[0] == doctest::Approx(0.5));
    CHECK(c.center(1)[0] == doctest::Approx(4.0));
    CHECK(potential(a, c) == doctest::Approx(0.5));

    const auto kept = lloyd_refine(a, CenterSet{{0.0}, {100.0}}, 5);
    CHECK(kept.center(1)[0] == 100.0);
}

TEST_CASE("eta estimates") {
    const Dataset a = testutil::random_dataset(10, 2, 8);
    const auto opt = brute_force_optimum(a, 2);
    const auto id = estimate_eta(a, ProbeFunction::identity(), opt.centers, 500, 1);
    CHECK(id.eta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(id.degenerate);

    const auto constant = ProbeFunction::custom([](std::size_t, Coords, std::size_t) { return Point{0.0, 0.0}; }, false);
    const auto cst = estimate_eta(a, constant, opt.centers, 100, 1);
    CHECK(cst.degenerate);
    CHECK(cst.eta == 0.0);
    CHECK(cst.skipped == 100);

    const Dataset small = Dataset::from_scalars({0.0, 1.0, 5.0, 7.0});
    const auto sopt = brute_force_optimum(small, 2);
    const CenterSet syn{{0.0}, {1.5}, {6.0}};
    const auto probe = ProbeFunction::nearest_synopsis(syn);
    std::vector<Point> images;
    for (std::size_t i = 0; i < small.size(); ++i) images.push_back(syn.point(nearest_center(small.row(i), syn).first));
    const double oracle = exhaustive_eta(small, images, sopt.centers);
    const auto est = estimate_eta(small, probe, sopt.centers, 5000, 3);
    CHECK(est.eta == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(est.eta >= 0.0);
}

}
