#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "kvariates/density.hpp"
#include "kvariates/error.hpp"
#include "kvariates/geometry.hpp"

using namespace kvariates;

TEST_SUITE("geometry") {

TEST_CASE("points and datasets validate their invariants") {
    CHECK_THROWS_AS(Point(std::vector<double>{}), InvalidArgument);
    CHECK_THROWS_AS(Point({0.0, NAN}), InvalidArgument);
    CHECK_THROWS_AS(Dataset(2, {1.0, 2.0, 3.0}), InvalidArgument);
    CHECK_THROWS_AS(Dataset(1, {1.0, 2.0}, {1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(Dataset(std::vector<Point>{{0.0}, {0.0, 1.0}}), InvalidArgument);
    const Dataset a{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(a.size() == 2);
    CHECK(a.dim() == 2);
    CHECK(a.weight(1) == 1.0);
}

TEST_CASE("sq_dist") {
    CHECK(sq_dist(Point{0.0, 0.0}, Point{0.0, 0.0}) == 0.0);
    CHECK(sq_dist(Point{0.0, 0.0}, Point{3.0, 4.0}) == 25.0);
    CHECK_THROWS_AS(sq_dist(Point{0.0}, Point{0.0, 1.0}), InvalidArgument);

    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(5), b(5);
        for (auto& x : a) x = rng.uniform() * 4 - 2;
        for (auto& x : b) x = rng.uniform() * 4 - 2;
        double expect = 0.0;
        for (int i = 0; i < 5; ++i) expect += (a[i] - b[i]) * (a[i] - b[i]);
        CHECK(sq_dist(Point(a), Point(b)) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(sq_dist(Point(a), Point(b)) == sq_dist(Point(b), Point(a)));
    }
}

TEST_CASE("potential") {
    CHECK(potential(Dataset{{0.0, 0.0}}, CenterSet{{0.0, 0.0}}) == 0.0);
    const Dataset line{{0.0, 0.0}, {2.0, 0.0}, {4.0, 0.0}};
    CHECK(potential(line, CenterSet{{0.0, 0.0}, {4.0, 0.0}}) == 4.0);
    CHECK_THROWS_AS(potential(line, CenterSet(2)), InvalidArgument);

    const Dataset pts = testutil::random_dataset(10, 3, 17);
    const Dataset cs = testutil::random_dataset(2, 3, 18);
    const CenterSet c{cs.point(0), cs.point(1)};
    CHECK(potential(pts, c) == doctest::Approx(testutil::naive_potential(pts, c)).epsilon(1e-12));
}

TEST_CASE("adding a center never increases the potential") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Dataset pts = testutil::random_dataset(15, 2, s);
        const Dataset extra = testutil::random_dataset(5, 2, s + 100);
        CenterSet c(2);
        double last = INFINITY;
        for (std::size_t i = 0; i < extra.size(); ++i) {
            c.add(extra.row(i));
            const double phi = potential(pts, c);
            CHECK(phi <= last);
            last = phi;
        }
    }
}

TEST_CASE("centroid") {
    CHECK(centroid(Dataset{{0.0, 0.0}}) == Point{0.0, 0.0});
    CHECK(centroid(Dataset{{0.0, 0.0}, {2.0, 0.0}}) == Point{1.0, 0.0});
    CHECK(centroid(Dataset{{1.0, 1.0}, {3.0, 5.0}, {5.0, 3.0}}) == Point{3.0, 3.0});
    const Dataset w(1, {0.0, 4.0}, {3.0, 1.0});
    CHECK(centroid(w)[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(centroid(w, std::vector<std::size_t>{}), InvalidArgument);
}

TEST_CASE("brute_force_optimum examples") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 4.0});
    const auto opt = brute_force_optimum(a, 2);
    CHECK(opt.phi_opt == doctest::Approx(0.5));
    CHECK(opt.labels[0] == opt.labels[1]);
    CHECK(opt.labels[2] != opt.labels[0]);

    const Dataset distinct = testutil::random_dataset(6, 2, 3);
    CHECK(brute_force_optimum(distinct, 6).phi_opt == doctest::Approx(0.0));

    const Point c = centroid(distinct);
    double spread = 0.0;
    for (std::size_t i = 0; i < distinct.size(); ++i) spread += sq_dist(distinct.row(i), c);
    CHECK(brute_force_optimum(distinct, 1).phi_opt == doctest::Approx(spread));

    CHECK_THROWS_AS(brute_force_optimum(testutil::random_dataset(15, 1, 1), 2), GuardExceeded);
    CHECK_THROWS_AS(brute_force_optimum(a, 4), InvalidArgument);
}

TEST_CASE("brute_force_optimum matches the labelling oracle") {
    for (std::uint64_t s = 0; s < 8; ++s) {
        const Dataset a = testutil::random_dataset(7 + s % 3, 2, 40 + s);
        for (std::size_t k = 2; k <= 3; ++k) {
            const auto opt = brute_force_optimum(a, k);
            CHECK(opt.phi_opt == doctest::Approx(testutil::labelling_optimum(a, k)).epsilon(1e-9));
            CHECK(potential(a, opt.centers) <= opt.phi_opt * (1 + 1e-9));
        }
    }
}

TEST_CASE("phi_bias and phi_variance") {
    const Dataset a = Dataset::from_scalars({0.0, 1.0, 4.0});
    const auto opt = brute_force_optimum(a, 2);
    CHECK(phi_bias(a, dirac_densities(a), opt.centers) == doctest::Approx(opt.phi_opt));
    CHECK(phi_bias(a, laplace_densities(a, 0.3), opt.centers) == doctest::Approx(0.5));

    DensityList at_optimum;
    for (std::size_t i = 0; i < a.size(); ++i) {
        at_optimum.push_back(LocalDensity::dirac(opt.centers.point(nearest_center(a.row(i), opt.centers).first)));
    }
    CHECK(phi_bias(a, at_optimum, opt.centers) == 0.0);

    CHECK(phi_variance(a, dirac_densities(a)) == 0.0);
    const Dataset b = testutil::random_dataset(10, 3, 9);
    const double sigma = 0.7;
    CHECK(phi_variance(b, laplace_densities(b, sigma / std::sqrt(2.0))) == doctest::Approx(10 * 3 * sigma * sigma));
}

TEST_CASE("assembled breakdown reduces to 8 phi_opt for Dirac densities") {
    const auto b = PotentialBreakdown::assemble(2.5, 2.5, 0.0, 0.0);
    CHECK(b.Phi == doctest::Approx(8 * 2.5));
    CHECK(PotentialBreakdown::assemble(1.0, 2.0, 3.0, 0.5).Phi == doctest::Approx(8.0 + 4.0 + 6.0));
    CHECK_THROWS_AS(PotentialBreakdown::assemble(-1.0, 0.0, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("enclosing_radius") {
    const Dataset single{{3.0, -1.0}};
    CHECK(enclosing_radius(single, Norm::L1) == 0.0);
    CHECK(enclosing_radius(single, Norm::L2) == 0.0);
    CHECK(enclosing_radius(Dataset{{0.0, 0.0}, {2.0, 0.0}}, Norm::L2) == doctest::Approx(2.0));

    for (std::uint64_t s = 0; s < 10; ++s) {
        const Dataset a = testutil::random_dataset(20, 3, 70 + s);
        double l1max = 0.0, l2max = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = 0; j < a.size(); ++j) {
                double l1 = 0.0;
                for (std::size_t c = 0; c < 3; ++c) l1 += std::abs(a.row(i)[c] - a.row(j)[c]);
                l1max = std::max(l1max, l1);
                l2max = std::max(l2max, std::sqrt(sq_dist(a.row(i), a.row(j))));
            }
        }
        CHECK(enclosing_radius(a, Norm::L1) >= l1max / 2);
        CHECK(enclosing_radius(a, Norm::L2) == doctest::Approx(l2max).epsilon(1e-12));
    }
}

TEST_CASE("total_jensen") {
    const Generator sq = [](Coords x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    CHECK(total_jensen(Point{1.0}, Point{1.0}, 0.5, sq) == 0.0);
    CHECK(total_jensen(Point{0.0}, Point{2.0}, 0.5, sq) == doctest::Approx(1.0 / std::sqrt(5.0)));

    const Generator bad = [](Coords) { return INFINITY; };
    CHECK_THROWS_AS(total_jensen(Point{0.0}, Point{1.0}, 0.5, bad), InvalidArgument);
    CHECK_THROWS_AS(Distortion::total_jensen(1.0, sq), InvalidArgument);

    const Generator negentropy = [](Coords x) {
        double s = 0.0;
        for (double v : x) s += v * std::log(v);
        return s;
    };
    Rng rng(12);
    for (int rep = 0; rep < 10000; ++rep) {
        const Point a{0.1 + rng.uniform(), 0.1 + rng.uniform()};
        const Point b{0.1 + rng.uniform(), 0.1 + rng.uniform()};
        const double alpha = 0.05 + 0.9 * rng.uniform();
        const double tj = total_jensen(a, b, alpha, negentropy);
        std::vector<double> mix{alpha * a[0] + (1 - alpha) * b[0], alpha * a[1] + (1 - alpha) * b[1]};
        const double j = alpha * negentropy(a) + (1 - alpha) * negentropy(b) - negentropy(Point(mix));
        REQUIRE(tj >= 0.0);
        REQUIRE(tj <= std::max(j, 0.0) + 1e-12);
    }
}

TEST_CASE("distortion plug") {
    const Generator sq = [](Coords x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    const Distortion tj = Distortion::total_jensen(0.5, sq);
    const Dataset a = Dataset::from_scalars({0.0, 2.0});
    CHECK(potential(a, CenterSet{{2.0}}, tj) == doctest::Approx(1.0 / std::sqrt(5.0)));
}

}
