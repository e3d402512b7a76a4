#include "kvariates/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kvariates/error.hpp"

namespace kvariates {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Calls fn(indices) for every r-subset of [0, n) in lexicographic order.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t r, Fn&& fn) {
    if (r > n) return;
    std::vector<std::size_t> idx(r);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        fn(std::span<const std::size_t>(idx));
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Squared distance of every point to its nearest member of `picked`.
void nearest_dists(const Dataset& data, std::span<const std::size_t> picked, std::vector<double>& out) {
    out.assign(data.size(), kInf);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t p : picked) out[i] = std::min(out[i], sq_dist(data.row(i), data.row(p)));
    }
}

// Partial Fisher-Yates: the first r entries of `pool` become a uniform r-subset.
void sample_prefix(std::vector<std::size_t>& pool, std::size_t r, Rng& rng) {
    for (std::size_t s = 0; s < r; ++s) {
        const std::size_t j = s + rng.uniform_index(pool.size() - s);
        std::swap(pool[s], pool[j]);
    }
}

void check_k(const Dataset& data, std::size_t k) {
    if (k < 2) throw InvalidArgument("spread constants need k >= 2");
    if (k > data.size()) throw InvalidArgument("k must not exceed m");
}

}  // namespace

double f_of_k(std::size_t k) { return std::pow(4.0, 2.0 * static_cast<double>(k) - 4.0); }

double delta_w_exact(const Dataset& data, std::size_t k) {
    check_k(data, k);
    if (data.size() > kDeltaExactMaxPoints) throw GuardExceeded("delta_w_exact is limited to 12 points");
    const double R = enclosing_radius(data, Norm::L2);

    // For a fixed N the worst B drops the point farthest from N.
    double best = kInf;
    std::vector<double> dist;
    for_each_combination(data.size(), k - 1, [&](std::span<const std::size_t> n) {
        nearest_dists(data, n, dist);
        double total = 0.0;
        double drop = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            total += data.weight(i) * dist[i];
            drop = std::max(drop, data.weight(i) * dist[i]);
        }
        best = std::min(best, total - drop);
    });
    if (!(best > 0.0)) throw Degenerate("delta_w is infinite: some residual potential vanishes");
    return R * R / best;
}

double delta_w_randomized(const Dataset& data, std::size_t k, std::size_t trials, std::uint64_t seed) {
    check_k(data, k);
    if (trials == 0) throw InvalidArgument("need at least one trial");
    const std::size_t m = data.size();
    const double R = enclosing_radius(data, Norm::L2);

    Rng rng(seed);
    std::vector<std::size_t> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<double> dist;
    double best = kInf;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        sample_prefix(pool, k - 1, rng);
        const std::size_t dropped = rng.uniform_index(m);
        nearest_dists(data, std::span<const std::size_t>(pool.data(), k - 1), dist);
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i != dropped) total += data.weight(i) * dist[i];
        }
        best = std::min(best, total);
    }
    if (!(best > 0.0)) throw Degenerate("delta_w is infinite: some residual potential vanishes");
    return R * R / best;
}

bool n_packed_check(const Dataset& subset, const Dataset& others) {
    if (subset.size() == 0) throw InvalidArgument("empty subset");
    const Point c = centroid(subset);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const double own = sq_dist(subset.row(i), c);
        for (std::size_t j = 0; j < others.size(); ++j) {
            if (sq_dist(subset.row(i), others.row(j)) <= own) return false;
        }
    }
    return true;
}

double delta_s_exact(const Dataset& data, std::size_t k) {
    check_k(data, k);
    const std::size_t m = data.size();
    if (m > kDeltaExactMaxPoints) throw GuardExceeded("delta_s_exact is limited to 12 points");

    double worst = 1.0;
    std::vector<double> dist;
    for (std::size_t size = 1; size < k; ++size) {
        for_each_combination(m, size, [&](std::span<const std::size_t> n) {
            nearest_dists(data, n, dist);
            double before = 0.0;
            for (std::size_t i = 0; i < m; ++i) before += data.weight(i) * dist[i];

            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < m; ++i) {
                if (std::find(n.begin(), n.end(), i) == n.end()) rest.push_back(i);
            }
            const Dataset others = data.subset(n);
            const std::size_t masks = std::size_t{1} << rest.size();
            std::vector<std::size_t> members;
            for (std::size_t mask = 1; mask < masks; ++mask) {
                members.clear();
                for (std::size_t b = 0; b < rest.size(); ++b) {
                    if (mask & (std::size_t{1} << b)) members.push_back(rest[b]);
                }
                const Dataset packed = data.subset(members);
                if (!n_packed_check(packed, others)) continue;
                const Point c = centroid(packed);
                double after = 0.0;
                for (std::size_t i = 0; i < m; ++i) after += data.weight(i) * std::min(dist[i], sq_dist(data.row(i), c));
                if (after > 0.0) {
                    worst = std::max(worst, before / after);
                } else if (before > 0.0) {
                    worst = kInf;
                }
            }
        });
    }
    return worst - 1.0;
}

double delta_s_randomized(const Dataset& data, std::size_t k, std::size_t trials, std::uint64_t seed) {
    check_k(data, k);
    const std::size_t m = data.size();
    Rng rng(seed);
    std::vector<std::size_t> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<double> dist;
    double worst = 1.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t size = 1 + rng.uniform_index(k - 1);
        sample_prefix(pool, size, rng);
        const std::size_t x = pool[size + rng.uniform_index(m - size)];
        nearest_dists(data, std::span<const std::size_t>(pool.data(), size), dist);
        double before = 0.0;
        double after = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            before += data.weight(i) * dist[i];
            after += data.weight(i) * std::min(dist[i], sq_dist(data.row(i), data.row(x)));
        }
        if (after > 0.0) worst = std::max(worst, before / after);
    }
    return worst - 1.0;
}

EpsilonTilde epsilon_tilde(double epsilon, double delta_w, double delta_s, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (!(delta_w > 0.0)) throw InvalidArgument("delta_w must be positive");
    if (!(delta_s >= 0.0)) throw InvalidArgument("delta_s must be nonnegative");

    const double km1 = static_cast<double>(k - 1);
    const double numerator = std::exp(epsilon) - std::pow(1.0 + delta_w, km1);
    EpsilonTilde out;
    if (!(numerator > 0.0)) {
        out.reason = "exp(epsilon) <= (1 + delta_w)^(k-1)";
        return out;
    }
    const double value =
        std::log(numerator) - std::log(f_of_k(k)) - std::log(delta_w) - km1 * std::log1p(delta_s);
    if (!(value > 0.0)) {
        out.reason = "eps_tilde is not positive";
        return out;
    }
    out.value = value;
    return out;
}

double sigma_calibrated(double R, double eps_tilde) {
    if (!(eps_tilde > 0.0)) throw InvalidArgument("eps_tilde must be positive");
    return 2.0 * std::sqrt(2.0) * R / eps_tilde;
}

double sigma_laplace_mechanism(double R, std::size_t k, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    return 2.0 * std::sqrt(2.0) * static_cast<double>(k) * R / epsilon;
}

Point sample_product_laplace(const Point& mu, double sigma, Rng& rng) {
    if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be nonnegative");
    std::vector<double> x = mu.values();
    if (sigma == 0.0) return mu;
    const double b = sigma / std::sqrt(2.0);
    for (double& v : x) v += rng.laplace(b);
    return Point(std::move(x));
}

SpreadReport spread_report(const Dataset& data, std::size_t k, double epsilon, SpreadMethod method,
                           std::size_t n_est, std::uint64_t seed) {
    SpreadReport r;
    r.k = k;
    r.method = method;
    r.epsilon = epsilon;
    r.R_l1 = enclosing_radius(data, Norm::L1);
    r.R_l2_diam = enclosing_radius(data, Norm::L2);
    if (method == SpreadMethod::Exact) {
        r.delta_w = delta_w_exact(data, k);
        r.delta_s = delta_s_exact(data, k);
    } else {
        r.n_est = n_est;
        r.delta_w = delta_w_randomized(data, k, n_est, derive_seed(seed, 1));
        r.delta_s = delta_s_randomized(data, k, n_est, derive_seed(seed, 2));
    }
    const EpsilonTilde et = epsilon_tilde(epsilon, r.delta_w, r.delta_s, k);
    r.epsilon_tilde = et.value;
    if (et.value) r.sigma1 = sigma_calibrated(r.R_l1, *et.value);
    r.sigma2 = sigma_laplace_mechanism(r.R_l1, k, epsilon);
    return r;
}

DpRun dp_kvariates(const Dataset& data, const DpConfig& cfg, const SpreadReport& spread, std::uint64_t seed) {
    if (cfg.k == 0) throw InvalidArgument("k must be >= 1");
    const double R = cfg.R > 0.0 ? cfg.R : spread.R_l1;
    if (!(R > 0.0)) throw Degenerate("zero enclosing radius");
    const EpsilonTilde et = epsilon_tilde(cfg.epsilon, spread.delta_w, spread.delta_s, cfg.k);
    const double m = static_cast<double>(data.size());
    const double k = static_cast<double>(cfg.k);

    DpRun run;
    bool calibrated = false;
    switch (cfg.mode) {
        case DpMode::Calibrated:
            if (!et.defined()) {
                throw Error("eps_tilde is undefined (" + et.reason +
                            "); use laplace mode, the Laplace mechanism with sigma2 = 2 sqrt(2) k R / eps");
            }
            calibrated = true;
            break;
        case DpMode::LaplaceMechanism:
            break;
        case DpMode::Auto:
            calibrated = et.defined() && *et.value > k * cfg.epsilon;
            break;
    }
    if (calibrated) {
        run.mode = DpMode::Calibrated;
        run.sigma = sigma_calibrated(R, *et.value);
        run.phi_noise = 8.0 * m * R * R / (*et.value * *et.value);
    } else {
        run.mode = DpMode::LaplaceMechanism;
        run.sigma = sigma_laplace_mechanism(R, cfg.k, cfg.epsilon);
        run.phi_noise = 8.0 * m * k * k * R * R / (cfg.epsilon * cfg.epsilon);
    }

    SeedingConfig sc;
    sc.k = cfg.k;
    sc.seed = seed;
    sc.densities = laplace_densities(data, run.sigma / std::sqrt(2.0));
    sc.anchor = Anchor::References;
    run.centers = kvariates_seed(data, sc);
    return run;
}

double likelihood_exact(const CenterSet& centers, const Dataset& data, const DensityList& densities) {
    const std::size_t m = data.size();
    const std::size_t k = centers.size();
    if (m > kLikelihoodMaxPoints || k > kLikelihoodMaxK) {
        throw GuardExceeded("likelihood_exact is limited to m <= 7 and k <= 3");
    }
    if (k == 0) throw InvalidArgument("empty center set");
    if (densities.size() != m) throw InvalidArgument("one density per point required");

    // pdf[a][c]: density of point a's local distribution at center c.
    std::vector<double> pdf(m * k);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t c = 0; c < k; ++c) pdf[a * k + c] = densities[a].pdf(data, centers.center(c));
    }

    // Sum over orderings of C of prod_i pdf[refs[i]][sigma(i)].
    auto permanent = [&](const std::vector<std::size_t>& refs) {
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        double total = 0.0;
        do {
            double p = 1.0;
            for (std::size_t i = 0; i < k; ++i) p *= pdf[refs[i] * k + perm[i]];
            total += p;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return total;
    };

    const double mass = data.total_weight();
    std::vector<std::size_t> refs;
    auto visit = [&](auto&& self, const std::vector<double>& dist, double prob) -> double {
        if (refs.size() == k) return prob * permanent(refs);
        std::vector<double> q(m);
        if (refs.empty()) {
            for (std::size_t a = 0; a < m; ++a) q[a] = data.weight(a) / mass;
        } else {
            double total = 0.0;
            for (std::size_t a = 0; a < m; ++a) total += data.weight(a) * dist[a];
            for (std::size_t a = 0; a < m; ++a) {
                q[a] = total > 0.0 ? data.weight(a) * dist[a] / total : 1.0 / static_cast<double>(m);
            }
        }
        double sum = 0.0;
        std::vector<double> next(m);
        for (std::size_t a = 0; a < m; ++a) {
            if (q[a] == 0.0) continue;
            for (std::size_t b = 0; b < m; ++b) next[b] = std::min(dist[b], sq_dist(data.row(b), data.row(a)));
            refs.push_back(a);
            sum += self(self, next, prob * q[a]);
            refs.pop_back();
        }
        return sum;
    };
    return visit(visit, std::vector<double>(m, kInf), 1.0);
}

double laplace_rho(double R, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    return std::exp(2.0 * std::sqrt(2.0) * R / sigma);
}

double lr_bound_rhs(double delta_w, double delta_s, std::size_t k, double rho) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    const double km1 = static_cast<double>(k - 1);
    return std::pow(1.0 + delta_w, km1) + f_of_k(k) * delta_w * std::pow(1.0 + delta_s, km1) * rho;
}

double large_sample_g(double m, std::size_t k, std::size_t d, double rho_2R) {
    if (!(m > 0.0) || k == 0 || d == 0) throw InvalidArgument("m, k and d must be positive");
    const double kd = static_cast<double>(k);
    const double first = 4.0 / std::pow(m, 0.25 + 1.0 / (static_cast<double>(d) + 1.0));
    const double second = std::pow(64.0 / std::pow(kd, 2.0 / static_cast<double>(d)), kd) * rho_2R / m;
    return first + second;
}

LargeSampleReport large_sample_report(double m, std::size_t k, std::size_t d, double R, double sigma,
                               double rho_D, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
    if (!(rho_D >= 1.0)) throw InvalidArgument("rho_D must be >= 1");
    if (!(R > 0.0)) throw InvalidArgument("R must be positive");
    LargeSampleReport r;
    r.g = large_sample_g(m, k, d, laplace_rho(2.0 * R, sigma));
    r.k_max = delta * delta / (4.0 * rho_D) * std::sqrt(m);
    r.condition = static_cast<double>(k) <= r.k_max * (1.0 + 1e-12);
    r.ratio_bound = 1.0 + std::pow(rho_D, static_cast<double>(k)) * r.g;
    return r;
}

CenterSet forgy_dp_baseline(const Dataset& data, std::size_t k, double epsilon, double R, std::uint64_t seed) {
    const std::size_t m = data.size();
    if (k == 0 || k > m) throw InvalidArgument("need 1 <= k <= m");
    const double sigma = sigma_laplace_mechanism(R, k, epsilon);
    Rng rng(seed);
    std::vector<std::size_t> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    sample_prefix(pool, k, rng);
    CenterSet out(data.dim());
    for (std::size_t t = 0; t < k; ++t) {
        const Point x = sample_product_laplace(data.point(pool[t]), sigma, rng);
        out.add(x, {t + 1, pool[t], std::nullopt, sigma > 0.0});
    }
    return out;
}

std::size_t gupt_blocks(std::size_t m) {
    const double l = std::ceil(std::pow(static_cast<double>(m), 0.4) - 1e-9);
    return std::max<std::size_t>(1, static_cast<std::size_t>(l));
}

CenterSet gupt_style_baseline(const Dataset& data, std::size_t k, double epsilon, double R,
                              std::uint64_t seed, std::size_t blocks, std::size_t lloyd_iters) {
    const std::size_t m = data.size();
    const std::size_t d = data.dim();
    const std::size_t l = blocks > 0 ? blocks : gupt_blocks(m);
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (m / l < k) throw InvalidArgument("GUPT blocks smaller than k");

    Rng rng(seed);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    sample_prefix(order, m, rng);

    std::vector<double> sum(k * d, 0.0);
    CenterSet reference(d);
    for (std::size_t b = 0; b < l; ++b) {
        const std::size_t lo = b * m / l;
        const std::size_t hi = (b + 1) * m / l;
        const Dataset block = data.subset(std::span<const std::size_t>(order.data() + lo, hi - lo));
        const CenterSet local = lloyd_refine(block, kmeanspp_seed(block, k, derive_seed(seed, b + 1)), lloyd_iters);
        if (b == 0) reference = local;

        // Greedy matching: repeatedly pair the closest unmatched (reference, local).
        std::vector<char> ref_used(k, 0), loc_used(k, 0);
        for (std::size_t step = 0; step < k; ++step) {
            double best = kInf;
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < k; ++i) {
                if (ref_used[i]) continue;
                for (std::size_t j = 0; j < k; ++j) {
                    if (loc_used[j]) continue;
                    const double dist = sq_dist(reference.center(i), local.center(j));
                    if (dist < best) {
                        best = dist;
                        bi = i;
                        bj = j;
                    }
                }
            }
            ref_used[bi] = loc_used[bj] = 1;
            auto c = local.center(bj);
            for (std::size_t x = 0; x < d; ++x) sum[bi * d + x] += c[x];
        }
    }

    const double sigma = sigma_laplace_mechanism(R, k, epsilon) / static_cast<double>(l);
    CenterSet out(d);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> avg(sum.begin() + static_cast<std::ptrdiff_t>(i * d),
                                sum.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
        for (double& v : avg) v /= static_cast<double>(l);
        out.add(sample_product_laplace(Point(std::move(avg)), sigma, rng), {i + 1, std::nullopt, std::nullopt, sigma > 0.0});
    }
    return out;
}

std::string to_string(DpMode mode) {
    switch (mode) {
        case DpMode::Calibrated: return "calibrated";
        case DpMode::LaplaceMechanism: return "laplace";
        case DpMode::Auto: return "auto";
    }
    return "unknown";
}

std::string to_string(SpreadMethod method) {
    return method == SpreadMethod::Exact ? "exact" : "randomized";
}

}  // namespace kvariates
