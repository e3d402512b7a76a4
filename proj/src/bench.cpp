#include "kvariates/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "kvariates/error.hpp"
#include "kvariates/random.hpp"

namespace kvariates {

TrialReport run_trials(const std::string& algorithm, const std::string& dataset, std::size_t k,
                       std::size_t trials, std::uint64_t base_seed, const TrialFn& fn, std::size_t jobs) {
    if (trials == 0) throw InvalidArgument("need at least one trial");
    TrialReport r;
    r.algorithm = algorithm;
    r.dataset = dataset;
    r.k = k;
    r.trials = trials;
    r.base_seed = base_seed;
    r.seeds.resize(trials);
    r.potentials.resize(trials);
    for (std::size_t i = 0; i < trials; ++i) r.seeds[i] = derive_seed(base_seed, i);

    std::vector<std::exception_ptr> errors(trials);
    auto work = [&](std::size_t i) {
        try {
            r.potentials[i] = fn(r.seeds[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, trials));
    if (jobs == 1) {
        for (std::size_t i = 0; i < trials; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < trials; i = next++) work(i);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < trials; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw Error("trial " + std::to_string(i) + ": " + e.what());
        }
    }

    double sum = 0.0;
    for (double p : r.potentials) sum += p;
    r.mean_potential = sum / static_cast<double>(trials);
    if (trials > 1) {
        double sq = 0.0;
        for (double p : r.potentials) sq += (p - r.mean_potential) * (p - r.mean_potential);
        r.stdev = std::sqrt(sq / static_cast<double>(trials - 1));
    }
    return r;
}

double bound_value(double Phi, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    return (2.0 + std::log(static_cast<double>(k))) * Phi;
}

void attach_bound(TrialReport& report, double Phi) {
    report.bound_Phi = Phi;
    report.bound_value = bound_value(Phi, report.k);
    report.violations = 0;
    for (double p : report.potentials) {
        if (p > *report.bound_value) ++report.violations;
    }
}

double rho_phi(double phi_dkm, double phi_h) {
    if (phi_h == 0.0) throw InvalidArgument("reference potential is 0");
    return 100.0 * (phi_dkm - phi_h) / phi_h;
}

double rho_prime_phi(double phi_h, double phi_kv) {
    if (phi_kv == 0.0) throw InvalidArgument("k-variates potential is 0");
    return phi_h / phi_kv;
}

RegressionFit fit_log_model(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw InvalidArgument("need at least 3 points");
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [m, e] : points) {
        if (!(m > 0.0)) throw InvalidArgument("m must be positive");
        sx += std::log(m);
        sy += e;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [m, e] : points) {
        const double dx = std::log(m) - mx;
        sxx += dx * dx;
        sxy += dx * (e - my);
    }
    if (!(sxx > 1e-12)) throw InvalidArgument("degenerate design: all m equal");

    RegressionFit fit;
    fit.b = sxy / sxx;
    fit.a = my - fit.b * mx;
    double rss = 0.0;
    for (const auto& [m, e] : points) {
        const double res = e - (fit.a + fit.b * std::log(m));
        rss += res * res;
    }
    fit.residual_rms = std::sqrt(rss / n);
    return fit;
}

namespace {

double need(const std::optional<double>& v, const char* name) {
    if (!v) throw InvalidArgument(std::string("missing bound input: ") + name);
    return *v;
}

}  // namespace

BoundReport bound_report(BoundForm form, const BoundInputs& in) {
    if (in.k == 0) throw InvalidArgument("missing bound input: k");
    const double phi_opt = need(in.phi_opt, "phi_opt");
    BoundReport r;
    switch (form) {
        case BoundForm::General:
            r.Phi = (6.0 + 4.0 * need(in.eta, "eta")) * phi_opt + 2.0 * need(in.phi_bias, "phi_bias") +
                    2.0 * need(in.phi_variance, "phi_variance");
            break;
        case BoundForm::DistProtected:
            r.Phi = 10.0 * phi_opt + 6.0 * need(in.phi_forgy, "phi_forgy");
            break;
        case BoundForm::DistPrivate:
            r.Phi = 10.0 * phi_opt + 4.0 * need(in.phi_forgy, "phi_forgy") +
                    2.0 * need(in.phi_variance, "phi_variance");
            break;
        case BoundForm::Streaming:
            r.Phi = (8.0 + 4.0 * need(in.eta, "eta")) * phi_opt + 2.0 * need(in.phi_probe, "phi_probe");
            break;
        case BoundForm::Online: {
            const double s = need(in.varsigma, "varsigma");
            if (!(s > 0.0)) throw InvalidArgument("varsigma must be positive");
            r.Phi = (4.0 + 32.0 / (s * s)) * phi_opt;
            break;
        }
        case BoundForm::DpCalibrated: {
            const double m = need(in.m, "m"), R = need(in.R, "R"), et = need(in.eps_tilde, "eps_tilde");
            r.Phi = 8.0 * (phi_opt + m * R * R / (et * et));
            break;
        }
        case BoundForm::DpLaplace: {
            const double m = need(in.m, "m"), R = need(in.R, "R"), eps = need(in.epsilon, "epsilon");
            const double k = static_cast<double>(in.k);
            r.Phi = 8.0 * (phi_opt + m * k * k * R * R / (eps * eps));
            break;
        }
    }
    r.bound = bound_value(r.Phi, in.k);
    return r;
}

Json to_json(const TrialReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return Json{{"algorithm", r.algorithm},
                {"dataset", r.dataset},
                {"k", r.k},
                {"trials", r.trials},
                {"mean_potential", r.mean_potential},
                {"stdev", r.stdev},
                {"bound_Phi", opt(r.bound_Phi)},
                {"bound_value", opt(r.bound_value)},
                {"violations", r.violations},
                {"base_seed", r.base_seed},
                {"seeds", r.seeds}};
}

std::string trials_csv(const TrialReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "trial,seed,potential\n";
    for (std::size_t i = 0; i < r.trials; ++i) out << i << ',' << r.seeds[i] << ',' << r.potentials[i] << '\n';
    return out.str();
}

std::string to_string(BoundForm form) {
    switch (form) {
        case BoundForm::General: return "general";
        case BoundForm::DistProtected: return "dist-protected";
        case BoundForm::DistPrivate: return "dist-private";
        case BoundForm::Streaming: return "streaming";
        case BoundForm::Online: return "online";
        case BoundForm::DpCalibrated: return "dp-calibrated";
        case BoundForm::DpLaplace: return "dp-laplace";
    }
    return "unknown";
}

}  // namespace kvariates
