#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kvariates/bench.hpp"
#include "kvariates/datagen.hpp"
#include "kvariates/distributed.hpp"
#include "kvariates/error.hpp"
#include "kvariates/privacy.hpp"
#include "kvariates/seeding.hpp"
#include "kvariates/streaming.hpp"

namespace py = pybind11;
using namespace kvariates;

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

Dataset to_dataset(const Array& x) {
    if (x.ndim() == 1) return Dataset(1, std::vector<double>(x.data(), x.data() + x.size()));
    if (x.ndim() != 2) throw InvalidArgument("expected a 1-D or 2-D array");
    return Dataset(static_cast<std::size_t>(x.shape(1)), std::vector<double>(x.data(), x.data() + x.size()));
}

Array to_array(const CenterSet& c) {
    Array out({c.size(), c.dim()});
    std::copy(c.values().begin(), c.values().end(), out.mutable_data());
    return out;
}

Array to_array(const Dataset& d) {
    Array out({d.size(), d.dim()});
    std::copy(d.values().begin(), d.values().end(), out.mutable_data());
    return out;
}

py::dict spread_dict(const SpreadReport& r) {
    py::dict d;
    d["delta_w"] = r.delta_w;
    d["delta_s"] = r.delta_s;
    d["R_l1"] = r.R_l1;
    d["R_l2_diam"] = r.R_l2_diam;
    d["k"] = r.k;
    d["method"] = to_string(r.method);
    d["n_est"] = r.n_est;
    d["epsilon"] = r.epsilon;
    d["epsilon_tilde"] = r.epsilon_tilde;
    d["sigma1"] = r.sigma1;
    d["sigma2"] = r.sigma2;
    return d;
}

}  // namespace

PYBIND11_MODULE(_kvariates, m) {
    m.doc() = "k-variates seeding: k-means++ generalized to noisy, distributed, streaming and private settings";

    py::register_exception<Error>(m, "KvariatesError", PyExc_ValueError);

    m.def("potential", [](const Array& x, const Array& c) {
        const Dataset rows = to_dataset(c);
        CenterSet centers(rows.dim());
        for (std::size_t i = 0; i < rows.size(); ++i) centers.add(rows.row(i));
        return potential(to_dataset(x), centers);
    }, py::arg("x"), py::arg("centers"));

    m.def("kmeanspp_seed", [](const Array& x, std::size_t k, std::uint64_t seed) {
        const CenterSet c = kmeanspp_seed(to_dataset(x), k, seed);
        return py::make_tuple(to_array(c), c.reference_indices());
    }, py::arg("x"), py::arg("k"), py::arg("seed") = 0);

    m.def("kvariates_seed", [](const Array& x, std::size_t k, std::uint64_t seed, double noise, bool anchor_references) {
        const Dataset data = to_dataset(x);
        SeedingConfig cfg;
        cfg.k = k;
        cfg.seed = seed;
        if (noise > 0.0) cfg.densities = laplace_densities(data, noise);
        cfg.anchor = anchor_references ? Anchor::References : Anchor::Centers;
        const CenterSet c = kvariates_seed(data, cfg);
        return py::make_tuple(to_array(c), c.reference_indices());
    }, py::arg("x"), py::arg("k"), py::arg("seed") = 0, py::arg("noise") = 0.0, py::arg("anchor_references") = false);

    m.def("brute_force_optimum", [](const Array& x, std::size_t k) {
        const OptimalClustering opt = brute_force_optimum(to_dataset(x), k);
        return py::make_tuple(to_array(opt.centers), opt.phi_opt, opt.labels);
    }, py::arg("x"), py::arg("k"));

    m.def("dkmeans", [](const Array& x, const std::vector<std::size_t>& peer_of, std::size_t k, std::uint64_t seed,
                        double noise) {
        const Dataset data = to_dataset(x);
        const PeerNetwork net(data, peer_of);
        const DistributedRun run = noise > 0.0
            ? dkmeans_private(net, k, LocalDensity::product_laplace(data.point(0), noise), seed)
            : dkmeans_protected(net, k, seed);
        py::dict d;
        d["centers"] = to_array(run.centers);
        d["data_points_shared"] = run.ledger.data_points_shared();
        d["special_scalar_receipts"] = run.ledger.special_scalar_receipts();
        d["messages"] = run.ledger.total_messages();
        d["forgy_spread"] = forgy_spread(net);
        return d;
    }, py::arg("x"), py::arg("peer_of"), py::arg("k"), py::arg("seed") = 0, py::arg("noise") = 0.0);

    m.def("skmeans", [](const Array& x, std::size_t n, std::size_t k, std::uint64_t seed, const std::string& builder) {
        const Dataset data = to_dataset(x);
        const StreamingRun run = skmeans(data, n, k, builder == "uniform" ? SynopsisBuilder::Uniform : SynopsisBuilder::Online, seed);
        return py::make_tuple(to_array(run.centers), probe_spread(data, run.synopses));
    }, py::arg("x"), py::arg("n"), py::arg("k"), py::arg("seed") = 0, py::arg("builder") = "online");

    m.def("okmeans", [](const Array& x, std::size_t k, std::uint64_t seed, std::size_t batch) {
        Dataset data = to_dataset(x);
        const MinibatchStream s = batch > 0 ? MinibatchStream::fixed(std::move(data), batch)
                                            : MinibatchStream::for_k(std::move(data), k);
        return to_array(okmeans_run(s, k, seed).centers);
    }, py::arg("x"), py::arg("k"), py::arg("seed") = 0, py::arg("batch") = 0);

    m.def("spread_report", [](const Array& x, std::size_t k, double epsilon, std::size_t n_est, std::uint64_t seed,
                              bool exact) {
        return spread_dict(spread_report(to_dataset(x), k, epsilon, exact ? SpreadMethod::Exact : SpreadMethod::Randomized,
                                         n_est, seed));
    }, py::arg("x"), py::arg("k"), py::arg("epsilon") = 1.0, py::arg("n_est") = kDefaultEstimationTrials,
       py::arg("seed") = 0, py::arg("exact") = false);

    m.def("epsilon_tilde", [](double eps, double dw, double ds, std::size_t k) {
        return epsilon_tilde(eps, dw, ds, k).value;
    }, py::arg("epsilon"), py::arg("delta_w"), py::arg("delta_s"), py::arg("k"));

    m.def("dp_kvariates", [](const Array& x, std::size_t k, double epsilon, std::uint64_t seed, const std::string& mode,
                             std::size_t n_est) {
        const Dataset data = to_dataset(x);
        const SpreadReport spread = spread_report(data, k, epsilon, SpreadMethod::Randomized, n_est, seed);
        DpConfig cfg{epsilon, DpMode::Auto, 0.0, k};
        if (mode == "calibrated") cfg.mode = DpMode::Calibrated;
        if (mode == "laplace") cfg.mode = DpMode::LaplaceMechanism;
        const DpRun run = dp_kvariates(data, cfg, spread, derive_seed(seed, 3));
        py::dict d;
        d["centers"] = to_array(run.centers);
        d["mode"] = to_string(run.mode);
        d["sigma"] = run.sigma;
        d["spread"] = spread_dict(spread);
        return d;
    }, py::arg("x"), py::arg("k"), py::arg("epsilon") = 1.0, py::arg("seed") = 0, py::arg("mode") = "auto",
       py::arg("n_est") = kDefaultEstimationTrials);

    m.def("lr_bound_rhs", &lr_bound_rhs, py::arg("delta_w"), py::arg("delta_s"), py::arg("k"), py::arg("rho"));

    m.def("gen_hyperrect", [](std::size_t d, std::size_t target_m, std::uint64_t seed) {
        HyperrectClusterSpec spec;
        spec.d = d;
        spec.target_m = target_m;
        spec.seed = seed;
        const SyntheticData gen = gen_hyperrect_clusters(spec);
        return py::make_tuple(to_array(gen.data), gen.peers.peer_of);
    }, py::arg("d"), py::arg("target_m"), py::arg("seed") = 0);

    m.def("fit_log_model", [](const std::vector<std::pair<double, double>>& pts) {
        const RegressionFit f = fit_log_model(pts);
        return py::make_tuple(f.a, f.b, f.residual_rms);
    }, py::arg("points"));
}
