#include "kvariates/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kvariates/bench.hpp"
#include "kvariates/datagen.hpp"
#include "kvariates/distributed.hpp"
#include "kvariates/error.hpp"
#include "kvariates/io.hpp"
#include "kvariates/privacy.hpp"
#include "kvariates/seeding.hpp"
#include "kvariates/streaming.hpp"

namespace kvariates {

namespace {

struct Options {
    std::string data;
    std::string out;
    std::string format = "json";
    std::string mode;
    std::string alg;
    std::string builder = "online";
    std::size_t k = 2;
    std::size_t peers = 4;
    std::size_t n = 0;
    std::size_t batch = 0;
    std::size_t trials = 30;
    std::size_t nest = kDefaultEstimationTrials;
    std::size_t jobs = 1;
    std::size_t dim = 2;
    std::size_t m = 1000;
    double epsilon = 1.0;
    double p = 0.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    bool exact = false;
    bool ledger = false;
};

std::string centers_csv(const CenterSet& centers) {
    Dataset rows(centers.dim(), centers.values());
    std::ostringstream s;
    write_csv(s, rows);
    return s.str();
}

void emit(const Options& o, std::ostream& out, const Json& j, const std::string& csv) {
    const std::string text = o.format == "csv" ? csv : j.dump(2) + "\n";
    if (o.out.empty()) {
        out << text;
    } else {
        write_text(o.out, text);
    }
}

SeedingConfig seeding_config(const Dataset& data, const Options& o) {
    SeedingConfig cfg;
    cfg.k = o.k;
    cfg.seed = o.seed;
    if (o.noise > 0.0) cfg.densities = laplace_densities(data, o.noise);
    return cfg;
}

PeerNetwork build_network(const Dataset& data, const Options& o) {
    const PeerAssignment kpp = peers_from_real(data, std::min(o.peers, data.size()), PeerOrigin::KppVoronoi,
                                               derive_seed(o.seed, 11));
    const PeerAssignment moved = migrate_points(kpp, o.p, derive_seed(o.seed, 12));
    return PeerNetwork(data, moved.peer_of);
}

DistributedRun run_dkm(const PeerNetwork& net, const Options& o, std::uint64_t seed) {
    if (o.noise > 0.0) {
        return dkmeans_private(net, o.k, LocalDensity::product_laplace(net.union_data().point(0), o.noise), seed);
    }
    return dkmeans_protected(net, o.k, seed);
}

std::size_t default_synopses(const Dataset& data, const Options& o) {
    return o.n > 0 ? o.n : std::min(data.size(), 10 * o.k);
}

MinibatchStream batches_for(const Dataset& data, const Options& o) {
    return o.batch > 0 ? MinibatchStream::fixed(data, o.batch) : MinibatchStream::for_k(data, o.k);
}

SpreadReport spread_for(const Dataset& data, const Options& o) {
    return spread_report(data, o.k, o.epsilon, o.exact ? SpreadMethod::Exact : SpreadMethod::Randomized, o.nest,
                         o.seed);
}

DpMode dp_mode(const std::string& mode) {
    if (mode == "calibrated") return DpMode::Calibrated;
    if (mode == "laplace") return DpMode::LaplaceMechanism;
    return DpMode::Auto;
}

Json run_output(const std::string& algorithm, const Dataset& data, const CenterSet& centers, const Options& o) {
    return Json{{"algorithm", algorithm},
                {"k", o.k},
                {"seed", o.seed},
                {"m", data.size()},
                {"potential", potential(data, centers)},
                {"centers", to_json(centers)}};
}

int cmd_seed(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    const CenterSet c = kvariates_seed(data, seeding_config(data, o));
    Json j = run_output("kvariates", data, c, o);
    j["noise_scale"] = o.noise;
    emit(o, out, j, centers_csv(c));
    return 0;
}

int cmd_dkm(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    const PeerNetwork net = build_network(data, o);
    const DistributedRun run = run_dkm(net, o, o.seed);
    Json j = run_output(o.noise > 0.0 ? "dkmeans-private" : "dkmeans-protected", data, run.centers, o);
    j["peers"] = net.size();
    j["migration_percent"] = o.p;
    j["forgy_spread"] = forgy_spread(net);
    Json ledger = to_json(run.ledger);
    if (!o.ledger) ledger.erase("entries");
    j["ledger"] = std::move(ledger);
    emit(o, out, j, centers_csv(run.centers));
    return 0;
}

int cmd_skm(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    const auto builder = o.builder == "uniform" ? SynopsisBuilder::Uniform : SynopsisBuilder::Online;
    const StreamingRun run = skmeans(data, default_synopses(data, o), o.k, builder, o.seed);
    Json j = run_output("skmeans", data, run.centers, o);
    j["builder"] = o.builder;
    j["synopses"] = run.synopses.size();
    j["probe_spread"] = probe_spread(data, run.synopses);
    emit(o, out, j, centers_csv(run.centers));
    return 0;
}

int cmd_okm(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    const MinibatchStream stream = batches_for(data, o);
    const OnlineRun run = okmeans_run(stream, o.k, o.seed);
    Json j = run_output("okmeans", data, run.centers, o);
    j["batches"] = stream.batches();
    j["ignored_batches"] = run.ignored_batches;
    emit(o, out, j, centers_csv(run.centers));
    return 0;
}

int cmd_dp(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    const SpreadReport spread = spread_for(data, o);
    const DpConfig cfg{o.epsilon, dp_mode(o.mode), 0.0, o.k};
    const DpRun run = dp_kvariates(data, cfg, spread, derive_seed(o.seed, 3));
    Json j = run_output("dp-kvariates", data, run.centers, o);
    j["mode"] = to_string(run.mode);
    j["sigma"] = run.sigma;
    j["phi_noise"] = run.phi_noise;
    j["spread"] = to_json(spread);
    emit(o, out, j, centers_csv(run.centers));
    return 0;
}

int cmd_estimate(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    const SpreadReport r = spread_for(data, o);
    const Json j = to_json(r);
    std::ostringstream csv;
    csv.precision(17);
    bool first = true;
    for (const auto& [key, value] : j.items()) {
        csv << (first ? "" : ",") << key;
        first = false;
    }
    csv << '\n';
    first = true;
    for (const auto& [key, value] : j.items()) {
        csv << (first ? "" : ",");
        if (value.is_string()) {
            csv << value.get<std::string>();
        } else if (!value.is_null()) {
            csv << value.dump();
        }
        first = false;
    }
    csv << '\n';
    emit(o, out, j, csv.str());
    return 0;
}

CenterSet run_baseline(const Dataset& data, const Options& o, std::uint64_t seed) {
    const double R = enclosing_radius(data, Norm::L1);
    if (o.alg == "forgy-dp") return forgy_dp_baseline(data, o.k, o.epsilon, R, seed);
    if (o.alg == "gupt") return gupt_style_baseline(data, o.k, o.epsilon, R, seed);
    return kmeans_parallel_baseline(data, o.k, seed).centers;
}

int cmd_baseline(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    const CenterSet c = run_baseline(data, o, o.seed);
    Json j = run_output(o.alg, data, c, o);
    j["epsilon"] = o.epsilon;
    emit(o, out, j, centers_csv(c));
    return 0;
}

int cmd_gen(const Options& o, std::ostream& out) {
    HyperrectClusterSpec spec;
    spec.d = o.dim;
    spec.target_m = o.m;
    spec.seed = o.seed;
    const SyntheticData gen = gen_hyperrect_clusters(spec);
    if (o.out.empty()) {
        write_csv(out, gen.data);
        return 0;
    }
    save_dataset(o.out, gen.data);
    const DatasetManifest manifest{o.out, gen.data.dim(), gen.data.size(), "hyperrect"};
    Json j = to_json(manifest);
    j["clusters"] = gen.boxes.size();
    j["seed"] = o.seed;
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
    const Dataset data = load_dataset(o.data);
    TrialFn fn;
    const std::string& alg = o.alg;
    if (alg == "kmeanspp") {
        fn = [&](std::uint64_t s) { return potential(data, kmeanspp_seed(data, o.k, s)); };
    } else if (alg == "kvariates") {
        fn = [&](std::uint64_t s) {
            SeedingConfig cfg = seeding_config(data, o);
            cfg.seed = s;
            return potential(data, kvariates_seed(data, cfg));
        };
    } else if (alg == "dkm") {
        const auto net = std::make_shared<PeerNetwork>(build_network(data, o));
        fn = [&, net](std::uint64_t s) { return potential(data, run_dkm(*net, o, s).centers); };
    } else if (alg == "skm") {
        fn = [&](std::uint64_t s) {
            return potential(data, skmeans(data, default_synopses(data, o), o.k, SynopsisBuilder::Online, s).centers);
        };
    } else if (alg == "okm") {
        const auto stream = std::make_shared<MinibatchStream>(batches_for(data, o));
        fn = [&, stream](std::uint64_t s) { return potential(data, okmeans_run(*stream, o.k, s).centers); };
    } else if (alg == "dp") {
        const auto spread = std::make_shared<SpreadReport>(spread_for(data, o));
        fn = [&, spread](std::uint64_t s) {
            const DpConfig cfg{o.epsilon, dp_mode(o.mode), 0.0, o.k};
            return potential(data, dp_kvariates(data, cfg, *spread, s).centers);
        };
    } else {
        fn = [&](std::uint64_t s) { return potential(data, run_baseline(data, o, s)); };
    }

    TrialReport report = run_trials(alg, o.data, o.k, o.trials, o.seed, fn, o.jobs);
    if ((alg == "kmeanspp" || (alg == "kvariates" && o.noise == 0.0)) && data.size() <= kBruteForceMaxPoints &&
        o.k <= data.size()) {
        const double phi_opt = brute_force_optimum(data, o.k).phi_opt;
        BoundInputs in;
        in.k = o.k;
        in.phi_opt = phi_opt;
        in.phi_bias = phi_opt;
        in.phi_variance = 0.0;
        in.eta = 0.0;
        attach_bound(report, bound_report(BoundForm::General, in).Phi);
    }
    emit(o, out, to_json(report), trials_csv(report));
    return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"k-variates seeding toolkit", "kvariates"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool needs_data) {
        if (needs_data) sub->add_option("--data", o.data, "CSV dataset")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
        sub->add_option("--out", o.out, "output file (stdout if omitted)");
        sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto with_k = [&](CLI::App* sub) { sub->add_option("--k", o.k, "number of centers")->check(CLI::PositiveNumber); };

    auto* seed = app.add_subcommand("seed", "k-variates seeding (k-means++ without noise)");
    common(seed, true);
    with_k(seed);
    seed->add_option("--noise", o.noise, "product-Laplace scale; 0 for Dirac densities");

    auto* dkm = app.add_subcommand("dkm", "distributed seeding over peers");
    common(dkm, true);
    with_k(dkm);
    dkm->add_option("--peers", o.peers, "number of peers")->check(CLI::PositiveNumber);
    dkm->add_option("--p", o.p, "migration percent")->check(CLI::Range(0.0, 100.0));
    dkm->add_option("--noise", o.noise, "product-Laplace scale of the private variant");
    dkm->add_flag("--ledger", o.ledger, "include every ledger entry");

    auto* skm = app.add_subcommand("skm", "streaming seeding over synopses");
    common(skm, true);
    with_k(skm);
    skm->add_option("--n", o.n, "number of synopses");
    skm->add_option("--builder", o.builder, "online or uniform")->check(CLI::IsMember({"online", "uniform"}));

    auto* okm = app.add_subcommand("okm", "online minibatch seeding");
    common(okm, true);
    with_k(okm);
    okm->add_option("--batch", o.batch, "minibatch size (default ceil(m/k))");

    auto* dp = app.add_subcommand("dp", "differentially private seeding");
    common(dp, true);
    with_k(dp);
    dp->add_option("--epsilon", o.epsilon, "privacy budget")->check(CLI::PositiveNumber);
    dp->add_option("--mode", o.mode, "calibrated, laplace or auto")
        ->check(CLI::IsMember({"calibrated", "laplace", "auto"}));
    dp->add_option("--nest", o.nest, "estimation trials")->check(CLI::PositiveNumber);
    dp->add_flag("--exact", o.exact, "exact spread constants (tiny data)");

    auto* est = app.add_subcommand("estimate", "spread constants and noise calibration");
    common(est, true);
    with_k(est);
    est->add_option("--epsilon", o.epsilon, "privacy budget")->check(CLI::PositiveNumber);
    est->add_option("--nest", o.nest, "estimation trials")->check(CLI::PositiveNumber);
    est->add_flag("--exact", o.exact, "exact spread constants (tiny data)");

    auto* base = app.add_subcommand("baseline", "comparison seedings");
    common(base, true);
    with_k(base);
    base->add_option("--alg", o.alg, "kmeans-par, forgy-dp or gupt")
        ->required()
        ->check(CLI::IsMember({"kmeans-par", "forgy-dp", "gupt"}));
    base->add_option("--epsilon", o.epsilon, "privacy budget")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen", "synthetic hyperrectangle clusters");
    common(gen, false);
    gen->add_option("--dim", o.dim, "dimension")->check(CLI::PositiveNumber);
    gen->add_option("--m", o.m, "target number of points")->check(CLI::PositiveNumber);

    auto* bench = app.add_subcommand("bench", "repeated trials with a report");
    common(bench, true);
    with_k(bench);
    bench->add_option("--alg", o.alg, "algorithm")
        ->required()
        ->check(CLI::IsMember({"kmeanspp", "kvariates", "dkm", "skm", "okm", "dp", "kmeans-par", "forgy-dp", "gupt"}));
    bench->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
    bench->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--peers", o.peers, "number of peers (dkm)")->check(CLI::PositiveNumber);
    bench->add_option("--p", o.p, "migration percent (dkm)")->check(CLI::Range(0.0, 100.0));
    bench->add_option("--n", o.n, "number of synopses (skm)");
    bench->add_option("--batch", o.batch, "minibatch size (okm)");
    bench->add_option("--epsilon", o.epsilon, "privacy budget")->check(CLI::PositiveNumber);
    bench->add_option("--mode", o.mode, "dp mode")->check(CLI::IsMember({"calibrated", "laplace", "auto"}));
    bench->add_option("--nest", o.nest, "estimation trials (dp)")->check(CLI::PositiveNumber);
    bench->add_option("--noise", o.noise, "product-Laplace scale (kvariates, dkm)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*seed) return cmd_seed(o, out);
        if (*dkm) return cmd_dkm(o, out);
        if (*skm) return cmd_skm(o, out);
        if (*okm) return cmd_okm(o, out);
        if (*dp) return cmd_dp(o, out);
        if (*est) return cmd_estimate(o, out);
        if (*base) return cmd_baseline(o, out);
        if (*gen) return cmd_gen(o, out);
        if (*bench) return cmd_bench(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"kvariates"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace kvariates
