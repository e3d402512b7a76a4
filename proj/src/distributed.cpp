#include "kvariates/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "kvariates/error.hpp"
#include "kvariates/random.hpp"
#include "kvariates/seeding.hpp"

namespace kvariates {

void MessageLog::record(const LedgerEntry& entry) {
    if (entry.dst == special_ && entry.payload == PayloadKind::DataPoint) {
        throw LedgerViolation("data point routed to the special node");
    }
    entries_.push_back(entry);
    if (entry.payload == PayloadKind::DataPoint) ++point_messages_;
    if (entry.payload == PayloadKind::Scalar) {
        ++scalars_shared_;
        if (entry.dst == special_) ++special_scalars_;
    }
}

void MessageLog::broadcast_point(std::size_t iteration, std::size_t src, std::size_t nodes) {
    for (std::size_t dst = 0; dst < nodes; ++dst) {
        if (dst == src) continue;
        record({iteration, RoundType::Broadcast, src, dst, PayloadKind::DataPoint});
    }
    ++data_points_shared_;
}

std::size_t MessageLog::messages(RoundType round) const {
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                  [&](const auto& e) { return e.round == round; }));
}

std::string to_string(RoundType round) {
    switch (round) {
        case RoundType::Request: return "request";
        case RoundType::Broadcast: return "broadcast";
        case RoundType::Report: return "report";
    }
    return "unknown";
}

std::string to_string(PayloadKind payload) {
    switch (payload) {
        case PayloadKind::Control: return "control";
        case PayloadKind::DataPoint: return "point";
        case PayloadKind::Scalar: return "scalar";
    }
    return "unknown";
}

PeerNetwork::PeerNetwork(const Dataset& data, const std::vector<std::size_t>& peer_of) : union_(data) {
    if (peer_of.size() != data.size()) throw InvalidArgument("one peer id per point required");
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < peer_of.size(); ++i) groups[peer_of[i]].push_back(i);
    std::size_t id = 0;
    for (auto& [peer, members] : groups) {
        ForgyNode node;
        node.id = id++;
        node.data = data.subset(members);
        node.global_index = std::move(members);
        node.dcache.assign(node.global_index.size(), std::numeric_limits<double>::infinity());
        nodes_.push_back(std::move(node));
    }
}

std::vector<double> node_probabilities(std::span<const double> totals) {
    const double sum = std::accumulate(totals.begin(), totals.end(), 0.0);
    std::vector<double> p(totals.size(), 1.0 / static_cast<double>(totals.size()));
    if (sum > 0.0) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = totals[i] / sum;
    }
    return p;
}

namespace {

DistributedRun run_protocol(const PeerNetwork& net, std::size_t k, const LocalDensity* noise,
                            std::uint64_t seed) {
    const std::size_t n = net.size();
    if (n == 0) throw InvalidArgument("peer network has no nodes");
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (noise && noise->kind() == LocalDensity::Kind::UniformOnSubset) {
        throw InvalidArgument("noise template must be Dirac or ProductLaplace");
    }

    Rng rng(seed);
    DistributedRun run{CenterSet(net.union_data().dim()), MessageLog(n), {}};
    std::vector<std::vector<double>> dcache;
    for (const auto& node : net.nodes()) dcache.push_back(node.dcache);
    std::vector<double> totals(n, 0.0);

    for (std::size_t t = 1; t <= k; ++t) {
        // Round 1: N* picks a node and asks it for a center.
        std::size_t chosen;
        if (t == 1) {
            run.node_probabilities.emplace_back(n, 1.0 / static_cast<double>(n));
            chosen = rng.uniform_index(n);
        } else {
            run.node_probabilities.push_back(node_probabilities(totals));
            chosen = draw_index(rng, totals);
        }
        run.ledger.record({t, RoundType::Request, n, chosen, PayloadKind::Control});

        // Round 2: the node draws a local point uniformly and broadcasts it.
        const ForgyNode& node = net.node(chosen);
        const std::size_t local = rng.uniform_index(node.data.size());
        Point x = node.data.point(local);
        const bool noisy = noise && noise->kind() == LocalDensity::Kind::ProductLaplace;
        if (noisy) x = LocalDensity::product_laplace(x, noise->scale()).sample(node.data, rng);
        run.ledger.broadcast_point(t, chosen, n);
        run.centers.add(x.coords(), {t, node.global_index[local], chosen, noisy});

        // Round 3: every node refreshes its cache and reports one scalar to N*.
        for (std::size_t i = 0; i < n; ++i) {
            const ForgyNode& peer = net.node(i);
            double total = 0.0;
            for (std::size_t j = 0; j < peer.data.size(); ++j) {
                dcache[i][j] = std::min(dcache[i][j], sq_dist(peer.data.row(j), x.coords()));
                total += peer.data.weight(j) * dcache[i][j];
            }
            totals[i] = total;
            run.ledger.record({t, RoundType::Report, i, n, PayloadKind::Scalar});
        }
    }
    return run;
}

}  // namespace

DistributedRun dkmeans_protected(const PeerNetwork& net, std::size_t k, std::uint64_t seed) {
    return run_protocol(net, k, nullptr, seed);
}

DistributedRun dkmeans_private(const PeerNetwork& net, std::size_t k, const LocalDensity& noise,
                               std::uint64_t seed) {
    return run_protocol(net, k, &noise, seed);
}

double forgy_spread(const PeerNetwork& net) {
    double total = 0.0;
    for (const auto& node : net.nodes()) {
        const Point c = centroid(node.data);
        for (std::size_t j = 0; j < node.data.size(); ++j) {
            total += node.data.weight(j) * sq_dist(node.data.row(j), c);
        }
    }
    return total;
}

KMeansParallelRun kmeans_parallel_baseline(const Dataset& data, std::size_t k, std::uint64_t seed,
                                           double oversampling) {
    const std::size_t m = data.size();
    if (k == 0 || m < k) throw InvalidArgument("need 1 <= k <= m");
    const double ell = oversampling > 0.0 ? oversampling : 2.0 * static_cast<double>(k);

    Rng rng(seed);
    KMeansParallelRun run;
    std::vector<char> is_candidate(m, 0);
    std::vector<std::size_t> candidates;
    std::vector<double> closest(m, std::numeric_limits<double>::infinity());
    auto absorb = [&](std::size_t c) {
        is_candidate[c] = 1;
        candidates.push_back(c);
    };
    auto refresh = [&](std::span<const std::size_t> fresh) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t c : fresh) closest[i] = std::min(closest[i], sq_dist(data.row(i), data.row(c)));
        }
    };
    auto phi = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += data.weight(i) * closest[i];
        return s;
    };

    absorb(rng.uniform_index(m));
    refresh(candidates);
    run.phi_first = phi();
    run.rounds = run.phi_first > 1.0 ? static_cast<std::size_t>(std::ceil(std::log(run.phi_first))) : 1;

    for (std::size_t r = 0; r < run.rounds; ++r) {
        const double current = phi();
        if (!(current > 0.0)) break;
        std::vector<std::size_t> fresh;
        for (std::size_t i = 0; i < m; ++i) {
            const double p = std::min(1.0, ell * data.weight(i) * closest[i] / current);
            if (rng.uniform() < p && !is_candidate[i]) {
                absorb(i);
                fresh.push_back(i);
            }
        }
        refresh(fresh);
    }
    run.candidates = candidates.size();

    // Uniform top-up when oversampling produced too few candidates.
    if (candidates.size() < k) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_candidate[i]) rest.push_back(i);
        }
        while (candidates.size() < k) {
            const std::size_t j = rng.uniform_index(rest.size());
            absorb(rest[j]);
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }

    // Voronoi weights of the candidates.
    CenterSet cand_set(data.dim());
    for (std::size_t c : candidates) cand_set.add(data.row(c));
    std::vector<double> mass(candidates.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) mass[nearest_center(data.row(i), cand_set).first] += data.weight(i);

    std::vector<double> values;
    std::vector<double> weights;
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (mass[c] <= 0.0) continue;
        auto r = data.row(candidates[c]);
        values.insert(values.end(), r.begin(), r.end());
        weights.push_back(mass[c]);
        kept.push_back(candidates[c]);
    }
    const Dataset weighted(data.dim(), std::move(values), std::move(weights));
    const std::size_t reclustered = std::min(k, weighted.size());
    const CenterSet chosen = kmeanspp_seed(weighted, reclustered, derive_seed(seed, 1));

    run.centers = CenterSet(data.dim());
    for (std::size_t c = 0; c < chosen.size(); ++c) {
        const std::size_t ref = kept[*chosen.provenance(c).reference];
        run.centers.add(chosen.center(c), {c + 1, ref, std::nullopt, false});
    }
    // Duplicate points can leave fewer weighted candidates than k.
    for (std::size_t t = run.centers.size(); t < k; ++t) {
        const std::size_t ref = rng.uniform_index(m);
        run.centers.add(data.row(ref), {t + 1, ref, std::nullopt, false});
    }
    return run;
}

}  // namespace kvariates
