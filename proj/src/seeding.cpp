#include "kvariates/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kvariates/error.hpp"

namespace kvariates {

ProbeFunction ProbeFunction::nearest_synopsis(CenterSet synopses) {
    if (synopses.empty()) throw InvalidArgument("nearest-synopsis probe needs synopses");
    ProbeFunction p;
    p.kind_ = Kind::NearestSynopsis;
    p.synopses_ = std::move(synopses);
    return p;
}

ProbeFunction ProbeFunction::minibatch_gate(std::vector<std::size_t> batch_of) {
    ProbeFunction p;
    p.kind_ = Kind::MinibatchGate;
    p.iteration_aware_ = true;
    p.batch_of_ = std::move(batch_of);
    return p;
}

ProbeFunction ProbeFunction::custom(Map map, bool iteration_aware) {
    if (!map) throw InvalidArgument("custom probe needs a map");
    ProbeFunction p;
    p.kind_ = Kind::Custom;
    p.iteration_aware_ = iteration_aware;
    p.map_ = std::move(map);
    return p;
}

std::vector<double> ProbeFunction::images(const Dataset& data, std::size_t t,
                                          const CenterSet& current) const {
    const std::size_t d = data.dim();
    std::vector<double> out = data.values();
    switch (kind_) {
        case Kind::Identity:
            break;
        case Kind::NearestSynopsis:
            if (synopses_.dim() != d) throw InvalidArgument("synopsis dimension mismatch");
            for (std::size_t i = 0; i < data.size(); ++i) {
                auto s = synopses_.center(nearest_center(data.row(i), synopses_).first);
                std::copy(s.begin(), s.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
            }
            break;
        case Kind::MinibatchGate:
            if (batch_of_.size() != data.size()) throw InvalidArgument("one batch id per point");
            if (current.empty()) break;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (batch_of_[i] + 1 == t) continue;
                auto c = current.center(nearest_center(data.row(i), current).first);
                std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
            }
            break;
        case Kind::Custom:
            for (std::size_t i = 0; i < data.size(); ++i) {
                const Point p = map_(i, data.row(i), t);
                if (p.dim() != d) throw InvalidArgument("custom probe changed the dimension");
                std::copy(p.values().begin(), p.values().end(),
                          out.begin() + static_cast<std::ptrdiff_t>(i * d));
            }
            break;
    }
    return out;
}

namespace {

std::vector<double> normalized(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> p(weights.size());
    if (total > 0.0) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights[i] / total;
    } else {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    }
    return p;
}

std::size_t first_pick(const Dataset& data, Rng& rng, std::size_t t, const DrawObserver& observer) {
    const std::size_t m = data.size();
    if (data.weighted()) {
        if (observer) observer(t, normalized(data.weights()));
        return draw_index(rng, data.weights());
    }
    if (observer) observer(t, std::vector<double>(m, 1.0 / static_cast<double>(m)));
    return rng.uniform_index(m);
}

}  // namespace

CenterSet kvariates_seed(const Dataset& data, const SeedingConfig& cfg, const DrawObserver& observer) {
    const std::size_t m = data.size();
    const std::size_t d = data.dim();
    if (m == 0) throw InvalidArgument("empty dataset");
    if (cfg.k == 0) throw InvalidArgument("k must be >= 1");
    const bool dirac = cfg.densities.empty();
    if (!dirac && cfg.densities.size() != m) throw InvalidArgument("one density per point required");
    if (dirac && cfg.k > m) throw InvalidArgument("k must not exceed m with Dirac densities");

    Rng rng(cfg.seed);
    const bool identity = cfg.probe.kind() == ProbeFunction::Kind::Identity;
    std::vector<double> images;
    if (!identity && !cfg.probe.iteration_aware()) images = cfg.probe.images(data, 1, CenterSet(d));
    auto image = [&](std::size_t i) -> Coords {
        return identity ? data.row(i) : Coords(images.data() + i * d, d);
    };

    CenterSet centers(d);
    CenterSet anchors(d);
    std::vector<double> dist(m, std::numeric_limits<double>::infinity());
    std::vector<double> weights(m);

    for (std::size_t t = 1; t <= cfg.k; ++t) {
        std::size_t idx;
        if (t == 1) {
            idx = first_pick(data, rng, t, observer);
        } else {
            if (cfg.probe.iteration_aware()) {
                images = cfg.probe.images(data, t, centers);
                for (std::size_t i = 0; i < m; ++i) dist[i] = nearest_center(image(i), anchors, cfg.distortion).second;
            }
            for (std::size_t i = 0; i < m; ++i) weights[i] = data.weight(i) * dist[i];
            if (observer) observer(t, normalized(weights));
            idx = draw_index(rng, weights);
        }

        const Point x = dirac ? data.point(idx) : cfg.densities[idx].sample(data, rng);
        const bool noisy = !dirac && cfg.densities[idx].kind() != LocalDensity::Kind::Dirac;
        centers.add(x.coords(), {t, idx, std::nullopt, noisy});
        const Coords anchor = cfg.anchor == Anchor::Centers ? x.coords() : data.row(idx);
        anchors.add(anchor);

        if (!cfg.probe.iteration_aware()) {
            for (std::size_t i = 0; i < m; ++i) dist[i] = std::min(dist[i], cfg.distortion(image(i), anchor));
        }
    }
    return centers;
}

CenterSet kmeanspp_seed(const Dataset& data, std::size_t k, std::uint64_t seed,
                        const DrawObserver& observer) {
    const std::size_t m = data.size();
    if (m == 0) throw InvalidArgument("empty dataset");
    if (k == 0 || k > m) throw InvalidArgument("need 1 <= k <= m");

    Rng rng(seed);
    CenterSet centers(data.dim());
    std::vector<double> closest(m, std::numeric_limits<double>::infinity());
    std::vector<double> weights(m);
    std::size_t chosen = first_pick(data, rng, 1, observer);
    for (std::size_t t = 1;; ++t) {
        centers.add(data.row(chosen), {t, chosen, std::nullopt, false});
        if (t == k) break;
        for (std::size_t i = 0; i < m; ++i) {
            closest[i] = std::min(closest[i], sq_dist(data.row(i), data.row(chosen)));
            weights[i] = data.weight(i) * closest[i];
        }
        if (observer) observer(t + 1, normalized(weights));
        chosen = draw_index(rng, weights);
    }
    return centers;
}

CenterSet lloyd_refine(const Dataset& data, const CenterSet& centers, std::size_t iters) {
    if (centers.empty()) throw InvalidArgument("empty center set");
    if (centers.dim() != data.dim()) throw InvalidArgument("dimension mismatch");
    const std::size_t m = data.size();
    const std::size_t k = centers.size();
    const std::size_t d = data.dim();

    std::vector<double> current = centers.values();
    std::vector<std::size_t> labels(m, k);
    for (std::size_t it = 0; it < iters; ++it) {
        bool changed = false;
        CenterSet view(d);
        for (std::size_t c = 0; c < k; ++c) view.add(Coords(current.data() + c * d, d));
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t label = nearest_center(data.row(i), view).first;
            changed = changed || label != labels[i];
            labels[i] = label;
        }
        if (!changed) break;

        std::vector<double> sums(k * d, 0.0);
        std::vector<double> mass(k, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double w = data.weight(i);
            auto r = data.row(i);
            for (std::size_t j = 0; j < d; ++j) sums[labels[i] * d + j] += w * r[j];
            mass[labels[i]] += w;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (mass[c] == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) current[c * d + j] = sums[c * d + j] / mass[c];
        }
    }

    CenterSet out(d);
    for (std::size_t c = 0; c < k; ++c) out.add(Coords(current.data() + c * d, d), centers.provenance(c));
    return out;
}

std::optional<double> stretch_ratio(const Dataset& data, std::span<const double> images,
                                    std::span<const std::size_t> cluster, std::size_t anchor,
                                    const CenterSet& candidates) {
    const std::size_t d = data.dim();
    auto image = [&](std::size_t i) { return Coords(images.data() + i * d, d); };

    double raw_c = 0.0, raw_a = 0.0, probed_c = 0.0, probed_a = 0.0;
    for (std::size_t i : cluster) {
        const double w = data.weight(i);
        raw_c += w * nearest_center(data.row(i), candidates).second;
        raw_a += w * sq_dist(data.row(i), data.row(anchor));
        probed_c += w * nearest_center(image(i), candidates).second;
        probed_a += w * sq_dist(image(i), image(anchor));
    }
    if (probed_a == 0.0 || raw_a == 0.0) return std::nullopt;
    const double lhs = raw_c / raw_a;
    if (probed_c == 0.0) {
        return lhs > 0.0 ? std::optional<double>(std::numeric_limits<double>::infinity())
                         : std::optional<double>(0.0);
    }
    return lhs / (probed_c / probed_a);
}

EtaEstimate estimate_eta(const Dataset& data, const ProbeFunction& probe, const CenterSet& optimal,
                         std::size_t trials, std::uint64_t seed) {
    if (optimal.empty()) throw InvalidArgument("empty optimal center set");
    const std::size_t m = data.size();
    const std::size_t k = optimal.size();

    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t i = 0; i < m; ++i) clusters[nearest_center(data.row(i), optimal).first].push_back(i);
    std::erase_if(clusters, [](const auto& c) { return c.empty(); });

    const std::vector<double> images = probe.images(data, 1, CenterSet(data.dim()));
    Rng rng(seed);
    EtaEstimate est;
    double worst = 1.0;
    std::vector<std::size_t> pool(m);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto& cluster = clusters[rng.uniform_index(clusters.size())];
        const std::size_t anchor = cluster[rng.uniform_index(cluster.size())];

        // Random subset of the data with 1..k elements (partial Fisher-Yates).
        const std::size_t size = 1 + rng.uniform_index(std::min(k, m));
        std::iota(pool.begin(), pool.end(), 0);
        CenterSet candidates(data.dim());
        for (std::size_t s = 0; s < size; ++s) {
            const std::size_t j = s + rng.uniform_index(m - s);
            std::swap(pool[s], pool[j]);
            candidates.add(data.row(pool[s]));
        }

        const auto ratio = stretch_ratio(data, images, cluster, anchor, candidates);
        if (!ratio) {
            ++est.skipped;
            continue;
        }
        ++est.valid_samples;
        worst = std::max(worst, *ratio);
    }
    est.degenerate = est.valid_samples == 0;
    est.eta = est.degenerate ? 0.0 : worst - 1.0;
    return est;
}

}  // namespace kvariates
