#include "kvariates/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kvariates/error.hpp"
#include "kvariates/random.hpp"

namespace kvariates {

double SynopsisSet::total_count() const {
    double total = 0.0;
    for (const auto& s : entries_) total += s.count;
    return total;
}

CenterSet SynopsisSet::points() const {
    if (entries_.empty()) throw InvalidArgument("empty synopsis set");
    CenterSet out(entries_.front().point.dim());
    for (std::size_t j = 0; j < entries_.size(); ++j) out.add(entries_[j].point, {0, j, j, false});
    return out;
}

Dataset SynopsisSet::as_dataset() const {
    if (entries_.empty()) throw InvalidArgument("empty synopsis set");
    std::vector<double> values;
    std::vector<double> weights;
    for (const auto& s : entries_) {
        values.insert(values.end(), s.point.values().begin(), s.point.values().end());
        weights.push_back(s.count);
    }
    return Dataset(entries_.front().point.dim(), std::move(values), std::move(weights));
}

SynopsisSet build_synopses_online(const Dataset& stream, std::size_t n) {
    if (stream.size() == 0) throw InvalidArgument("empty stream");
    if (n == 0) throw InvalidArgument("need at least one synopsis");
    const std::size_t d = stream.dim();
    SynopsisSet out(n);
    std::vector<std::vector<double>> means;

    for (std::size_t i = 0; i < stream.size(); ++i) {
        auto a = stream.row(i);
        const double w = stream.weight(i);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < means.size(); ++j) {
            const double dist = sq_dist(a, means[j]);
            if (dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        if (means.size() < n && best_dist > 0.0) {
            means.emplace_back(a.begin(), a.end());
            out.add({Point(a), w});
            continue;
        }
        Synopsis& s = out[best];
        s.count += w;
        for (std::size_t c = 0; c < d; ++c) means[best][c] += (w / s.count) * (a[c] - means[best][c]);
        s.point = Point(means[best]);
    }
    return out;
}

SynopsisSet build_synopses_uniform(const Dataset& stream, std::size_t n, std::uint64_t seed) {
    const std::size_t m = stream.size();
    if (m == 0) throw InvalidArgument("empty stream");
    if (n == 0) throw InvalidArgument("need at least one synopsis");

    // Algorithm R.
    Rng rng(seed);
    std::vector<std::size_t> reservoir;
    for (std::size_t i = 0; i < m; ++i) {
        if (reservoir.size() < n) {
            reservoir.push_back(i);
            continue;
        }
        const std::size_t j = rng.uniform_index(i + 1);
        if (j < n) reservoir[j] = i;
    }
    std::sort(reservoir.begin(), reservoir.end());

    CenterSet picked(stream.dim());
    for (std::size_t r : reservoir) picked.add(stream.row(r));
    std::vector<double> counts(reservoir.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) counts[nearest_center(stream.row(i), picked).first] += stream.weight(i);

    SynopsisSet out(n);
    for (std::size_t j = 0; j < reservoir.size(); ++j) {
        if (counts[j] > 0.0) out.add({stream.point(reservoir[j]), counts[j]});
    }
    return out;
}

CenterSet skmeans_seed(const SynopsisSet& synopses, std::size_t k, std::uint64_t seed,
                       const DrawObserver& observer) {
    const std::size_t n = synopses.size();
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (k > n) throw InvalidArgument("k exceeds the number of live synopses");

    Rng rng(seed);
    CenterSet centers(synopses[0].point.dim());
    std::vector<double> closest(n, std::numeric_limits<double>::infinity());
    std::vector<double> weights(n);
    std::vector<double> probs(n);

    if (observer) observer(1, std::vector<double>(n, 1.0 / static_cast<double>(n)));
    std::size_t chosen = rng.uniform_index(n);
    for (std::size_t t = 1;; ++t) {
        centers.add(synopses[chosen].point, {t, chosen, chosen, false});
        if (t == k) break;
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            closest[j] = std::min(closest[j], sq_dist(synopses[j].point, synopses[chosen].point));
            weights[j] = synopses[j].count * closest[j];
            total += weights[j];
        }
        if (observer) {
            for (std::size_t j = 0; j < n; ++j) {
                probs[j] = total > 0.0 ? weights[j] / total : 1.0 / static_cast<double>(n);
            }
            observer(t + 1, probs);
        }
        chosen = draw_index(rng, weights);
    }
    return centers;
}

StreamingRun skmeans(const Dataset& stream, std::size_t n, std::size_t k, SynopsisBuilder builder,
                     std::uint64_t seed, const DrawObserver& observer) {
    StreamingRun run;
    run.synopses = builder == SynopsisBuilder::Online ? build_synopses_online(stream, n)
                                                      : build_synopses_uniform(stream, n, derive_seed(seed, 1));
    run.centers = skmeans_seed(run.synopses, k, seed, observer);
    return run;
}

double probe_spread(const Dataset& stream, const SynopsisSet& synopses) {
    const CenterSet s = synopses.points();
    double total = 0.0;
    for (std::size_t i = 0; i < stream.size(); ++i) total += stream.weight(i) * nearest_center(stream.row(i), s).second;
    return total;
}

MinibatchStream MinibatchStream::fixed(Dataset data, std::size_t batch_size) {
    if (batch_size == 0) throw InvalidArgument("batch size must be >= 1");
    std::vector<std::size_t> sizes;
    for (std::size_t done = 0; done < data.size(); done += batch_size) {
        sizes.push_back(std::min(batch_size, data.size() - done));
    }
    return from_sizes(std::move(data), sizes);
}

MinibatchStream MinibatchStream::for_k(Dataset data, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    const std::size_t b = (data.size() + k - 1) / k;
    return fixed(std::move(data), std::max<std::size_t>(b, 1));
}

MinibatchStream MinibatchStream::from_sizes(Dataset data, const std::vector<std::size_t>& sizes) {
    if (data.size() == 0) throw InvalidArgument("empty stream");
    MinibatchStream s;
    std::size_t offset = 0;
    for (std::size_t b : sizes) {
        if (b == 0) throw InvalidArgument("minibatches must be nonempty");
        s.starts_.push_back(offset);
        offset += b;
    }
    if (offset != data.size()) throw InvalidArgument("batch sizes must add up to the stream length");
    s.data_ = std::move(data);
    return s;
}

std::vector<std::size_t> MinibatchStream::batch_of() const {
    std::vector<std::size_t> out(data_.size());
    for (std::size_t j = 0; j < batches(); ++j) {
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(begin(j)),
                  out.begin() + static_cast<std::ptrdiff_t>(end(j)), j);
    }
    return out;
}

OnlineRun okmeans_run(const MinibatchStream& stream, std::size_t k, std::uint64_t seed,
                      const DrawObserver& observer) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (stream.batches() < k) throw InvalidArgument("fewer minibatches than k");
    const Dataset& data = stream.data();

    Rng rng(seed);
    OnlineRun run{CenterSet(data.dim()), stream.batches() - k};
    std::vector<double> weights;
    std::vector<double> probs;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t lo = stream.begin(j);
        const std::size_t size = stream.batch_size(j);
        std::size_t pick;
        if (j == 0) {
            if (observer) observer(1, std::vector<double>(size, 1.0 / static_cast<double>(size)));
            pick = rng.uniform_index(size);
        } else {
            weights.assign(size, 0.0);
            double total = 0.0;
            for (std::size_t i = 0; i < size; ++i) {
                weights[i] = data.weight(lo + i) * nearest_center(data.row(lo + i), run.centers).second;
                total += weights[i];
            }
            if (observer) {
                probs.assign(size, 1.0 / static_cast<double>(size));
                if (total > 0.0) {
                    for (std::size_t i = 0; i < size; ++i) probs[i] = weights[i] / total;
                }
                observer(j + 1, probs);
            }
            pick = draw_index(rng, weights);
        }
        run.centers.add(data.row(lo + pick), {j + 1, lo + pick, j, false});
    }
    return run;
}

VarsigmaEstimate estimate_varsigma(const MinibatchStream& stream, const CenterSet& optimal,
                                   std::size_t trials, std::uint64_t seed) {
    if (optimal.empty()) throw InvalidArgument("empty optimal center set");
    const Dataset& data = stream.data();
    const std::size_t m = data.size();
    const std::size_t k = optimal.size();
    const std::vector<std::size_t> batch_of = stream.batch_of();

    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t i = 0; i < m; ++i) clusters[nearest_center(data.row(i), optimal).first].push_back(i);
    std::erase_if(clusters, [](const auto& c) { return c.size() < 2; });

    VarsigmaEstimate est;
    if (clusters.empty()) {
        est.degenerate = true;
        return est;
    }

    const double diam = enclosing_radius(data, Norm::L2);
    const double r2 = diam * diam;
    for (const auto& cluster : clusters) {
        double pairs = 0.0;
        for (std::size_t x = 0; x < cluster.size(); ++x) {
            for (std::size_t y = x + 1; y < cluster.size(); ++y) pairs += sq_dist(data.row(cluster[x]), data.row(cluster[y]));
        }
        const double count = static_cast<double>(cluster.size() * (cluster.size() - 1) / 2);
        if (r2 > 0.0) est.pairwise_term = std::min(est.pairwise_term, pairs / (count * r2));
    }

    Rng rng(seed);
    std::vector<std::size_t> pool(m);
    std::vector<double> per_batch(stream.batches());
    std::vector<char> touched(stream.batches());
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t size = 1 + rng.uniform_index(std::min(k, m));
        std::iota(pool.begin(), pool.end(), 0);
        CenterSet candidates(data.dim());
        for (std::size_t s = 0; s < size; ++s) {
            const std::size_t j = s + rng.uniform_index(m - s);
            std::swap(pool[s], pool[j]);
            candidates.add(data.row(pool[s]));
        }
        for (const auto& cluster : clusters) {
            std::fill(per_batch.begin(), per_batch.end(), 0.0);
            std::fill(touched.begin(), touched.end(), 0);
            double whole = 0.0;
            for (std::size_t i : cluster) {
                const double dist = nearest_center(data.row(i), candidates).second;
                per_batch[batch_of[i]] += dist;
                touched[batch_of[i]] = 1;
                whole += dist;
            }
            if (!(whole > 0.0)) continue;
            ++est.samples;
            for (std::size_t j = 0; j < per_batch.size(); ++j) {
                if (touched[j]) est.coverage_term = std::min(est.coverage_term, per_batch[j] / whole);
            }
        }
    }
    est.varsigma = std::clamp(std::min(est.pairwise_term, est.coverage_term), 0.0, 1.0);
    est.degenerate = est.varsigma <= 0.0;
    return est;
}

}  // namespace kvariates
