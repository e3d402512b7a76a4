#include "kvariates/datagen.hpp"

#include <numeric>

#include "kvariates/error.hpp"
#include "kvariates/random.hpp"
#include "kvariates/seeding.hpp"

namespace kvariates {

SyntheticData gen_hyperrect_clusters(const HyperrectClusterSpec& spec) {
    if (spec.d == 0) throw InvalidArgument("dimension must be >= 1");
    if (spec.target_m == 0 || spec.max_points_per_cluster == 0) throw InvalidArgument("sizes must be >= 1");
    if (!(spec.edge_max > 0.0) || !(spec.corner_hi >= spec.corner_lo)) throw InvalidArgument("bad box law");

    Rng rng(spec.seed);
    SyntheticData out;
    std::vector<double> values;
    std::size_t m = 0;
    while (m < spec.target_m) {
        Hyperrect box;
        for (std::size_t j = 0; j < spec.d; ++j) {
            const double corner = spec.corner_lo + (spec.corner_hi - spec.corner_lo) * rng.uniform();
            const double edge = spec.edge_max * (1.0 - rng.uniform());
            box.lo.push_back(corner);
            box.hi.push_back(corner + edge);
        }
        box.count = 1 + rng.uniform_index(spec.max_points_per_cluster);
        for (std::size_t i = 0; i < box.count; ++i) {
            for (std::size_t j = 0; j < spec.d; ++j) values.push_back(box.lo[j] + (box.hi[j] - box.lo[j]) * rng.uniform());
            out.peers.peer_of.push_back(out.boxes.size());
        }
        m += box.count;
        out.boxes.push_back(std::move(box));
    }
    out.data = Dataset(spec.d, std::move(values));
    out.peers.peers = out.boxes.size();
    out.peers.origin = PeerOrigin::TrueCluster;
    return out;
}

PeerAssignment migrate_points(const PeerAssignment& assign, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 100.0)) throw InvalidArgument("p must lie in [0, 100]");
    if (assign.peers == 0) throw InvalidArgument("no peers");
    Rng rng(seed);
    PeerAssignment out = assign;
    for (auto& peer : out.peer_of) {
        if (rng.uniform() < p / 100.0) peer = rng.uniform_index(assign.peers);
    }
    return out;
}

PeerAssignment peers_from_real(const Dataset& data, std::size_t n, PeerOrigin mode, std::uint64_t seed) {
    const std::size_t m = data.size();
    if (n == 0 || n > m) throw InvalidArgument("need 1 <= N <= m");
    if (mode == PeerOrigin::TrueCluster) throw InvalidArgument("true clusters are not derived from data");

    CenterSet centers(data.dim());
    if (mode == PeerOrigin::KppVoronoi) {
        centers = kmeanspp_seed(data, n, seed);
    } else {
        Rng rng(seed);
        std::vector<std::size_t> pool(m);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t s = 0; s < n; ++s) {
            std::swap(pool[s], pool[s + rng.uniform_index(m - s)]);
            centers.add(data.row(pool[s]));
        }
    }

    PeerAssignment out;
    out.origin = mode;
    out.peer_of.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.peer_of[i] = nearest_center(data.row(i), centers).first;

    std::vector<std::size_t> renumber(n, n);
    for (std::size_t peer : out.peer_of) renumber[peer] = 0;
    for (auto& id : renumber) {
        if (id == 0) id = out.peers++;
    }
    for (auto& peer : out.peer_of) peer = renumber[peer];
    return out;
}

}  // namespace kvariates
