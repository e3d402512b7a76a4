#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kvariates/geometry.hpp"

namespace kvariates {

// Clusters drawn uniformly in random axis-aligned boxes, appended until the
// target size is reached.
struct HyperrectClusterSpec {
    std::size_t d = 10;
    std::size_t target_m = 20000;
    std::size_t max_points_per_cluster = 1000;
    double corner_lo = 0.0;  // box corners uniform in [corner_lo, corner_hi]^d
    double corner_hi = 10.0;
    double edge_max = 2.0;   // edge lengths uniform in (0, edge_max]
    std::uint64_t seed = 0;
};

struct Hyperrect {
    std::vector<double> lo;
    std::vector<double> hi;
    std::size_t count = 0;
};

enum class PeerOrigin { TrueCluster, KppVoronoi, ForgyVoronoi };

struct PeerAssignment {
    std::vector<std::size_t> peer_of;
    std::size_t peers = 0;
    PeerOrigin origin = PeerOrigin::TrueCluster;
};

struct SyntheticData {
    Dataset data;
    PeerAssignment peers;  // peer = generating cluster
    std::vector<Hyperrect> boxes;
};

SyntheticData gen_hyperrect_clusters(const HyperrectClusterSpec& spec);

// Each point moves with probability p percent to a uniformly drawn peer
// (possibly its own).
PeerAssignment migrate_points(const PeerAssignment& assign, double p, std::uint64_t seed);

// N peer centers picked by k-means++ (KppVoronoi) or uniformly (ForgyVoronoi),
// then 1-NN cells. Empty cells are removed and peers renumbered.
PeerAssignment peers_from_real(const Dataset& data, std::size_t n, PeerOrigin mode, std::uint64_t seed);

}  // namespace kvariates
