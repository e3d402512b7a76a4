#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kvariates/density.hpp"
#include "kvariates/geometry.hpp"

namespace kvariates {

enum class RoundType { Request = 1, Broadcast = 2, Report = 3 };
enum class PayloadKind { Control, DataPoint, Scalar };

// One message of the simulated protocol. The special node has id == node count.
struct LedgerEntry {
    std::size_t iteration = 0;
    RoundType round = RoundType::Request;
    std::size_t src = 0;
    std::size_t dst = 0;
    PayloadKind payload = PayloadKind::Control;
};

/**
 * Append-only record of every message exchanged between the Forgy nodes and
 * the special node. Routing a data point to the special node throws
 * LedgerViolation.
 */
class MessageLog {
public:
    explicit MessageLog(std::size_t special_id = 0) : special_(special_id) {}

    void record(const LedgerEntry& entry);
    // One shared data point: a broadcast from `src` to every other node.
    void broadcast_point(std::size_t iteration, std::size_t src, std::size_t nodes);

    std::size_t special_id() const { return special_; }
    std::size_t messages(RoundType round) const;
    std::size_t total_messages() const { return entries_.size(); }
    std::size_t data_points_shared() const { return data_points_shared_; }
    std::size_t point_messages() const { return point_messages_; }
    std::size_t scalars_shared() const { return scalars_shared_; }
    std::size_t special_scalar_receipts() const { return special_scalars_; }
    // Peer-to-peer messages if every broadcast is counted as n^2 exchanges.
    std::size_t all_pairs_messages(std::size_t nodes) const { return data_points_shared_ * nodes * nodes; }
    const std::vector<LedgerEntry>& entries() const { return entries_; }

private:
    std::size_t special_;
    std::vector<LedgerEntry> entries_;
    std::size_t data_points_shared_ = 0;
    std::size_t point_messages_ = 0;
    std::size_t scalars_shared_ = 0;
    std::size_t special_scalars_ = 0;
};

std::string to_string(RoundType round);
std::string to_string(PayloadKind payload);

// A data-holding peer: its slice of the union dataset and the D_t cache.
struct ForgyNode {
    std::size_t id = 0;
    Dataset data;
    std::vector<std::size_t> global_index;  // row of each local point in the union
    std::vector<double> dcache;
};

/**
 * Horizontally partitioned dataset: n Forgy nodes plus the special node N*
 * that only ever sees per-node scalar totals.
 */
class PeerNetwork {
public:
    // Groups rows of `data` by `peer_of`. Empty peers are dropped and the
    // remaining ones renumbered in increasing id order.
    PeerNetwork(const Dataset& data, const std::vector<std::size_t>& peer_of);

    std::size_t size() const { return nodes_.size(); }
    const ForgyNode& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<ForgyNode>& nodes() const { return nodes_; }
    const Dataset& union_data() const { return union_; }
    std::size_t total_points() const { return union_.size(); }

private:
    Dataset union_;
    std::vector<ForgyNode> nodes_;
};

struct DistributedRun {
    CenterSet centers;
    MessageLog ledger;
    // Round-1 node probabilities for every iteration.
    std::vector<std::vector<double>> node_probabilities;
};

// Node probabilities from Round-3 totals; uniform when every total is 0.
std::vector<double> node_probabilities(std::span<const double> totals);

// Protected variant: the chosen node broadcasts a uniformly drawn local point.
DistributedRun dkmeans_protected(const PeerNetwork& net, std::size_t k, std::uint64_t seed);

// Private variant: the broadcast is a sample of `noise` recentred on the
// drawn point (Dirac or ProductLaplace templates).
DistributedRun dkmeans_private(const PeerNetwork& net, std::size_t k, const LocalDensity& noise,
                               std::uint64_t seed);

// Sum over nodes of the potential of each node's data to its own centroid.
double forgy_spread(const PeerNetwork& net);

struct KMeansParallelRun {
    CenterSet centers;
    std::size_t rounds = 0;
    std::size_t candidates = 0;
    double phi_first = 0.0;  // potential of the single uniform first center
};

/**
 * k-means|| with oversampling factor l = 2k by default and ceil(ln phi_1)
 * rounds; candidates weighted by Voronoi counts are reclustered with
 * k-means++. Tops up with uniform picks when fewer than k distinct
 * candidates were collected.
 */
KMeansParallelRun kmeans_parallel_baseline(const Dataset& data, std::size_t k, std::uint64_t seed,
                                           double oversampling = 0.0);

}  // namespace kvariates
