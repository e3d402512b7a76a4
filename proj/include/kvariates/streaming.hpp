#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kvariates/geometry.hpp"
#include "kvariates/seeding.hpp"

namespace kvariates {

struct Synopsis {
    Point point;
    double count = 0.0;  // stream mass summarized by this synopsis
};

// Weighted summary of a stream: at most `capacity` entries.
class SynopsisSet {
public:
    SynopsisSet() = default;
    explicit SynopsisSet(std::size_t capacity) : capacity_(capacity) {}

    void add(Synopsis s) { entries_.push_back(std::move(s)); }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Synopsis& operator[](std::size_t j) const { return entries_[j]; }
    Synopsis& operator[](std::size_t j) { return entries_[j]; }
    const std::vector<Synopsis>& entries() const { return entries_; }
    double total_count() const;

    CenterSet points() const;
    // Synopsis points weighted by their counts.
    Dataset as_dataset() const;

private:
    std::size_t capacity_ = 0;
    std::vector<Synopsis> entries_;
};

// Single pass: the first n distinct points open synopses, every later point
// moves its nearest synopsis by a running mean.
SynopsisSet build_synopses_online(const Dataset& stream, std::size_t n);

// Two passes: a uniform reservoir of n points, then Voronoi counts.
// Synopses that attract no point are dropped.
SynopsisSet build_synopses_uniform(const Dataset& stream, std::size_t n, std::uint64_t seed);

enum class SynopsisBuilder { Online, Uniform };

struct StreamingRun {
    CenterSet centers;
    SynopsisSet synopses;
};

// D^2 seeding over synopses: uniform first pick, then weights m_j D_t(s_j).
CenterSet skmeans_seed(const SynopsisSet& synopses, std::size_t k, std::uint64_t seed,
                       const DrawObserver& observer = {});

// Builds synopses of the stream and seeds k centers among them. The uniform
// builder draws from a seed derived from `seed`.
StreamingRun skmeans(const Dataset& stream, std::size_t n, std::size_t k, SynopsisBuilder builder,
                     std::uint64_t seed, const DrawObserver& observer = {});

// Sum over stream points of the squared distance to the nearest synopsis.
double probe_spread(const Dataset& stream, const SynopsisSet& synopses);

// A stream cut into consecutive nonempty minibatches.
class MinibatchStream {
public:
    // Batches of `batch_size` rows; the last one may be shorter.
    static MinibatchStream fixed(Dataset data, std::size_t batch_size);
    // Default policy: batch size ceil(m / k).
    static MinibatchStream for_k(Dataset data, std::size_t k);
    static MinibatchStream from_sizes(Dataset data, const std::vector<std::size_t>& sizes);

    const Dataset& data() const { return data_; }
    std::size_t batches() const { return starts_.size(); }
    std::size_t begin(std::size_t j) const { return starts_[j]; }
    std::size_t end(std::size_t j) const { return j + 1 < starts_.size() ? starts_[j + 1] : data_.size(); }
    std::size_t batch_size(std::size_t j) const { return end(j) - begin(j); }
    // 0-based batch index of every row.
    std::vector<std::size_t> batch_of() const;

private:
    Dataset data_;
    std::vector<std::size_t> starts_;
};

struct OnlineRun {
    CenterSet centers;
    std::size_t ignored_batches = 0;
};

// One center per minibatch: uniform in the first, then D^2 within each later
// batch against the centers chosen so far. Only the first k batches are used.
OnlineRun okmeans_run(const MinibatchStream& stream, std::size_t k, std::uint64_t seed,
                      const DrawObserver& observer = {});

struct VarsigmaEstimate {
    double varsigma = 0.0;
    double pairwise_term = 1.0;  // min over clusters of the pairwise-spread ratio
    double coverage_term = 1.0;  // min over clusters, batches and center sets
    std::size_t samples = 0;
    bool degenerate = false;
};

/**
 * Randomized upper estimate of the minibatch accuracy constant. The coverage
 * ratio is only evaluated on batches the optimal cluster intersects.
 * Candidate center sets are random subsets of the stream with 1 to k
 * points. Singleton clusters are skipped.
 */
VarsigmaEstimate estimate_varsigma(const MinibatchStream& stream, const CenterSet& optimal,
                                   std::size_t trials, std::uint64_t seed);

}  // namespace kvariates
