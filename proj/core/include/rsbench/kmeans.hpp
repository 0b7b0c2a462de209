#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <rsbench/dataset.hpp>

namespace rsbench {

/// k centroids in the data space; row i is centroid i.
struct Centroids {
    VectorDataset vectors;

    std::size_t k() const noexcept {
        return vectors.count();
    }
    std::size_t dim() const noexcept {
        return vectors.dim();
    }
};

struct KMeansResult {
    Centroids centroids;
    /// Assignment cost Σ min_c ||x - c||^2 before each Lloyd update, plus the
    /// cost of the final centroids as last element. inertia.front() is the
    /// k-means++ seeding cost. Non-increasing.
    std::vector<double> inertia;
};

/// Lloyd's algorithm from k-means++ seeding. A cluster that becomes empty is
/// re-seeded by splitting the largest cluster: it takes over that cluster's
/// point farthest from its centroid. Deterministic in seed. Throws if
/// data.count() < k or k == 0.
KMeansResult train_kmeans(const VectorDataset& data, std::size_t k, std::size_t iters, std::uint64_t seed);

/// Nearest centroid of every row (ties to the lower centroid id), with the
/// corresponding squared distances.
struct Assignment {
    std::vector<std::int64_t> labels;
    std::vector<double> dist2;
};
Assignment assign_nearest(const VectorDataset& centroids, const VectorDataset& data);

/// `n` rows drawn without replacement (in increasing row order), or all rows
/// if n >= data.count().
VectorDataset subsample(const VectorDataset& data, std::size_t n, std::uint64_t seed);

} // namespace rsbench
