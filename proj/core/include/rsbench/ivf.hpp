#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <rsbench/dataset.hpp>
#include <rsbench/itq.hpp>
#include <rsbench/kmeans.hpp>
#include <rsbench/pairs.hpp>
#include <rsbench/pq.hpp>
#include <rsbench/search.hpp>

namespace rsbench {

/// Uncompressed float32 storage.
struct FlatCodec {
    friend bool operator==(const FlatCodec&, const FlatCodec&) = default;
};

using Codec = std::variant<FlatCodec, PQCodebook, ITQModel>;

/// Bytes per stored vector.
std::size_t code_size(const Codec& codec, std::size_t dim);

/// "Flat", "PQ<m>x<bits>" or "ITQ<bits>".
std::string codec_name(const Codec& codec);

/// Exhaustive nearest-centroid search.
struct ExactAssigner {
    friend bool operator==(const ExactAssigner&, const ExactAssigner&) = default;
};

/// Approximate nearest-centroid search: PQ distances to all centroids select
/// rerank_factor * nprobe candidates, which are re-ranked exactly.
struct PqApproxAssigner {
    PQCodebook prefilter;
    std::vector<std::uint8_t> centroid_codes;
    std::size_t rerank_factor = 8;

    friend bool operator==(const PqApproxAssigner&, const PqApproxAssigner&) = default;
};

using Assigner = std::variant<ExactAssigner, PqApproxAssigner>;

/// Trains the prefilter PQ on the centroids themselves and encodes them.
/// m defaults to dim / 2 (2-dimensional sub-vectors), 4 bits per code.
PqApproxAssigner make_pq_assigner(
        const Centroids& centroids,
        std::size_t rerank_factor = 8,
        std::size_t m = 0,
        int bits = 4,
        std::uint64_t seed = 0);

/// The nprobe nearest centroids of every query, nearest first (ties to the
/// lower id). Throws unless 1 <= nprobe <= k. For the PQ assigner a shortlist
/// longer than k is clamped to k.
std::vector<std::vector<std::int64_t>> coarse_assign(
        const Assigner& assigner,
        const Centroids& centroids,
        const VectorDataset& queries,
        std::size_t nprobe);

struct InvertedList {
    std::vector<std::int64_t> ids;
    std::vector<std::uint8_t> codes; // ids.size() * code_size bytes

    friend bool operator==(const InvertedList&, const InvertedList&) = default;
};

struct IVFIndex {
    Centroids centroids;
    Codec codec;
    bool residual = false;
    Assigner assigner;
    std::vector<InvertedList> lists;
    std::size_t ntotal = 0;

    std::size_t dim() const noexcept {
        return centroids.dim();
    }
    std::size_t nlist() const noexcept {
        return centroids.k();
    }
    std::size_t code_size() const {
        return rsbench::code_size(codec, dim());
    }
};

/// Assigns every db vector to its exactly nearest centroid and stores its
/// code (the raw vector, its PQ code or its ITQ bits). With residual=true the
/// PQ code is computed on x - centroid. Residual encoding is only defined for
/// PQ; residual with ITQ throws.
IVFIndex build_ivf(
        const VectorDataset& db,
        Centroids centroids,
        Codec codec,
        bool residual,
        Assigner assigner = ExactAssigner{});

/// Reconstructs a stored vector (exact for flat). Throws for ITQ.
std::vector<float> reconstruct(const IVFIndex& index, std::size_t list_no, std::size_t offset);

struct KnnSearch {
    std::size_t k;
};
struct RangeSearch {
    double r2;
};
/// Every candidate of the visited partitions.
struct CollectSearch {};

using SearchMode = std::variant<KnnSearch, RangeSearch, CollectSearch>;

/// Searches the nprobe nearest partitions of each query. Distances are codec
/// distances: exact for flat, asymmetric table lookups for PQ (exact query
/// against the coded vector), Hamming between the encoded query and the
/// stored bits for ITQ. Output sorted by (query_id, dist2, db_id).
PairList ivf_search(const IVFIndex& index, const VectorDataset& queries, const SearchMode& mode, std::size_t nprobe);

/// An IVF index at a fixed nprobe, usable for bulk shortlists.
class IvfSearcher final : public SearchIndex {
   public:
    IvfSearcher(const IVFIndex& index, std::size_t nprobe);

    std::size_t dim() const override {
        return index_->dim();
    }
    std::size_t size() const override {
        return index_->ntotal;
    }
    PairList knn(const VectorDataset& queries, std::size_t k) const override;
    PairList smallest_pairs(const VectorDataset& queries, std::size_t n) const override;

   private:
    const IVFIndex* index_;
    std::size_t nprobe_;
};

} // namespace rsbench
