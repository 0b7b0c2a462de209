#pragma once

#include <cstddef>

#include <rsbench/dataset.hpp>
#include <rsbench/pairs.hpp>

namespace rsbench {

/// Exact k nearest neighbors of every query. Ties are broken by ascending
/// db_id; output is sorted by (query_id, dist2, db_id) with exactly k entries
/// per query. Throws if dims differ or k > db.count().
PairList brute_force_knn(const VectorDataset& queries, const VectorDataset& db, std::size_t k);

/// All pairs with dist2 < r2 (strict), sorted by (query_id, dist2, db_id).
PairList brute_force_range(const VectorDataset& queries, const VectorDataset& db, double r2);

/// Fraction of queries whose first approximate result is the exact nearest
/// neighbor. Both lists sorted by query; `exact` holds each query's true
/// nearest neighbor first.
double recall_at_1(const PairList& approx, const PairList& exact, std::size_t n_queries);

/// Anything that can produce shortlists for bulk filtering. Distances are
/// whatever the index natively reports (exact, PQ, Hamming).
class SearchIndex {
   public:
    virtual ~SearchIndex() = default;

    virtual std::size_t dim() const = 0;
    virtual std::size_t size() const = 0;

    /// Up to k results per query, sorted by (query_id, dist2, db_id).
    virtual PairList knn(const VectorDataset& queries, std::size_t k) const = 0;

    /// The n smallest candidate pairs over the whole query batch, sorted by
    /// (dist2, query_id, db_id). Fewer if the index surfaces fewer candidates.
    virtual PairList smallest_pairs(const VectorDataset& queries, std::size_t n) const = 0;
};

/// Brute-force search over a database held by reference.
class ExactIndex final : public SearchIndex {
   public:
    explicit ExactIndex(const VectorDataset& db) : db_(&db) {}

    std::size_t dim() const override {
        return db_->dim();
    }
    std::size_t size() const override {
        return db_->count();
    }
    PairList knn(const VectorDataset& queries, std::size_t k) const override;
    PairList smallest_pairs(const VectorDataset& queries, std::size_t n) const override;

   private:
    const VectorDataset* db_;
};

} // namespace rsbench
