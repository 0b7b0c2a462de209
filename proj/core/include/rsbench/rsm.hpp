#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <rsbench/dataset.hpp>
#include <rsbench/isotonic.hpp>
#include <rsbench/pairs.hpp>
#include <rsbench/search.hpp>

namespace rsbench {

enum class BudgetMode { range, knn };

const char* to_string(BudgetMode mode) noexcept;
BudgetMode parse_budget_mode(const std::string& s);

struct BudgetConfig {
    std::size_t budget;
    BudgetMode mode;
};

/// Returns the exact squared distance of a (query, db) pair.
using DistanceFn = std::function<double(std::int64_t query_id, std::int64_t db_id)>;

/// Exact distances recomputed from raw vectors; throws
/// ErrorKind::invalid_argument on an out-of-range id.
class ExactDistance {
   public:
    ExactDistance(const VectorDataset& queries, const VectorDataset& db);
    double operator()(std::int64_t query_id, std::int64_t db_id) const;

   private:
    const VectorDataset* queries_;
    const VectorDataset* db_;
};

/// Expected number of positives in a shortlist: Σ f(exact dist2) over its
/// pairs. The distances stored in the shortlist are ignored, so shortlists
/// from approximate indexes are scored on their true distances.
double rsm_score(const PositiveModel& model, const PairList& shortlist, const DistanceFn& exact_dist);

/// The (budget+1)-th smallest value of the stream, i.e. the threshold t such
/// that keeping values < t keeps min(budget, n) values when there are no
/// ties at t. +inf when budget >= n.
double calibrate_threshold(std::span<const float> dist2_stream, std::size_t budget);

/// Spends a verification budget over a query batch.
///  - range: the global top-B pairs by index distance, cut with the strict
///    threshold from calibrate_threshold (pairs tied at the cut are dropped).
///  - knn: k = floor(B / n_queries) results per query (clamped to the index
///    size). Throws if k == 0.
/// Output sorted by (query_id, dist2, db_id); size <= B.
PairList bulk_shortlist(const SearchIndex& index, const VectorDataset& queries, BudgetConfig config);

/// Shortlists for several budgets at once, sharing one search. Budgets of 0
/// (and knn budgets below the query count) give empty shortlists.
std::vector<PairList> bulk_shortlists(
        const SearchIndex& index,
        const VectorDataset& queries,
        std::span<const std::size_t> budgets,
        BudgetMode mode);

struct CurvePoint {
    std::size_t budget;
    double rsm;
    std::size_t realized_pairs;
};

/// Expected positives as a function of budget: one RSM estimate and realized
/// shortlist size per budget.
std::vector<CurvePoint> positive_curve(
        const PositiveModel& model,
        const SearchIndex& index,
        const VectorDataset& queries,
        const DistanceFn& exact_dist,
        std::span<const std::size_t> budgets,
        BudgetMode mode);

} // namespace rsbench
