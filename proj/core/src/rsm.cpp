#include <rsbench/rsm.hpp>

#include <algorithm>
#include <limits>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>

namespace rsbench {

const char* to_string(BudgetMode mode) noexcept {
    return mode == BudgetMode::range ? "range" : "knn";
}

BudgetMode parse_budget_mode(const std::string& s) {
    if (s == "range") {
        return BudgetMode::range;
    }
    if (s == "knn") {
        return BudgetMode::knn;
    }
    throw_error(ErrorKind::config, "unknown budget mode '" + s + "' (expected range or knn)");
}

ExactDistance::ExactDistance(const VectorDataset& queries, const VectorDataset& db)
        : queries_(&queries), db_(&db) {
    RSBENCH_CHECK(
            queries.dim() == db.dim(), invalid_argument, "ExactDistance: dimension mismatch");
}

double ExactDistance::operator()(std::int64_t query_id, std::int64_t db_id) const {
    RSBENCH_CHECK(
            query_id >= 0 && static_cast<std::size_t>(query_id) < queries_->count(),
            invalid_argument,
            "query id " + std::to_string(query_id) + " out of range");
    RSBENCH_CHECK(
            db_id >= 0 && static_cast<std::size_t>(db_id) < db_->count(),
            invalid_argument,
            "db id " + std::to_string(db_id) + " out of range");
    return static_cast<float>(detail::l2sq(
            queries_->row_ptr(static_cast<std::size_t>(query_id)),
            db_->row_ptr(static_cast<std::size_t>(db_id)),
            queries_->dim()));
}

double rsm_score(const PositiveModel& model, const PairList& shortlist, const DistanceFn& exact_dist) {
    double total = 0;
    for (const Pair& p : shortlist) {
        total += model(exact_dist(p.query_id, p.db_id));
    }
    return total;
}

double calibrate_threshold(std::span<const float> dist2_stream, std::size_t budget) {
    if (budget >= dist2_stream.size()) {
        return std::numeric_limits<double>::infinity();
    }
    std::vector<float> v(dist2_stream.begin(), dist2_stream.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(budget), v.end());
    return v[budget];
}

namespace {

// top is sorted by ByDistanceThenIds and holds at least min(budget + 1, total)
// of the smallest candidates.
PairList range_cut(const PairList& top, std::size_t budget) {
    std::size_t keep = top.size();
    if (top.size() > budget) {
        const float threshold = top[budget].dist2;
        keep = static_cast<std::size_t>(
                std::lower_bound(
                        top.begin(),
                        top.begin() + static_cast<std::ptrdiff_t>(budget),
                        threshold,
                        [](const Pair& p, float t) { return p.dist2 < t; }) -
                top.begin());
    }
    PairList out(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(keep));
    sort_by_query(out);
    return out;
}

PairList knn_prefix(const PairList& sorted_by_query, std::size_t k) {
    PairList out;
    std::size_t run = 0;
    std::int64_t current = -1;
    for (const Pair& p : sorted_by_query) {
        if (p.query_id != current) {
            current = p.query_id;
            run = 0;
        }
        if (run < k) {
            out.push_back(p);
        }
        ++run;
    }
    return out;
}

} // namespace

std::vector<PairList> bulk_shortlists(
        const SearchIndex& index,
        const VectorDataset& queries,
        std::span<const std::size_t> budgets,
        BudgetMode mode) {
    RSBENCH_CHECK(
            index.dim() == queries.dim(), invalid_argument, "bulk_shortlist: dimension mismatch");
    std::vector<PairList> out(budgets.size());
    if (budgets.empty()) {
        return out;
    }
    const std::size_t max_budget = *std::max_element(budgets.begin(), budgets.end());
    if (mode == BudgetMode::range) {
        if (max_budget == 0) {
            return out;
        }
        const PairList top = index.smallest_pairs(queries, max_budget + 1);
        for (std::size_t i = 0; i < budgets.size(); ++i) {
            out[i] = range_cut(top, budgets[i]);
        }
        return out;
    }
    const std::size_t nq = queries.count();
    if (nq == 0) {
        return out;
    }
    const std::size_t max_k = std::min(max_budget / nq, index.size());
    if (max_k == 0) {
        return out;
    }
    const PairList all = index.knn(queries, max_k);
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        const std::size_t k = std::min(budgets[i] / nq, index.size());
        if (k > 0) {
            out[i] = knn_prefix(all, k);
        }
    }
    return out;
}

PairList bulk_shortlist(const SearchIndex& index, const VectorDataset& queries, BudgetConfig config) {
    if (config.mode == BudgetMode::knn) {
        RSBENCH_CHECK(
                queries.count() > 0 && config.budget / queries.count() > 0,
                invalid_argument,
                "knn budget " + std::to_string(config.budget) + " is smaller than the " +
                        std::to_string(queries.count()) + " queries (k would be 0)");
    }
    const std::size_t b[1] = {config.budget};
    return std::move(bulk_shortlists(index, queries, b, config.mode).front());
}

std::vector<CurvePoint> positive_curve(
        const PositiveModel& model,
        const SearchIndex& index,
        const VectorDataset& queries,
        const DistanceFn& exact_dist,
        std::span<const std::size_t> budgets,
        BudgetMode mode) {
    const auto lists = bulk_shortlists(index, queries, budgets, mode);
    std::vector<CurvePoint> rows;
    rows.reserve(budgets.size());
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        rows.push_back({budgets[i], rsm_score(model, lists[i], exact_dist), lists[i].size()});
    }
    return rows;
}

} // namespace rsbench
