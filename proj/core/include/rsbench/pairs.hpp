#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rsbench {

/// One (query, database) result with its squared distance. Distances are
/// stored at float precision; every selection (top-k, thresholds) compares
/// these stored values so that all search paths agree on ties.
struct Pair {
    std::int64_t query_id;
    std::int64_t db_id;
    float dist2;

    friend bool operator==(const Pair&, const Pair&) = default;
};

using PairList = std::vector<Pair>;

/// Orders by (query_id, dist2, db_id): the canonical result-list order.
struct ByQueryThenDistance {
    bool operator()(const Pair& a, const Pair& b) const noexcept {
        if (a.query_id != b.query_id) {
            return a.query_id < b.query_id;
        }
        if (a.dist2 != b.dist2) {
            return a.dist2 < b.dist2;
        }
        return a.db_id < b.db_id;
    }
};

/// Orders by (dist2, query_id, db_id): a total order used for global top-B.
struct ByDistanceThenIds {
    bool operator()(const Pair& a, const Pair& b) const noexcept {
        if (a.dist2 != b.dist2) {
            return a.dist2 < b.dist2;
        }
        if (a.query_id != b.query_id) {
            return a.query_id < b.query_id;
        }
        return a.db_id < b.db_id;
    }
};

void sort_by_query(PairList& pairs);

/// Throws ErrorKind::invalid_argument if an id is out of range, a distance is
/// negative or NaN, or a (query_id, db_id) pair appears twice.
void validate_pairs(const PairList& pairs, std::size_t n_queries, std::size_t n_db);

/// Number of pairs per query id, for query ids in [0, n_queries).
std::vector<std::size_t> results_per_query(const PairList& pairs, std::size_t n_queries);

} // namespace rsbench
