#include <rsbench/search.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include <rsbench/error.hpp>
#include <rsbench/parallel.hpp>

#include "topk.hpp"

namespace rsbench {

void sort_by_query(PairList& pairs) {
    std::sort(pairs.begin(), pairs.end(), ByQueryThenDistance{});
}

void validate_pairs(const PairList& pairs, std::size_t n_queries, std::size_t n_db) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(pairs.size());
    for (const Pair& p : pairs) {
        RSBENCH_CHECK(
                p.query_id >= 0 && static_cast<std::size_t>(p.query_id) < n_queries,
                invalid_argument,
                "query id " + std::to_string(p.query_id) + " out of range");
        RSBENCH_CHECK(
                p.db_id >= 0 && static_cast<std::size_t>(p.db_id) < n_db,
                invalid_argument,
                "db id " + std::to_string(p.db_id) + " out of range");
        RSBENCH_CHECK(p.dist2 >= 0, invalid_argument, "negative or NaN distance in pair list");
        const auto key = static_cast<std::uint64_t>(p.query_id) * n_db +
                static_cast<std::uint64_t>(p.db_id);
        RSBENCH_CHECK(
                seen.insert(key).second,
                invalid_argument,
                "duplicate pair (" + std::to_string(p.query_id) + ", " +
                        std::to_string(p.db_id) + ")");
    }
}

std::vector<std::size_t> results_per_query(const PairList& pairs, std::size_t n_queries) {
    std::vector<std::size_t> counts(n_queries, 0);
    for (const Pair& p : pairs) {
        RSBENCH_CHECK(
                p.query_id >= 0 && static_cast<std::size_t>(p.query_id) < n_queries,
                invalid_argument,
                "query id " + std::to_string(p.query_id) + " out of range");
        ++counts[static_cast<std::size_t>(p.query_id)];
    }
    return counts;
}

namespace {

void check_dims(const VectorDataset& queries, const VectorDataset& db) {
    RSBENCH_CHECK(
            queries.dim() == db.dim(),
            invalid_argument,
            "dimension mismatch: queries " + std::to_string(queries.dim()) + " vs db " +
                    std::to_string(db.dim()));
}

} // namespace

PairList brute_force_knn(const VectorDataset& queries, const VectorDataset& db, std::size_t k) {
    check_dims(queries, db);
    RSBENCH_CHECK(
            k <= db.count(),
            invalid_argument,
            "k = " + std::to_string(k) + " exceeds database size " + std::to_string(db.count()));
    const std::size_t nq = queries.count();
    std::vector<PairList> per_query(nq);
    parallel_for(nq, [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<detail::QueryHeap> heaps;
        heaps.reserve(end - begin);
        for (std::size_t q = begin; q < end; ++q) {
            heaps.emplace_back(k);
        }
        detail::cross_scan(queries, begin, end, db, [&](std::size_t qi, std::size_t bi, float d2) {
            auto& h = heaps[qi - begin];
            if (!h.rejects(d2)) {
                h.push({static_cast<std::int64_t>(qi), static_cast<std::int64_t>(bi), d2});
            }
        });
        for (std::size_t q = begin; q < end; ++q) {
            per_query[q] = heaps[q - begin].take_sorted();
        }
    });
    PairList out;
    out.reserve(nq * k);
    for (auto& l : per_query) {
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

PairList brute_force_range(const VectorDataset& queries, const VectorDataset& db, double r2) {
    check_dims(queries, db);
    const std::size_t nq = queries.count();
    std::vector<PairList> per_query(nq);
    parallel_for(nq, [&](std::size_t begin, std::size_t end, std::size_t) {
        detail::cross_scan(queries, begin, end, db, [&](std::size_t qi, std::size_t bi, float d2) {
            if (d2 < r2) {
                per_query[qi].push_back(
                        {static_cast<std::int64_t>(qi), static_cast<std::int64_t>(bi), d2});
            }
        });
        for (std::size_t q = begin; q < end; ++q) {
            std::sort(per_query[q].begin(), per_query[q].end(), ByQueryThenDistance{});
        }
    });
    PairList out;
    for (auto& l : per_query) {
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

PairList ExactIndex::knn(const VectorDataset& queries, std::size_t k) const {
    return brute_force_knn(queries, *db_, k);
}

PairList ExactIndex::smallest_pairs(const VectorDataset& queries, std::size_t n) const {
    check_dims(queries, *db_);
    const std::size_t workers = workers_for(queries.count());
    std::vector<detail::GlobalHeap> heaps(workers, detail::GlobalHeap(n));
    parallel_for(queries.count(), [&](std::size_t begin, std::size_t end, std::size_t w) {
        auto& h = heaps[w];
        detail::cross_scan(queries, begin, end, *db_, [&](std::size_t qi, std::size_t bi, float d2) {
            if (!h.rejects(d2)) {
                h.push({static_cast<std::int64_t>(qi), static_cast<std::int64_t>(bi), d2});
            }
        });
    });
    return detail::merge_global(heaps, n);
}

namespace {

std::vector<std::int64_t> first_result(const PairList& pairs, std::size_t n_queries) {
    std::vector<std::int64_t> first(n_queries, -1);
    for (const Pair& p : pairs) {
        RSBENCH_CHECK(
                p.query_id >= 0 && static_cast<std::size_t>(p.query_id) < n_queries,
                invalid_argument,
                "recall_at_1: query id out of range");
        auto& f = first[static_cast<std::size_t>(p.query_id)];
        if (f < 0) {
            f = p.db_id;
        }
    }
    return first;
}

} // namespace

double recall_at_1(const PairList& approx, const PairList& exact, std::size_t n_queries) {
    if (n_queries == 0) {
        return 0.0;
    }
    const auto a = first_result(approx, n_queries);
    const auto e = first_result(exact, n_queries);
    std::size_t hits = 0;
    for (std::size_t q = 0; q < n_queries; ++q) {
        hits += a[q] >= 0 && a[q] == e[q];
    }
    return static_cast<double>(hits) / static_cast<double>(n_queries);
}

} // namespace rsbench
