#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <rsbench/dataset.hpp>
#include <rsbench/distance.hpp>
#include <rsbench/pairs.hpp>

namespace rsbench::detail {

/// Keeps the `capacity` smallest pairs under Less. Max-heap on Less, so the
/// root is the current worst kept element.
template <class Less>
class BoundedPairHeap {
   public:
    explicit BoundedPairHeap(std::size_t capacity) : capacity_(capacity) {
        heap_.reserve(std::min<std::size_t>(capacity, 1u << 16));
    }

    void push(const Pair& p) {
        if (capacity_ == 0) {
            return;
        }
        if (heap_.size() < capacity_) {
            heap_.push_back(p);
            std::push_heap(heap_.begin(), heap_.end(), Less{});
        } else if (Less{}(p, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), Less{});
            heap_.back() = p;
            std::push_heap(heap_.begin(), heap_.end(), Less{});
        }
    }

    /// True if p would be rejected by push. Cheap pre-check for hot loops.
    bool rejects(float dist2) const noexcept {
        return capacity_ == 0 || (heap_.size() == capacity_ && dist2 > heap_.front().dist2);
    }

    std::size_t size() const noexcept {
        return heap_.size();
    }

    std::vector<Pair> take_sorted() {
        std::sort_heap(heap_.begin(), heap_.end(), Less{});
        return std::move(heap_);
    }

    std::vector<Pair>& raw() noexcept {
        return heap_;
    }

   private:
    std::size_t capacity_;
    std::vector<Pair> heap_;
};

using GlobalHeap = BoundedPairHeap<ByDistanceThenIds>;
using QueryHeap = BoundedPairHeap<ByQueryThenDistance>;

/// Merges per-worker global heaps into the overall `capacity` smallest pairs,
/// sorted by ByDistanceThenIds. The result is independent of how work was
/// split because the order is total.
inline PairList merge_global(std::vector<GlobalHeap>& heaps, std::size_t capacity) {
    PairList all;
    for (auto& h : heaps) {
        auto& raw = h.raw();
        all.insert(all.end(), raw.begin(), raw.end());
    }
    if (all.size() > capacity) {
        std::nth_element(
                all.begin(),
                all.begin() + static_cast<std::ptrdiff_t>(capacity),
                all.end(),
                ByDistanceThenIds{});
        all.resize(capacity);
    }
    std::sort(all.begin(), all.end(), ByDistanceThenIds{});
    return all;
}

/// Visits every (query, db) pair for queries in [q_begin, q_end), blocked for
/// cache reuse. sink(query_index, db_index, float dist2).
template <class Sink>
void cross_scan(
        const VectorDataset& queries,
        std::size_t q_begin,
        std::size_t q_end,
        const VectorDataset& db,
        Sink&& sink) {
    constexpr std::size_t kQueryBlock = 32;
    constexpr std::size_t kDbBlock = 1024;
    const std::size_t d = queries.dim();
    const std::size_t n_db = db.count();
    for (std::size_t q0 = q_begin; q0 < q_end; q0 += kQueryBlock) {
        const std::size_t q1 = std::min(q_end, q0 + kQueryBlock);
        for (std::size_t b0 = 0; b0 < n_db; b0 += kDbBlock) {
            const std::size_t b1 = std::min(n_db, b0 + kDbBlock);
            for (std::size_t qi = q0; qi < q1; ++qi) {
                const float* qv = queries.row_ptr(qi);
                for (std::size_t bi = b0; bi < b1; ++bi) {
                    sink(qi, bi, static_cast<float>(l2sq(qv, db.row_ptr(bi), d)));
                }
            }
        }
    }
}

} // namespace rsbench::detail
