#pragma once

#include <cstddef>
#include <functional>

namespace rsbench {

/// Worker count: RSBENCH_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Splits [0, n) into at most thread_count() contiguous chunks and runs
/// fn(begin, end, worker) on each, worker in [0, workers). Returns the number
/// of workers used. Exceptions thrown by fn are rethrown on the caller.
std::size_t parallel_for(
        std::size_t n,
        const std::function<void(std::size_t begin, std::size_t end, std::size_t worker)>& fn);

/// Number of workers parallel_for(n, ...) will use.
std::size_t workers_for(std::size_t n);

} // namespace rsbench
