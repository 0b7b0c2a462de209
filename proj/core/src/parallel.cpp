#include <rsbench/parallel.hpp>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace rsbench {

std::size_t thread_count() {
    if (const char* env = std::getenv("RSBENCH_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) {
                return static_cast<std::size_t>(v);
            }
        } catch (...) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::size_t workers_for(std::size_t n) {
    return std::max<std::size_t>(1, std::min(thread_count(), n));
}

std::size_t parallel_for(
        std::size_t n,
        const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    const std::size_t workers = workers_for(n);
    if (workers == 1) {
        fn(0, n, 0);
        return 1;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        threads.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return workers;
}

} // namespace rsbench
