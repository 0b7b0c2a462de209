#include <rsbench/distance.hpp>

#include <string>

#include <rsbench/error.hpp>

namespace rsbench {

double squared_l2(std::span<const float> a, std::span<const float> b) {
    RSBENCH_CHECK(
            a.size() == b.size(),
            invalid_argument,
            "dimension mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
    return detail::l2sq(a.data(), b.data(), a.size());
}

} // namespace rsbench
