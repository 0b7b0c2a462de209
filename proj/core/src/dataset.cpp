#include <rsbench/dataset.hpp>

#include <cmath>
#include <string>

#include <rsbench/error.hpp>

namespace rsbench {

VectorDataset::VectorDataset(std::size_t dim, std::vector<float> data)
        : dim_(dim), data_(std::move(data)) {
    RSBENCH_CHECK(dim_ > 0, invalid_argument, "dataset dimension must be positive");
    RSBENCH_CHECK(
            data_.size() % dim_ == 0,
            invalid_argument,
            "dataset buffer of " + std::to_string(data_.size()) +
                    " floats is not a multiple of dim " + std::to_string(dim_));
    for (std::size_t i = 0; i < data_.size(); ++i) {
        RSBENCH_CHECK(
                std::isfinite(data_[i]),
                invalid_argument,
                "non-finite value in dataset at row " + std::to_string(i / dim_));
    }
}

VectorDataset::VectorDataset(std::size_t dim) : dim_(dim) {
    RSBENCH_CHECK(dim_ > 0, invalid_argument, "dataset dimension must be positive");
}

std::span<const float> VectorDataset::row(std::size_t i) const {
    RSBENCH_CHECK(
            i < count(),
            invalid_argument,
            "row " + std::to_string(i) + " out of range (count " +
                    std::to_string(count()) + ")");
    return {data_.data() + i * dim_, dim_};
}

VectorDataset VectorDataset::slice(std::size_t begin, std::size_t end) const {
    RSBENCH_CHECK(begin <= end && end <= count(), invalid_argument, "slice out of range");
    return VectorDataset(
            dim_,
            std::vector<float>(
                    data_.begin() + static_cast<std::ptrdiff_t>(begin * dim_),
                    data_.begin() + static_cast<std::ptrdiff_t>(end * dim_)));
}

VectorDataset VectorDataset::gather(std::span<const std::int64_t> ids) const {
    std::vector<float> out;
    out.reserve(ids.size() * dim_);
    for (std::int64_t id : ids) {
        auto r = row(static_cast<std::size_t>(id));
        out.insert(out.end(), r.begin(), r.end());
    }
    return VectorDataset(dim_, std::move(out));
}

} // namespace rsbench
