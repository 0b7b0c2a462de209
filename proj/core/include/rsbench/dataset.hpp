#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rsbench {

/// Dense row-major matrix of `count` vectors of dimension `dim`. Row index is
/// the vector id. Immutable after construction; every element is finite.
class VectorDataset {
   public:
    /// Throws ErrorKind::invalid_argument if dim == 0, if data.size() is not a
    /// multiple of dim, or if any element is NaN/Inf.
    VectorDataset(std::size_t dim, std::vector<float> data);

    /// An empty dataset of the given dimension.
    explicit VectorDataset(std::size_t dim);

    std::size_t dim() const noexcept {
        return dim_;
    }
    std::size_t count() const noexcept {
        return dim_ == 0 ? 0 : data_.size() / dim_;
    }
    bool empty() const noexcept {
        return data_.empty();
    }

    std::span<const float> row(std::size_t i) const;
    const float* row_ptr(std::size_t i) const noexcept {
        return data_.data() + i * dim_;
    }
    std::span<const float> data() const noexcept {
        return data_;
    }

    /// Rows [begin, end) as a new dataset.
    VectorDataset slice(std::size_t begin, std::size_t end) const;

    /// Rows listed in `ids`, in that order.
    VectorDataset gather(std::span<const std::int64_t> ids) const;

    friend bool operator==(const VectorDataset&, const VectorDataset&) = default;

   private:
    std::size_t dim_;
    std::vector<float> data_;
};

} // namespace rsbench
