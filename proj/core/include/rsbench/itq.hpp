#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <rsbench/dataset.hpp>

namespace rsbench {

/// Iterative-quantization binary codec: x -> sign(((x - mean) P) R) with P the
/// top-n_bits PCA directions and R a learned orthogonal rotation. Bit i of the
/// code is set when component i is >= 0; bits are packed LSB-first.
struct ITQModel {
    std::size_t dim = 0;
    std::size_t n_bits = 0;
    std::vector<double> mean;           // dim
    std::vector<double> pca_projection; // dim x n_bits, row-major
    std::vector<double> rotation;       // n_bits x n_bits, row-major

    std::size_t code_size() const noexcept {
        return (n_bits + 7) / 8;
    }

    friend bool operator==(const ITQModel&, const ITQModel&) = default;
};

struct ITQTraining {
    ITQModel model;
    /// ||sign(V R) - V R||_F^2 for the rotation after each iteration;
    /// loss.front() is the identity rotation (plain PCA signs). Non-increasing.
    std::vector<double> loss;
};

/// Centers the data, projects onto the top n_bits principal directions and
/// alternates a sign step with an orthogonal Procrustes rotation step for
/// n_iters rounds, starting from the identity rotation. The seed selects the
/// training subsample when `max_train` is smaller than data.count().
/// Throws if n_bits > dim, n_bits == 0 or data.count() <= n_bits.
ITQTraining train_itq(
        const VectorDataset& data,
        std::size_t n_bits,
        std::size_t n_iters = 50,
        std::uint64_t seed = 0,
        std::size_t max_train = 100000);

/// The projected, rotated (pre-sign) coordinates of x.
std::vector<double> itq_project(const ITQModel& model, std::span<const float> x);

void encode_itq(const ITQModel& model, std::span<const float> x, std::span<std::uint8_t> code);
std::vector<std::uint8_t> encode_itq(const ITQModel& model, std::span<const float> x);

std::vector<std::uint8_t> encode_itq_batch(const ITQModel& model, const VectorDataset& data);

/// Number of differing bits. Throws on a length mismatch.
int hamming(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

namespace detail {
inline int hamming_unchecked(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) noexcept {
    int h = 0;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        std::uint64_t x;
        std::uint64_t y;
        __builtin_memcpy(&x, a + i, 8);
        __builtin_memcpy(&y, b + i, 8);
        h += __builtin_popcountll(x ^ y);
    }
    for (; i < n; ++i) {
        h += __builtin_popcount(static_cast<unsigned>(a[i] ^ b[i]));
    }
    return h;
}
} // namespace detail

} // namespace rsbench
