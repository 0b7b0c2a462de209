#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <rsbench/dataset.hpp>

namespace rsbench {

/// Product quantizer: the d-dimensional space is split into m contiguous
/// sub-vectors of d/m components, each quantized with its own 2^bits-entry
/// codebook. Codes are packed: one byte per sub-quantizer for 8 bits, two
/// per byte (low nibble first) for 4 bits.
class PQCodebook {
   public:
    PQCodebook(std::size_t dim, std::size_t m, int bits, std::vector<float> codewords);

    std::size_t dim() const noexcept {
        return dim_;
    }
    std::size_t m() const noexcept {
        return m_;
    }
    int bits() const noexcept {
        return bits_;
    }
    std::size_t sub_dim() const noexcept {
        return dim_ / m_;
    }
    std::size_t ksub() const noexcept {
        return std::size_t{1} << bits_;
    }
    std::size_t code_size() const noexcept {
        return (m_ * static_cast<std::size_t>(bits_) + 7) / 8;
    }

    /// Codeword `c` of sub-quantizer `sub`.
    std::span<const float> codeword(std::size_t sub, std::size_t c) const noexcept {
        return {codewords_.data() + (sub * ksub() + c) * sub_dim(), sub_dim()};
    }
    /// All codewords, laid out [m][ksub][sub_dim].
    std::span<const float> codewords() const noexcept {
        return codewords_;
    }

    /// Sub-quantizer index stored at position `sub` of a packed code.
    std::size_t code_at(std::span<const std::uint8_t> code, std::size_t sub) const noexcept {
        if (bits_ == 8) {
            return code[sub];
        }
        const std::uint8_t byte = code[sub / 2];
        return (sub % 2 == 0) ? (byte & 0x0F) : (byte >> 4);
    }

    friend bool operator==(const PQCodebook&, const PQCodebook&) = default;

   private:
    std::size_t dim_;
    std::size_t m_;
    int bits_;
    std::vector<float> codewords_;
};

/// Per-subspace k-means (k-means++ seeding, `iters` Lloyd rounds) with
/// 2^bits centroids. Throws if dim % m != 0, bits is not 4 or 8, or there are
/// fewer than 2^bits training vectors.
PQCodebook train_pq(const VectorDataset& data, std::size_t m, int bits, std::uint64_t seed, std::size_t iters = 25);

void encode_pq(const PQCodebook& cb, std::span<const float> x, std::span<std::uint8_t> code);
std::vector<std::uint8_t> encode_pq(const PQCodebook& cb, std::span<const float> x);

/// Codes of every row, concatenated (count * code_size bytes).
std::vector<std::uint8_t> encode_pq_batch(const PQCodebook& cb, const VectorDataset& data);

std::vector<float> decode_pq(const PQCodebook& cb, std::span<const std::uint8_t> code);

/// Asymmetric distance tables: entry [sub * ksub + c] is the squared distance
/// between the query's sub-vector `sub` and codeword c, rounded to float.
std::vector<float> adc_tables(const PQCodebook& cb, std::span<const float> query);

/// Σ_sub tables[sub][code[sub]], accumulated in double in sub order.
double adc_distance(const PQCodebook& cb, std::span<const float> tables, std::span<const std::uint8_t> code);

} // namespace rsbench
