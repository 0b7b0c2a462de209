#include <rsbench/pq.hpp>

#include <limits>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>
#include <rsbench/kmeans.hpp>
#include <rsbench/parallel.hpp>
#include <rsbench/seed.hpp>

namespace rsbench {

PQCodebook::PQCodebook(std::size_t dim, std::size_t m, int bits, std::vector<float> codewords)
        : dim_(dim), m_(m), bits_(bits), codewords_(std::move(codewords)) {
    RSBENCH_CHECK(m_ > 0 && dim_ > 0, invalid_argument, "PQ needs positive dim and m");
    RSBENCH_CHECK(
            dim_ % m_ == 0,
            invalid_argument,
            "PQ: dimension " + std::to_string(dim_) + " is not divisible by m = " + std::to_string(m_));
    RSBENCH_CHECK(bits_ == 4 || bits_ == 8, invalid_argument, "PQ: bits must be 4 or 8");
    RSBENCH_CHECK(
            codewords_.size() == m_ * ksub() * sub_dim(),
            invalid_argument,
            "PQ: codeword buffer has the wrong size");
}

PQCodebook train_pq(const VectorDataset& data, std::size_t m, int bits, std::uint64_t seed, std::size_t iters) {
    const std::size_t d = data.dim();
    RSBENCH_CHECK(m > 0 && d % m == 0, invalid_argument,
                  "PQ: dimension " + std::to_string(d) + " is not divisible by m = " + std::to_string(m));
    RSBENCH_CHECK(bits == 4 || bits == 8, invalid_argument, "PQ: bits must be 4 or 8");
    const std::size_t ksub = std::size_t{1} << bits;
    RSBENCH_CHECK(
            data.count() >= ksub,
            invalid_argument,
            "PQ: need at least " + std::to_string(ksub) + " training vectors");
    const std::size_t dsub = d / m;
    std::vector<float> codewords;
    codewords.reserve(m * ksub * dsub);
    std::vector<float> sub(data.count() * dsub);
    for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t i = 0; i < data.count(); ++i) {
            const float* x = data.row_ptr(i) + s * dsub;
            std::copy(x, x + dsub, sub.begin() + static_cast<std::ptrdiff_t>(i * dsub));
        }
        const auto km = train_kmeans(VectorDataset(dsub, sub), ksub, iters, derive_seed(seed, s));
        const auto cw = km.centroids.vectors.data();
        codewords.insert(codewords.end(), cw.begin(), cw.end());
    }
    return PQCodebook(d, m, bits, std::move(codewords));
}

void encode_pq(const PQCodebook& cb, std::span<const float> x, std::span<std::uint8_t> code) {
    RSBENCH_CHECK(x.size() == cb.dim(), invalid_argument, "encode_pq: dimension mismatch");
    RSBENCH_CHECK(code.size() == cb.code_size(), invalid_argument, "encode_pq: code buffer size");
    std::fill(code.begin(), code.end(), 0);
    const std::size_t dsub = cb.sub_dim();
    for (std::size_t s = 0; s < cb.m(); ++s) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cb.ksub(); ++c) {
            const double dd = detail::l2sq(x.data() + s * dsub, cb.codeword(s, c).data(), dsub);
            if (dd < best_d) {
                best_d = dd;
                best = c;
            }
        }
        if (cb.bits() == 8) {
            code[s] = static_cast<std::uint8_t>(best);
        } else {
            code[s / 2] |= static_cast<std::uint8_t>(s % 2 == 0 ? best : best << 4);
        }
    }
}

std::vector<std::uint8_t> encode_pq(const PQCodebook& cb, std::span<const float> x) {
    std::vector<std::uint8_t> code(cb.code_size());
    encode_pq(cb, x, code);
    return code;
}

std::vector<std::uint8_t> encode_pq_batch(const PQCodebook& cb, const VectorDataset& data) {
    const std::size_t cs = cb.code_size();
    std::vector<std::uint8_t> codes(data.count() * cs);
    parallel_for(data.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            encode_pq(cb, data.row(i), std::span<std::uint8_t>(codes.data() + i * cs, cs));
        }
    });
    return codes;
}

std::vector<float> decode_pq(const PQCodebook& cb, std::span<const std::uint8_t> code) {
    RSBENCH_CHECK(code.size() == cb.code_size(), invalid_argument, "decode_pq: code size mismatch");
    std::vector<float> x;
    x.reserve(cb.dim());
    for (std::size_t s = 0; s < cb.m(); ++s) {
        const auto cw = cb.codeword(s, cb.code_at(code, s));
        x.insert(x.end(), cw.begin(), cw.end());
    }
    return x;
}

std::vector<float> adc_tables(const PQCodebook& cb, std::span<const float> query) {
    RSBENCH_CHECK(query.size() == cb.dim(), invalid_argument, "adc_tables: dimension mismatch");
    const std::size_t dsub = cb.sub_dim();
    std::vector<float> tables(cb.m() * cb.ksub());
    for (std::size_t s = 0; s < cb.m(); ++s) {
        for (std::size_t c = 0; c < cb.ksub(); ++c) {
            tables[s * cb.ksub() + c] = static_cast<float>(
                    detail::l2sq(query.data() + s * dsub, cb.codeword(s, c).data(), dsub));
        }
    }
    return tables;
}

double adc_distance(const PQCodebook& cb, std::span<const float> tables, std::span<const std::uint8_t> code) {
    double s = 0;
    const std::size_t ksub = cb.ksub();
    for (std::size_t sub = 0; sub < cb.m(); ++sub) {
        s += tables[sub * ksub + cb.code_at(code, sub)];
    }
    return s;
}

} // namespace rsbench
