#pragma once

#include <cstddef>
#include <cstring>
#include <span>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace rsbench {

namespace detail {

// Float inputs, double accumulation over 16 interleaved lanes (element i goes
// to lane i % 16; a trailing block of 8 reuses lanes 0-7 and the last d % 8
// elements are added in order after the lanes are combined). Every component
// that produces a distance goes through this kernel so results are
// bit-identical across brute force, IVF scanning and PQ table construction.
// The AVX-512 and scalar paths perform the same operations in the same order.
template <class Load>
inline double l2sq_lanes(const float* a, Load b, std::size_t d) noexcept {
    std::size_t i = 0;
    double lanes[8];
#if defined(__AVX512F__)
    __m512d acc0 = _mm512_setzero_pd();
    __m512d acc1 = _mm512_setzero_pd();
    for (; i + 16 <= d; i += 16) {
        const __m512d t0 = _mm512_sub_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i)), _mm512_cvtps_pd(b.load8(i)));
        const __m512d t1 =
                _mm512_sub_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i + 8)), _mm512_cvtps_pd(b.load8(i + 8)));
        acc0 = _mm512_add_pd(acc0, _mm512_mul_pd(t0, t0));
        acc1 = _mm512_add_pd(acc1, _mm512_mul_pd(t1, t1));
    }
    if (i + 8 <= d) {
        const __m512d t0 = _mm512_sub_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i)), _mm512_cvtps_pd(b.load8(i)));
        acc0 = _mm512_add_pd(acc0, _mm512_mul_pd(t0, t0));
        i += 8;
    }
    _mm512_storeu_pd(lanes, _mm512_add_pd(acc0, acc1));
#else
    double acc[16] = {};
    for (; i + 16 <= d; i += 16) {
        for (std::size_t j = 0; j < 16; ++j) {
            const double t = static_cast<double>(a[i + j]) - static_cast<double>(b(i + j));
            acc[j] += t * t;
        }
    }
    if (i + 8 <= d) {
        for (std::size_t j = 0; j < 8; ++j) {
            const double t = static_cast<double>(a[i + j]) - static_cast<double>(b(i + j));
            acc[j] += t * t;
        }
        i += 8;
    }
    for (std::size_t j = 0; j < 8; ++j) {
        lanes[j] = acc[j] + acc[j + 8];
    }
#endif
    double s = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7]));
    for (; i < d; ++i) {
        const double t = static_cast<double>(a[i]) - static_cast<double>(b(i));
        s += t * t;
    }
    return s;
}

struct FloatLoad {
    const float* p;
    float operator()(std::size_t i) const noexcept {
        return p[i];
    }
#if defined(__AVX512F__)
    __m256 load8(std::size_t i) const noexcept {
        return _mm256_loadu_ps(p + i);
    }
#endif
};

// Raw little-endian float storage (flat codes) without aliasing a byte buffer.
struct ByteLoad {
    const unsigned char* p;
    float operator()(std::size_t i) const noexcept {
        float v;
        std::memcpy(&v, p + i * sizeof(float), sizeof(float));
        return v;
    }
#if defined(__AVX512F__)
    __m256 load8(std::size_t i) const noexcept {
        return _mm256_loadu_ps(reinterpret_cast<const float*>(p + i * sizeof(float)));
    }
#endif
};

inline double l2sq(const float* a, const float* b, std::size_t d) noexcept {
    return l2sq_lanes(a, FloatLoad{b}, d);
}

inline double l2sq_bytes(const float* a, const unsigned char* b, std::size_t d) noexcept {
    return l2sq_lanes(a, ByteLoad{b}, d);
}

} // namespace detail

/// Squared Euclidean distance. Throws ErrorKind::invalid_argument on a
/// dimension mismatch.
double squared_l2(std::span<const float> a, std::span<const float> b);

} // namespace rsbench
