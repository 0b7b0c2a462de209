#include <rsbench/distributions.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>

namespace rsbench {

double density_uniform_sphere(double r, int d) {
    RSBENCH_CHECK(r > 0.0 && r < 2.0, invalid_argument, "uniform-sphere density needs 0 < r < 2");
    RSBENCH_CHECK(d >= 3, invalid_argument, "uniform-sphere density needs d >= 3");
    // r^{d-1} / sqrt(4 - (2 - r^2)^2) simplifies to r^{d-2} / sqrt(4 - r^2),
    // which stays finite at both ends of the interval.
    const double k = d - 2;
    const double one_minus = 1.0 - r * r / 4.0;
    if (d > 50) {
        return std::exp(k * std::log(r) + 0.5 * k * std::log(one_minus) - 0.5 * std::log(4.0 - r * r));
    }
    return std::pow(r, k) * std::pow(one_minus, 0.5 * k) / std::sqrt(4.0 - r * r);
}

double density_gaussian(double r, int d) {
    RSBENCH_CHECK(r > 0.0, invalid_argument, "gaussian distance density needs r > 0");
    RSBENCH_CHECK(d >= 1, invalid_argument, "gaussian distance density needs d >= 1");
    if (d > 50) {
        return std::exp((d - 1) * std::log(r) - 0.5 * r * r);
    }
    return std::pow(r, d - 1) * std::exp(-0.5 * r * r);
}

DensityCurve sample_curve(
        const std::function<double(double)>& density,
        double r_lo,
        double r_hi,
        std::size_t points,
        GridEndpoints endpoints) {
    RSBENCH_CHECK(points >= 3, invalid_argument, "density grid needs at least 3 points");
    RSBENCH_CHECK(r_hi > r_lo, invalid_argument, "density grid needs r_hi > r_lo");
    DensityCurve c;
    const double step = (r_hi - r_lo) / static_cast<double>(points - 1);
    const std::size_t first = endpoints == GridEndpoints::exclude ? 1 : 0;
    const std::size_t last = endpoints == GridEndpoints::exclude ? points - 1 : points;
    c.r_values.reserve(last - first);
    c.density.reserve(last - first);
    for (std::size_t i = first; i < last; ++i) {
        const double r = r_lo + step * static_cast<double>(i);
        c.r_values.push_back(r);
        c.density.push_back(density(r));
    }
    return c;
}

DensityCurve uniform_sphere_curve(int d, std::size_t points) {
    return sample_curve(
            [d](double r) { return density_uniform_sphere(r, d); },
            0.0,
            2.0,
            points,
            GridEndpoints::exclude);
}

DensityCurve gaussian_curve(int d, std::size_t points) {
    return sample_curve(
            [d](double r) { return density_gaussian(r, d); },
            0.0,
            std::sqrt(static_cast<double>(d)) + 8.0,
            points,
            GridEndpoints::exclude);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    RSBENCH_CHECK(x.size() == y.size(), invalid_argument, "trapezoid: length mismatch");
    double s = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    return s;
}

DensityCurve normalize(DensityCurve curve) {
    const double area = trapezoid(curve.r_values, curve.density);
    RSBENCH_CHECK(area > 0 && std::isfinite(area), invalid_argument, "cannot normalize a zero-area curve");
    for (double& v : curve.density) {
        v /= area;
    }
    curve.normalized = true;
    return curve;
}

std::size_t grid_argmax(const DensityCurve& curve) {
    RSBENCH_CHECK(!curve.density.empty(), invalid_argument, "empty density curve");
    return static_cast<std::size_t>(
            std::max_element(curve.density.begin(), curve.density.end()) - curve.density.begin());
}

DensityCurve mode_normalize(const DensityCurve& curve) {
    const std::size_t i = grid_argmax(curve);
    RSBENCH_CHECK(
            i > 0 && i + 1 < curve.density.size(),
            invalid_argument,
            "mode_normalize: maximum lies on the grid boundary");
    const double mode = curve.r_values[i];
    RSBENCH_CHECK(mode > 0, invalid_argument, "mode_normalize: mode must be at r > 0");
    DensityCurve out;
    out.r_values.reserve(curve.r_values.size());
    out.density.reserve(curve.density.size());
    for (std::size_t j = 0; j < curve.r_values.size(); ++j) {
        out.r_values.push_back(curve.r_values[j] / mode);
        out.density.push_back(curve.density[j] * mode);
    }
    out.r_values[i] = 1.0;
    return normalize(std::move(out));
}

double full_width_half_max(const DensityCurve& curve) {
    const std::size_t m = grid_argmax(curve);
    const double half = 0.5 * curve.density[m];
    const auto& r = curve.r_values;
    const auto& y = curve.density;
    std::size_t lo = m;
    while (lo > 0 && y[lo] > half) {
        --lo;
    }
    std::size_t hi = m;
    while (hi + 1 < y.size() && y[hi] > half) {
        ++hi;
    }
    auto cross = [&](std::size_t a, std::size_t b) {
        if (y[a] == y[b]) {
            return r[a];
        }
        return r[a] + (half - y[a]) * (r[b] - r[a]) / (y[b] - y[a]);
    };
    const double left = y[lo] <= half ? cross(lo, lo + 1) : r[lo];
    const double right = y[hi] <= half ? cross(hi - 1, hi) : r[hi];
    return right - left;
}

VectorDataset sample_gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
    RSBENCH_CHECK(n >= 1 && d >= 1, invalid_argument, "sample_gaussian needs n, d >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::vector<float> data(n * d);
    for (float& v : data) {
        v = static_cast<float>(normal(rng));
    }
    return VectorDataset(d, std::move(data));
}

VectorDataset sample_uniform_sphere(std::size_t n, std::size_t d, std::uint64_t seed) {
    RSBENCH_CHECK(n >= 1 && d >= 2, invalid_argument, "sample_uniform_sphere needs n >= 1, d >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<float> data(n * d);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
        double norm2 = 0;
        do {
            norm2 = 0;
            for (double& v : row) {
                v = normal(rng);
                norm2 += v * v;
            }
        } while (norm2 == 0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t j = 0; j < d; ++j) {
            data[i * d + j] = static_cast<float>(row[j] * inv);
        }
    }
    return VectorDataset(d, std::move(data));
}

std::vector<double> rowwise_distances(const VectorDataset& a, const VectorDataset& b) {
    RSBENCH_CHECK(
            a.dim() == b.dim() && a.count() == b.count(),
            invalid_argument,
            "rowwise_distances: shape mismatch");
    std::vector<double> out(a.count());
    for (std::size_t i = 0; i < a.count(); ++i) {
        out[i] = std::sqrt(detail::l2sq(a.row_ptr(i), b.row_ptr(i), a.dim()));
    }
    return out;
}

std::vector<std::size_t> histogram_counts(
        std::span<const double> values, double lo, double hi, std::size_t bins) {
    RSBENCH_CHECK(bins >= 1, invalid_argument, "histogram needs at least one bin");
    RSBENCH_CHECK(hi > lo, invalid_argument, "histogram needs hi > lo");
    std::vector<std::size_t> counts(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        if (!(v >= lo && v <= hi)) {
            continue;
        }
        auto b = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(b, bins - 1)]++;
    }
    return counts;
}

DensityCurve distance_histogram(std::span<const double> distances, std::size_t bins) {
    RSBENCH_CHECK(bins >= 2, invalid_argument, "distance histogram needs at least 2 bins");
    RSBENCH_CHECK(!distances.empty(), invalid_argument, "distance histogram of no distances");
    const auto [mn, mx] = std::minmax_element(distances.begin(), distances.end());
    double lo = *mn;
    double hi = *mx;
    if (!(hi > lo)) {
        hi = lo + static_cast<double>(bins);
    }
    const auto counts = histogram_counts(distances, lo, hi, bins);
    const double width = (hi - lo) / static_cast<double>(bins);
    const double total = static_cast<double>(distances.size());
    DensityCurve c;
    c.r_values.resize(bins);
    c.density.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        c.r_values[i] = lo + width * (static_cast<double>(i) + 0.5);
        c.density[i] = static_cast<double>(counts[i]) / (total * width);
    }
    // Normalized as a histogram (Σ density * width = 1), not as a trapezoid curve.
    c.normalized = false;
    return c;
}

DensityCurve empirical_distance_histogram(
        const VectorDataset& queries, const VectorDataset& db, std::size_t bins) {
    RSBENCH_CHECK(queries.dim() == db.dim(), invalid_argument, "histogram: dimension mismatch");
    std::vector<double> dist;
    dist.reserve(queries.count() * db.count());
    for (std::size_t i = 0; i < queries.count(); ++i) {
        for (std::size_t j = 0; j < db.count(); ++j) {
            dist.push_back(std::sqrt(detail::l2sq(queries.row_ptr(i), db.row_ptr(j), db.dim())));
        }
    }
    return distance_histogram(dist, bins);
}

} // namespace rsbench
