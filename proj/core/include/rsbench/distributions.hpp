#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <rsbench/dataset.hpp>

namespace rsbench {

// Neighbor-distance densities for two isotropic vector distributions. The
// r-axis is the (non-squared) distance between a query and a database vector.
// Densities are unnormalized; DensityCurve handles normalization numerically.

/// Distance density between two independent uniform points on the unit
/// sphere S^{d-1}, up to a constant: r^{d-2} (1 - r^2/4)^{(d-2)/2} / sqrt(4 - r^2).
/// Requires 0 < r < 2 and d >= 3. Evaluated in log space for d > 50.
double density_uniform_sphere(double r, int d);

/// Distance density between two independent N(0, I/2) vectors, up to a
/// constant: r^{d-1} exp(-r^2 / 2). Requires r > 0 and d >= 1.
double density_gaussian(double r, int d);

struct DensityCurve {
    std::vector<double> r_values;
    std::vector<double> density;
    bool normalized = false;
};

enum class GridEndpoints { include, exclude };

/// Samples `density(r)` on `points` equally spaced r values spanning
/// [r_lo, r_hi]. With GridEndpoints::exclude the two end values are dropped
/// (for densities undefined at the interval ends).
DensityCurve sample_curve(
        const std::function<double(double)>& density,
        double r_lo,
        double r_hi,
        std::size_t points,
        GridEndpoints endpoints = GridEndpoints::include);

/// Default curves: 20,001-point grids, over (0, 2) for the sphere and
/// (0, sqrt(d) + 8] for the Gaussian.
DensityCurve uniform_sphere_curve(int d, std::size_t points = 20001);
DensityCurve gaussian_curve(int d, std::size_t points = 20001);

double trapezoid(std::span<const double> x, std::span<const double> y);

/// Rescales density so its trapezoidal integral is 1.
DensityCurve normalize(DensityCurve curve);

/// Index of the grid maximum (first one on ties).
std::size_t grid_argmax(const DensityCurve& curve);

/// Rescales the r-axis so the grid argmax sits at r = 1 and renormalizes the
/// density to unit integral. Throws if the maximum is at a grid boundary.
DensityCurve mode_normalize(const DensityCurve& curve);

/// Full width at half maximum, with linear interpolation of the crossings.
double full_width_half_max(const DensityCurve& curve);

/// n i.i.d. rows from N(0, I_d / 2).
VectorDataset sample_gaussian(std::size_t n, std::size_t d, std::uint64_t seed);

/// n i.i.d. rows uniform on S^{d-1} (normalized Gaussian draws).
VectorDataset sample_uniform_sphere(std::size_t n, std::size_t d, std::uint64_t seed);

/// Distances (not squared) between row i of a and row i of b.
std::vector<double> rowwise_distances(const VectorDataset& a, const VectorDataset& b);

/// Counts of `values` in `bins` equal-width bins over [lo, hi]; the last bin
/// is closed on the right. Values outside the range are ignored.
std::vector<std::size_t> histogram_counts(
        std::span<const double> values, double lo, double hi, std::size_t bins);

/// Histogram of all query-db distances over their observed range. density[i]
/// is count_i / (total * bin_width) at bin center r_values[i], so
/// Σ density * bin_width = 1. When all distances are equal everything lands
/// in the first bin of a unit-width grid starting at that distance.
DensityCurve empirical_distance_histogram(
        const VectorDataset& queries, const VectorDataset& db, std::size_t bins);

/// Same, for an explicit list of distances.
DensityCurve distance_histogram(std::span<const double> distances, std::size_t bins);

} // namespace rsbench
