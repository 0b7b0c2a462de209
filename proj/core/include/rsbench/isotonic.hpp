#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <rsbench/dataset.hpp>

namespace rsbench {

/// A squared distance with its verification outcome. The ids are optional
/// provenance (-1 when unknown) and do not take part in fitting.
struct LabeledPair {
    double dist2;
    int label;
    std::int64_t query_id = -1;
    std::int64_t db_id = -1;
};

/// Monotone non-increasing piecewise-linear map from squared distance to the
/// probability that a pair is positive. Linear between breakpoints, constant
/// (clamped to the end values) outside them.
class PositiveModel {
   public:
    /// Throws ErrorKind::invalid_argument unless breakpoints are non-empty,
    /// finite and strictly increasing, and values are the same length,
    /// non-increasing and within [0, 1].
    PositiveModel(std::vector<double> breakpoints, std::vector<double> values);

    /// f(r2) = p everywhere.
    static PositiveModel constant(double p);

    double operator()(double dist2) const noexcept;

    std::span<const double> breakpoints() const noexcept {
        return breakpoints_;
    }
    std::span<const double> values() const noexcept {
        return values_;
    }

    /// Smallest breakpoint-interpolated squared distance where f drops to
    /// `level` or below; +inf if it never does.
    double crossing(double level) const noexcept;

    /// Two columns "dist2,value" with a header row, 9 significant digits.
    std::string to_csv() const;
    static PositiveModel from_csv(const std::string& text);
    void save_csv(const std::filesystem::path& path) const;
    static PositiveModel load_csv(const std::filesystem::path& path);

    friend bool operator==(const PositiveModel&, const PositiveModel&) = default;

   private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

inline double eval_model(const PositiveModel& model, double dist2) noexcept {
    return model(dist2);
}

/// Least-squares fit of a non-increasing step function to (x, y), solved by
/// pool-adjacent-violators after pooling equal x to their mean. y must lie in
/// [0, 1]. The model keeps the first and last x of every fitted block;
/// adjacent blocks with equal values are merged.
PositiveModel isotonic_regression(std::span<const double> x, std::span<const double> y);

/// isotonic_regression over labeled pairs. Throws on empty input or a label
/// outside {0, 1}.
PositiveModel fit_isotonic(std::span<const LabeledPair> pairs);

/// Σ (model(x_i) - y_i)^2, the quantity fit_isotonic minimizes.
double squared_residual(const PositiveModel& model, std::span<const LabeledPair> pairs);

using PairOracle = std::function<bool(std::int64_t query_id, std::int64_t db_id)>;

/// Every pair with dist2 < r2_max, plus `n_far_negatives` pairs drawn
/// uniformly without replacement from those with dist2 >= r2_max (all of them
/// if fewer exist), each labeled by `oracle`. Near pairs come first, then far
/// pairs; each group is ordered by (query_id, db_id). Deterministic in seed.
std::vector<LabeledPair> collect_training_pairs(
        const VectorDataset& queries,
        const VectorDataset& db,
        const PairOracle& oracle,
        double r2_max,
        std::size_t n_far_negatives,
        std::uint64_t seed);

/// CSV with header "query_id,db_id,dist2,label".
std::string labeled_pairs_to_csv(std::span<const LabeledPair> pairs);
std::vector<LabeledPair> labeled_pairs_from_csv(const std::string& text);

} // namespace rsbench
