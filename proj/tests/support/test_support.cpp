#include "test_support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include <unistd.h>

namespace rsbench::testing {

namespace fs = std::filesystem;

VectorDataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, float lo, float hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(lo, hi);
    std::vector<float> v(n * d);
    for (auto& x : v) {
        x = u(rng);
    }
    return VectorDataset(d, std::move(v));
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    const auto base = fs::temp_directory_path();
    for (;;) {
        path_ = base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        if (fs::create_directories(path_)) {
            break;
        }
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

double exhaustive_isotonic_min(std::span<const double> x, std::span<const double> y) {
    // Group equal x: a fitted value is a function of x.
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> gsum;
    std::vector<double> gcnt;
    std::vector<double> gsq;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (k == 0 || x[i] != x[order[k - 1]]) {
            gsum.push_back(0);
            gcnt.push_back(0);
            gsq.push_back(0);
        }
        gsum.back() += y[i];
        gcnt.back() += 1;
        gsq.back() += y[i] * y[i];
    }
    const std::size_t g = gsum.size();
    double best = std::numeric_limits<double>::infinity();
    // Bit j of `cuts` set = a block boundary after group j.
    for (std::uint64_t cuts = 0; cuts < (std::uint64_t{1} << (g - 1)); ++cuts) {
        double prev_mean = std::numeric_limits<double>::infinity();
        double obj = 0;
        bool ok = true;
        double s = 0;
        double c = 0;
        double q = 0;
        for (std::size_t j = 0; j < g; ++j) {
            s += gsum[j];
            c += gcnt[j];
            q += gsq[j];
            if (j + 1 == g || ((cuts >> j) & 1)) {
                const double mean = s / c;
                if (mean > prev_mean + 1e-15) {
                    ok = false;
                    break;
                }
                obj += q - s * s / c;
                prev_mean = mean;
                s = c = q = 0;
            }
        }
        if (ok) {
            best = std::min(best, obj);
        }
    }
    return best;
}

double exhaustive_best_subset(const PositiveModel& f, std::span<const double> dist2, std::size_t budget) {
    const std::size_t n = dist2.size();
    double best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != budget) {
            continue;
        }
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1) {
                s += f(dist2[i]);
            }
        }
        best = std::max(best, s);
    }
    return best;
}

PositiveModel random_monotone_model(std::uint64_t seed, std::size_t max_points, double x_max) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> np(1, max_points);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = np(rng);
    std::vector<double> bp(n);
    std::vector<double> val(n);
    for (std::size_t i = 0; i < n; ++i) {
        bp[i] = u(rng) * x_max;
        val[i] = u(rng);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    val.resize(bp.size());
    std::sort(val.begin(), val.end(), std::greater<>());
    return PositiveModel(bp, val);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

double ks_critical_1pct(std::size_t n) {
    return 1.6276 / std::sqrt(static_cast<double>(n));
}

double chi_square_pvalue(double statistic, double df) {
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), statistic));
}

double chi_square_statistic(std::span<const std::size_t> observed, std::span<const double> expected) {
    double s = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double diff = static_cast<double>(observed[i]) - expected[i];
        s += diff * diff / expected[i];
    }
    return s;
}

NumericCdf::NumericCdf(const DensityCurve& curve) : r_(curve.r_values), cum_(curve.r_values.size(), 0.0) {
    for (std::size_t i = 1; i < r_.size(); ++i) {
        cum_[i] = cum_[i - 1] + 0.5 * (curve.density[i] + curve.density[i - 1]) * (r_[i] - r_[i - 1]);
    }
    const double total = cum_.back();
    for (auto& c : cum_) {
        c /= total;
    }
}

double NumericCdf::operator()(double r) const {
    if (r <= r_.front()) {
        return 0.0;
    }
    if (r >= r_.back()) {
        return 1.0;
    }
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - r_.begin());
    const double t = (r - r_[i - 1]) / (r_[i] - r_[i - 1]);
    return cum_[i - 1] + t * (cum_[i] - cum_[i - 1]);
}

double NumericCdf::quantile(double p) const {
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
    if (it == cum_.begin()) {
        return r_.front();
    }
    if (it == cum_.end()) {
        return r_.back();
    }
    const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    const double span = cum_[i] - cum_[i - 1];
    const double t = span > 0 ? (p - cum_[i - 1]) / span : 0.0;
    return r_[i - 1] + t * (r_[i] - r_[i - 1]);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace rsbench::testing
