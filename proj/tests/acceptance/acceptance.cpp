// Acceptance suite: one PASS/FAIL line per criterion. Long-running criteria
// execute the default configurations from configs/ inside a work directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <rsbench/distributions.hpp>
#include <rsbench/error.hpp>
#include <rsbench/fs.hpp>
#include <rsbench/isotonic.hpp>
#include <rsbench/ivf.hpp>
#include <rsbench/kmeans.hpp>
#include <rsbench/rsm.hpp>
#include <rsbench/search.hpp>

#include "rsbench_cli.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace rsbench;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

fs::path g_config_dir;

void run(const std::string& command, const std::string& config, const fs::path& out) {
    std::printf("  $ rsbench %s --config %s --out %s\n", command.c_str(), config.c_str(), out.c_str());
    std::fflush(stdout);
    cli::run_command({command, g_config_dir / config, out, std::nullopt});
}

// CSV rows as header -> value maps.
std::vector<std::map<std::string, std::string>> table(const fs::path& p) {
    const auto rows = testing::read_csv(p);
    std::vector<std::map<std::string, std::string>> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::map<std::string, std::string> r;
        for (std::size_t j = 0; j < rows[0].size() && j < rows[i].size(); ++j) {
            r[rows[0][j]] = rows[i][j];
        }
        out.push_back(std::move(r));
    }
    return out;
}

double num(const std::string& s) {
    return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
}

// ---- 1 -------------------------------------------------------------------

Outcome pav_optimality() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20240601);
    double worst = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<double> x(n);
        std::vector<double> y(n);
        std::vector<LabeledPair> p;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = double(rng() % 10) / 4.0;
            y[i] = double(rng() % 2);
            p.push_back({x[i], int(y[i])});
        }
        const double got = squared_residual(fit_isotonic(p), p);
        worst = std::max(worst, std::abs(got - testing::exhaustive_isotonic_min(x, y)));
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-9 && secs < 10.0, fmt("500 instances, max |objective - exhaustive| = %.2e, %.2f s", worst, secs)};
}

// ---- 2 -------------------------------------------------------------------

Outcome budget_optimality() {
    std::mt19937_64 rng(7);
    std::size_t violations = 0;
    std::size_t checks = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t nq = 1 + rng() % 3;
        const std::size_t nb = 1 + rng() % (12 / nq);
        const auto q = testing::random_dataset(nq, 3, rng());
        const auto db = testing::random_dataset(nb, 3, rng());
        const auto f = testing::random_monotone_model(rng(), 6, 3.0);
        const ExactIndex index(db);
        const ExactDistance exact(q, db);
        std::vector<double> d;
        for (std::size_t i = 0; i < nq; ++i) {
            for (std::size_t j = 0; j < nb; ++j) {
                d.push_back(exact(std::int64_t(i), std::int64_t(j)));
            }
        }
        for (std::size_t b = 1; b <= d.size(); ++b) {
            const auto list = bulk_shortlist(index, q, {b, BudgetMode::range});
            const double best = testing::exhaustive_best_subset(f, d, b);
            ++checks;
            if (list.size() != b || rsm_score(f, list, exact) < best - 1e-12) {
                ++violations;
            }
        }
    }
    return {violations == 0, fmt("200 instances, %zu budgets checked, %zu violations", checks, violations)};
}

// ---- 3 -------------------------------------------------------------------

bool same_ids(const PairList& a, const PairList& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const Pair& x, const Pair& y) {
               return x.query_id == y.query_id && x.db_id == y.db_id;
           });
}

Outcome exact_index_equivalence() {
    std::mt19937_64 rng(3);
    std::size_t mismatches = 0;
    std::size_t pairs = 0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t d = 1 + rng() % 32;
        const std::size_t n = 50 + rng() % 4951;
        const std::size_t k = 1 + rng() % 64;
        const auto db = testing::random_dataset(n, d, rng());
        const auto q = testing::random_dataset(40, d, rng());
        const auto cent = train_kmeans(db, k, 5, rng()).centroids;
        const auto index = build_ivf(db, cent, FlatCodec{}, false, ExactAssigner{});

        const std::size_t kk = 1 + rng() % 20;
        const auto knn = ivf_search(index, q, KnnSearch{kk}, k);
        const auto knn_ref = brute_force_knn(q, db, kk);
        // Radius around the median nearest-neighbor distance times a spread factor.
        const double r2 = knn_ref[knn_ref.size() / 2].dist2 * (1.0 + double(rng() % 300) / 100.0);
        const auto range = ivf_search(index, q, RangeSearch{r2}, k);
        const auto range_ref = brute_force_range(q, db, r2);
        mismatches += !same_ids(knn, knn_ref);
        mismatches += !same_ids(range, range_ref);
        pairs += knn.size() + range.size();
    }
    return {mismatches == 0, fmt("20 datasets, %zu result pairs compared, %zu mismatching searches", pairs, mismatches)};
}

// ---- 4 -------------------------------------------------------------------

Outcome density_correctness() {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;
    const std::size_t n = 100000;
    for (int d : {10, 100}) {
        const auto a = sample_gaussian(n, std::size_t(d), 100 + d);
        const auto b = sample_gaussian(n, std::size_t(d), 200 + d);
        const auto dist = rowwise_distances(a, b);
        const auto curve = gaussian_curve(d);
        const testing::NumericCdf cdf(curve);
        const double ks = testing::ks_statistic(dist, [&](double r) { return cdf(r); });
        const double crit = testing::ks_critical_1pct(n);
        ok = ok && ks < crit;

        const double step = curve.r_values[1] - curve.r_values[0];
        const double mode = curve.r_values[grid_argmax(curve)];
        const bool mode_ok = std::abs(mode - std::sqrt(double(d - 1))) <= step;
        ok = ok && mode_ok;
        detail += fmt("gaussian d=%d KS %.4f < %.4f, mode %.4f vs %.4f; ", d, ks, crit, mode, std::sqrt(double(d - 1)));
    }
    for (int d : {10, 100}) {
        const auto a = sample_uniform_sphere(n, std::size_t(d), 300 + d);
        const auto b = sample_uniform_sphere(n, std::size_t(d), 400 + d);
        const auto dist = rowwise_distances(a, b);
        const testing::NumericCdf cdf(uniform_sphere_curve(d));
        const std::size_t bins = 50;
        std::vector<double> edges;
        for (std::size_t i = 1; i < bins; ++i) {
            edges.push_back(cdf.quantile(double(i) / double(bins)));
        }
        std::vector<std::size_t> obs(bins);
        for (double r : dist) {
            ++obs[std::size_t(std::upper_bound(edges.begin(), edges.end(), r) - edges.begin())];
        }
        const std::vector<double> expect(bins, double(n) / double(bins));
        const double stat = testing::chi_square_statistic(obs, expect);
        const double p = testing::chi_square_pvalue(stat, double(bins - 1));
        ok = ok && p > 0.01;
        detail += fmt("sphere d=%d chi2 %.1f p=%.3f; ", d, stat, p);
    }
    const double w10 = full_width_half_max(mode_normalize(gaussian_curve(10)));
    const double w100 = full_width_half_max(mode_normalize(gaussian_curve(100)));
    const double s10 = full_width_half_max(mode_normalize(uniform_sphere_curve(10)));
    const double s100 = full_width_half_max(mode_normalize(uniform_sphere_curve(100)));
    ok = ok && w100 < w10 && s100 < s10;
    const double secs = seconds_since(start);
    ok = ok && secs < 60.0;
    detail += fmt("FWHM gaussian %.3f<%.3f sphere %.3f<%.3f; %.1f s", w100, w10, s100, s10, secs);
    return {ok, detail};
}

// ---- 5, 6 ----------------------------------------------------------------

struct DefaultRuns {
    bool ready = false;
    double budget_seconds = 0;
};

DefaultRuns g_default;

void ensure_default_sweep() {
    if (g_default.ready) {
        return;
    }
    const auto start = Clock::now();
    run("gen", "gen.json", "runs/default/data");
    run("fit", "fit.json", "runs/default/fit");
    run("sweep-budget", "sweep_budget.json", "runs/default/sweep_budget");
    g_default.budget_seconds = seconds_since(start);
    g_default.ready = true;
}

Outcome rsm_predictiveness() {
    ensure_default_sweep();
    double worst = 0;
    std::size_t points = 0;
    std::string where;
    for (const auto& r : table("runs/default/sweep_budget/sweep_budget.csv")) {
        const double pos = num(r.at("oracle_positives"));
        if (pos < 100) {
            continue;
        }
        ++points;
        const double err = std::abs(num(r.at("rsm")) - pos) / pos;
        if (err > worst) {
            worst = err;
            where = r.at("setting") + "/" + r.at("mode") + " B=" + r.at("budget");
        }
    }
    const double secs = g_default.budget_seconds;
    return {points > 0 && worst <= 0.15 && secs < 600.0,
            fmt("%zu budget points with >= 100 positives, max relative error %.3f (%s), gen+fit+sweep %.0f s", points,
                worst, where.c_str(), secs)};
}

Outcome range_beats_knn() {
    ensure_default_sweep();
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> by;
    for (const auto& r : table("runs/default/sweep_budget/sweep_budget.csv")) {
        by[{r.at("setting"), r.at("budget")}][r.at("mode")] = num(r.at("oracle_positives"));
    }
    std::size_t shared = 0;
    std::size_t bad = 0;
    double gap_at_max = 0;
    for (const auto& [key, modes] : by) {
        if (!modes.count("range") || !modes.count("knn")) {
            continue;
        }
        ++shared;
        bad += modes.at("range") < modes.at("knn");
        if (key.first == "strict" && key.second == "100000") {
            gap_at_max = modes.at("range") - modes.at("knn");
        }
    }
    return {shared > 0 && bad == 0,
            fmt("%zu shared budgets, %zu with range < knn; strict B=100000 range-knn = %.0f positives", shared, bad,
                gap_at_max)};
}

// ---- 7 -------------------------------------------------------------------

Outcome nprobe_saturation() {
    ensure_default_sweep();
    run("build", "build.json", "runs/default/ivf1024");
    run("sweep-nprobe", "sweep_nprobe.json", "runs/default/sweep_nprobe");
    const auto rows = table("runs/default/sweep_nprobe/sweep_nprobe.csv");
    auto first = [&](const char* col) {
        for (const auto& r : rows) {
            if (num(r.at(col)) >= 0.95) {
                return std::size_t(num(r.at("nprobe")));
            }
        }
        return std::numeric_limits<std::size_t>::max();
    };
    const std::size_t a = first("rsm_fraction_of_max");
    const std::size_t b = first("recall_fraction_of_max");
    return {a < b, fmt("95%% of max RSM at nprobe=%zu, 95%% of max recall@1 at nprobe=%zu (budget 1000, 1024 lists)", a,
                       b)};
}

// ---- 8 -------------------------------------------------------------------

Outcome codec_orderings() {
    run("gen", "gen_d256.json", "runs/d256/data");
    run("fit", "fit_d256.json", "runs/d256/fit");
    run("codec-table", "codec_table.json", "runs/d256/codec_table");
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> row;
    for (const auto& r : table("runs/d256/codec_table/codec_table.csv")) {
        row[{r.at("codec"), r.at("residual")}] = r;
    }
    auto get = [&](const std::string& codec, const char* residual, const char* col) {
        const auto it = row.find({codec, residual});
        return it == row.end() ? std::numeric_limits<double>::quiet_NaN() : num(it->second.at(col));
    };
    const double pq8r = get("PQ8x8", "1", "rsm_strict");
    const double pq8 = get("PQ8x8", "0", "rsm_strict");
    const double itq64 = get("ITQ64", "0", "rsm_strict");
    const double pq32r = get("PQ32x8", "1", "rsm_strict");
    const double itq256 = get("ITQ256", "0", "rsm_strict");
    const double rec_ratio = get("PQ32x8", "1", "recall_at_1") / get("ITQ256", "0", "recall_at_1");
    const double rsm_ratio = pq32r / itq256;
    const bool a = pq8r >= itq64;
    const bool b = pq8r > pq8;
    const bool c = rec_ratio > rsm_ratio;
    return {a && b && c,
            fmt("8 bytes: PQ8x8 residual %.1f %s ITQ64 %.1f; residual %.1f %s plain %.1f; 32 bytes PQ32x8r/ITQ256: "
                "recall ratio %.3f %s RSM ratio %.3f (strict setting)",
                pq8r, a ? ">=" : "<", itq64, pq8r, b ? ">" : "<=", pq8, rec_ratio, c ? ">" : "<=", rsm_ratio)};
}

// ---- 9 -------------------------------------------------------------------

int shell(const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Every file of the output directory except the manifest, which records timings.
std::map<std::string, std::string> primary_outputs(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() != "manifest.json") {
            out[e.path().filename().string()] = read_file(e.path());
        }
    }
    return out;
}

Outcome determinism() {
    const fs::path base = "runs/determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    auto cfg = [&](const std::string& name, const std::string& body) {
        write_file_atomic(base / name, body);
        return (base / name).string();
    };
    const std::string d = (base / "a_gen").string();
    const std::string models = "{\"strict\": \"" + (base / "a_fit" / "model_strict.csv").string() +
                               "\", \"relaxed\": \"" + (base / "a_fit" / "model_relaxed.csv").string() + "\"}";
    const std::vector<std::pair<std::string, std::string>> steps = {
            {"gen", cfg("gen.json", R"({"dim": 16, "n_items": 6000, "n_queries": 200, "n_train": 2000,
                        "n_groups": 80, "singleton_fraction": 0.6, "tau_strict": 2.0, "tau_relaxed": 2.3, "seed": 11})")},
            {"fit", cfg("fit.json", "{\"dataset\": \"" + d + "\", \"n_far\": 5000, \"train_queries\": 500, \"seed\": 3}")},
            {"build", cfg("build.json", "{\"dataset\": \"" + d +
                                                "\", \"nlist\": 32, \"codec\": \"PQ4x8\", \"residual\": true, "
                                                "\"assigner\": \"pq_approx\", \"pq_train\": 2000, \"seed\": 4}")},
            {"sweep-budget", cfg("sb.json", "{\"dataset\": \"" + d + "\", \"models\": " + models +
                                                    ", \"budgets\": [0, 100, 400, 1000, 5000]}")},
            {"sweep-nprobe",
             cfg("sn.json", "{\"dataset\": \"" + d + "\", \"model\": \"" + (base / "a_fit" / "model_strict.csv").string() +
                                    "\", \"index\": \"" + (base / "a_build").string() +
                                    "\", \"nprobes\": [1, 4, 32], \"budget\": 300}")},
            {"codec-table", cfg("ct.json", "{\"dataset\": \"" + d + "\", \"models\": " + models +
                                                   ", \"budgets\": {\"strict\": 300, \"relaxed\": 600}, \"nlist\": 32, "
                                                   "\"nprobe\": 4, \"pq_train\": 2000, \"seed\": 5, "
                                                   "\"codecs\": [\"PQ4x8\", {\"codec\": \"PQ8x4\", \"residual\": true}, "
                                                   "\"ITQ16\"]}")},
            {"density", cfg("den.json", R"({"dims": [10, 100], "points": 2001})")},
    };
    std::size_t identical = 0;
    std::string bad;
    for (const auto& [command, config] : steps) {
        const std::string tag = command == "sweep-budget" ? "sb" : command == "sweep-nprobe" ? "sn" : command;
        const fs::path a = base / ("a_" + tag);
        const fs::path b = base / ("b_" + tag);
        const int ra = shell(std::string(RSBENCH_CLI_PATH) + " " + command + " --config " + config + " --out " +
                             a.string());
        const int rb = shell(std::string(RSBENCH_CLI_PATH) + " " + command + " --config " + config + " --out " +
                             b.string());
        if (ra != 0 || rb != 0) {
            bad += command + "(exit " + std::to_string(ra) + "/" + std::to_string(rb) + ") ";
            continue;
        }
        const auto oa = primary_outputs(a);
        if (oa.empty() || oa != primary_outputs(b)) {
            bad += command + " ";
            continue;
        }
        ++identical;
    }
    return {identical == steps.size(),
            fmt("%zu/%zu commands byte-identical across reruns%s%s", identical, steps.size(), bad.empty() ? "" : "; failed: ",
                bad.c_str())};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rsbench acceptance suite"};
    std::string workdir = RSBENCH_ACCEPTANCE_WORKDIR;
    std::string config_dir = RSBENCH_CONFIG_DIR;
    std::vector<int> only;
    app.add_option("--workdir", workdir, "Directory for generated datasets and outputs");
    app.add_option("--configs", config_dir, "Directory holding the default configurations");
    app.add_option("--only", only, "Run only these criteria (1-9)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    g_config_dir = fs::absolute(config_dir);
    fs::create_directories(workdir);
    fs::current_path(workdir);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
            {"PAV optimality", pav_optimality},
            {"budget optimality", budget_optimality},
            {"exact-index equivalence", exact_index_equivalence},
            {"distance-density correctness", density_correctness},
            {"RSM predictiveness", rsm_predictiveness},
            {"range beats k-NN in bulk mode", range_beats_knn},
            {"nprobe saturation", nprobe_saturation},
            {"codec orderings", codec_orderings},
            {"determinism", determinism},
    };
    std::vector<std::string> lines;
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) {
            continue;
        }
        const auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const std::string line = fmt("[%s] %d. %s: %s [%.1f s]", o.pass ? "PASS" : "FAIL", id,
                                     criteria[i].first.c_str(), o.detail.c_str(), seconds_since(start));
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        lines.push_back(line);
        failed += !o.pass;
    }
    std::printf("\n==== acceptance summary ====\n");
    for (const auto& l : lines) {
        std::printf("%s\n", l.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failed, lines.size());
    return failed == 0 ? 0 : 1;
}
