#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <rsbench/isotonic.hpp>
#include <rsbench/ivf.hpp>
#include <rsbench/synth.hpp>

namespace rsbench::cli {

inline constexpr int kSchemaVersion = 1;

struct RunOptions {
    std::string command;
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed; // overrides the config's "seed"
};

/// gen, fit, build, sweep-budget, sweep-nprobe, codec-table, density.
const std::vector<std::string>& command_names();

/// Runs one command, writing its outputs and manifest.json into out_dir.
/// Throws rsbench::Error.
void run_command(const RunOptions& options);

/// Command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

/// "Flat", "PQ<m>x<bits>" or "ITQ<bits>".
struct CodecSpec {
    enum class Kind { flat, pq, itq } kind = Kind::flat;
    std::size_t m = 0;
    std::size_t bits = 0;
};
CodecSpec parse_codec_spec(const std::string& s);

struct TrainingParams {
    std::size_t pq_train = 32768;
    std::size_t pq_iters = 25;
    std::size_t itq_train = 20000;
    std::size_t itq_iters = 50;
};

/// Trains the codec on `train` (on residuals to the nearest centroid when
/// residual is set).
Codec train_codec(
        const CodecSpec& spec,
        const VectorDataset& train,
        const Centroids& centroids,
        bool residual,
        const TrainingParams& params,
        std::uint64_t seed);

/// Positive model fitting on the training split: the first `train_queries`
/// training vectors act as queries against the rest.
std::vector<LabeledPair> training_pairs(
        const SynthDataset& data,
        OracleSetting setting,
        double r2_max,
        std::size_t n_far,
        std::size_t train_queries,
        std::uint64_t seed);

/// Relabels training pairs (produced by training_pairs with the same
/// train_queries) under another oracle setting.
void relabel_training_pairs(
        std::vector<LabeledPair>& pairs,
        const SynthDataset& data,
        OracleSetting setting,
        std::size_t train_queries);

} // namespace rsbench::cli
