#pragma once

#include <cstdint>

namespace rsbench {

/// Fixed stream ids for sub-seed derivation. A stage's generator is seeded
/// with derive_seed(run_seed, stream), so each stage can be reproduced on its
/// own without replaying earlier stages' random draws.
enum class SeedStream : std::uint64_t {
    synth_groups = 1,
    synth_vectors = 2,
    synth_split = 3,
    coarse_kmeans = 4,
    pq_training = 5,
    itq_training = 6,
    assigner_training = 7,
    training_pairs = 8,
    subsample = 9,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// splitmix64(seed + 0x9E3779B97F4A7C15 * stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

inline std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) noexcept {
    return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

} // namespace rsbench
