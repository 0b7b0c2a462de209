#pragma once

#include <cstdint>
#include <filesystem>

#include <rsbench/ivf.hpp>

namespace rsbench {

inline constexpr const char* kIvfMagic = "RSBENCH-IVF-1";

/// Writes an index directory:
///   meta.json        format, k, dim, codec, residual, assigner, seed
///   centroids.fvecs  coarse centroids
///   lists.bin        magic, then per list: int32 length, int32 ids, code bytes
///   codec.bin        PQ codewords or ITQ parameters (absent for flat)
///   assigner.bin     PQ prefilter and centroid codes (pq_approx only)
/// Every file is written atomically.
void save_ivf(const IVFIndex& index, const std::filesystem::path& dir, std::uint64_t seed = 0);

/// Reads a directory written by save_ivf. Throws ErrorKind::data on any
/// malformed or inconsistent file.
IVFIndex load_ivf(const std::filesystem::path& dir);

} // namespace rsbench
