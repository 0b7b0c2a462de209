#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <rsbench/dataset.hpp>

namespace rsbench {

// fvecs / ivecs: per vector a little-endian int32 dimension followed by that
// many little-endian float32 (fvecs) or int32 (ivecs) values. All vectors in a
// file share one dimension.

VectorDataset read_fvecs(const std::filesystem::path& path);
void write_fvecs(const std::filesystem::path& path, const VectorDataset& data);

/// In-memory fvecs encoding, used by write_fvecs and by tests.
std::string encode_fvecs(const VectorDataset& data);
VectorDataset decode_fvecs(const std::string& bytes, const std::string& what = "fvecs");

struct IntMatrix {
    std::size_t dim = 0;
    std::vector<std::int32_t> data;

    std::size_t count() const noexcept {
        return dim == 0 ? 0 : data.size() / dim;
    }
};

IntMatrix read_ivecs(const std::filesystem::path& path);
void write_ivecs(const std::filesystem::path& path, const IntMatrix& data);

} // namespace rsbench
