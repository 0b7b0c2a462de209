#include <rsbench/vecs_io.hpp>

#include <bit>
#include <cstring>

#include <rsbench/error.hpp>
#include <rsbench/fs.hpp>

namespace rsbench {

namespace {

static_assert(sizeof(float) == 4 && sizeof(std::int32_t) == 4);

template <class T>
T from_le(const char* p) {
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    if constexpr (std::endian::native == std::endian::big) {
        u = __builtin_bswap32(u);
    }
    T v;
    std::memcpy(&v, &u, 4);
    return v;
}

template <class T>
void append_le(std::string& out, T v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    if constexpr (std::endian::native == std::endian::big) {
        u = __builtin_bswap32(u);
    }
    char buf[4];
    std::memcpy(buf, &u, 4);
    out.append(buf, 4);
}

// Parses the common layout; returns (dim, payload values in file order).
template <class T>
std::pair<std::size_t, std::vector<T>> decode_vecs(const std::string& bytes, const std::string& what) {
    if (bytes.empty()) {
        throw_error(ErrorKind::data, what + ": empty file");
    }
    RSBENCH_CHECK(bytes.size() >= 4, data, what + ": truncated header");
    const std::int32_t d = from_le<std::int32_t>(bytes.data());
    RSBENCH_CHECK(d > 0, data, what + ": non-positive dimension " + std::to_string(d));
    const std::size_t record = 4 * (static_cast<std::size_t>(d) + 1);
    RSBENCH_CHECK(
            bytes.size() % record == 0,
            data,
            what + ": length " + std::to_string(bytes.size()) +
                    " is not a multiple of 4(d+1) = " + std::to_string(record));
    const std::size_t n = bytes.size() / record;
    std::vector<T> out;
    out.reserve(n * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        const char* rec = bytes.data() + i * record;
        const std::int32_t di = from_le<std::int32_t>(rec);
        RSBENCH_CHECK(
                di == d,
                data,
                what + ": vector " + std::to_string(i) + " has dimension " + std::to_string(di) +
                        ", expected " + std::to_string(d));
        for (std::int32_t j = 0; j < d; ++j) {
            out.push_back(from_le<T>(rec + 4 * (1 + static_cast<std::size_t>(j))));
        }
    }
    return {static_cast<std::size_t>(d), std::move(out)};
}

} // namespace

std::string encode_fvecs(const VectorDataset& data) {
    std::string out;
    out.reserve(data.count() * 4 * (data.dim() + 1));
    for (std::size_t i = 0; i < data.count(); ++i) {
        append_le(out, static_cast<std::int32_t>(data.dim()));
        for (float v : data.row(i)) {
            append_le(out, v);
        }
    }
    return out;
}

VectorDataset decode_fvecs(const std::string& bytes, const std::string& what) {
    auto [d, values] = decode_vecs<float>(bytes, what);
    try {
        return VectorDataset(d, std::move(values));
    } catch (const Error& e) {
        throw Error(ErrorKind::data, what + ": " + e.what());
    }
}

VectorDataset read_fvecs(const std::filesystem::path& path) {
    return decode_fvecs(read_file(path), path.string());
}

void write_fvecs(const std::filesystem::path& path, const VectorDataset& data) {
    write_file_atomic(path, encode_fvecs(data));
}

IntMatrix read_ivecs(const std::filesystem::path& path) {
    auto [d, values] = decode_vecs<std::int32_t>(read_file(path), path.string());
    return IntMatrix{d, std::move(values)};
}

void write_ivecs(const std::filesystem::path& path, const IntMatrix& data) {
    RSBENCH_CHECK(data.dim > 0, invalid_argument, "ivecs dimension must be positive");
    RSBENCH_CHECK(
            data.data.size() % data.dim == 0,
            invalid_argument,
            "ivecs buffer is not a multiple of its dimension");
    std::string out;
    for (std::size_t i = 0; i < data.count(); ++i) {
        append_le(out, static_cast<std::int32_t>(data.dim));
        for (std::size_t j = 0; j < data.dim; ++j) {
            append_le(out, data.data[i * data.dim + j]);
        }
    }
    write_file_atomic(path, out);
}

} // namespace rsbench
