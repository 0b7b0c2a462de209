#include <rsbench/ivf_io.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <string_view>

#include <json.hpp>

#include <rsbench/error.hpp>
#include <rsbench/fs.hpp>
#include <rsbench/vecs_io.hpp>

namespace rsbench {

static_assert(std::endian::native == std::endian::little, "index files are little-endian");

namespace {

using nlohmann::json;

class ByteWriter {
   public:
    template <class T>
    void put(T v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        buf_.append(p, sizeof(T));
    }
    template <class T>
    void put_array(std::span<const T> v) {
        buf_.append(reinterpret_cast<const char*>(v.data()), v.size_bytes());
    }
    void put_bytes(std::string_view s) {
        buf_.append(s);
    }
    const std::string& str() const {
        return buf_;
    }

   private:
    std::string buf_;
};

class ByteReader {
   public:
    ByteReader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    template <class T>
    T get() {
        T v;
        std::memcpy(&v, take(sizeof(T)), sizeof(T));
        return v;
    }
    template <class T>
    std::vector<T> get_array(std::size_t n) {
        if (n > remaining() / sizeof(T)) {
            fail("truncated");
        }
        std::vector<T> v(n);
        std::memcpy(v.data(), take(n * sizeof(T)), n * sizeof(T));
        return v;
    }
    std::string_view get_bytes(std::size_t n) {
        return {take(n), n};
    }
    std::size_t remaining() const {
        return bytes_.size() - pos_;
    }
    void expect_end() const {
        if (remaining() != 0) {
            fail("trailing bytes");
        }
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw_error(ErrorKind::data, what_ + ": " + msg);
    }

   private:
    const char* take(std::size_t n) {
        if (n > remaining()) {
            fail("truncated");
        }
        const char* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::string_view bytes_;
    std::string what_;
    std::size_t pos_ = 0;
};

void put_pq(ByteWriter& w, const PQCodebook& pq) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(pq.dim()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(pq.m()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(pq.bits()));
    w.put_array<float>(pq.codewords());
}

PQCodebook get_pq(ByteReader& r) {
    const auto dim = r.get<std::uint32_t>();
    const auto m = r.get<std::uint32_t>();
    const auto bits = r.get<std::uint32_t>();
    if (m == 0 || dim == 0 || dim % m != 0 || (bits != 4 && bits != 8)) {
        r.fail("bad PQ header");
    }
    const std::size_t n = std::size_t{m} * (std::size_t{1} << bits) * (dim / m);
    return PQCodebook(dim, m, static_cast<int>(bits), r.get_array<float>(n));
}

std::string codec_kind(const Codec& c) {
    switch (c.index()) {
        case 0:
            return "flat";
        case 1:
            return "pq";
        default:
            return "itq";
    }
}

std::string read_in(const std::filesystem::path& dir, const char* name) {
    return read_file(dir / name);
}

} // namespace

void save_ivf(const IVFIndex& index, const std::filesystem::path& dir, std::uint64_t seed) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    RSBENCH_CHECK(!ec, io, "cannot create " + dir.string() + ": " + ec.message());

    json meta = {
            {"format", kIvfMagic},
            {"k", index.nlist()},
            {"dim", index.dim()},
            {"ntotal", index.ntotal},
            {"codec", codec_kind(index.codec)},
            {"codec_name", codec_name(index.codec)},
            {"code_size", index.code_size()},
            {"residual", index.residual},
            {"assigner", std::holds_alternative<ExactAssigner>(index.assigner) ? "exact" : "pq_approx"},
            {"seed", seed},
    };
    if (const auto* pa = std::get_if<PqApproxAssigner>(&index.assigner)) {
        meta["rerank_factor"] = pa->rerank_factor;
    }

    ByteWriter lists;
    lists.put_bytes(kIvfMagic);
    lists.put<std::int32_t>(static_cast<std::int32_t>(index.nlist()));
    lists.put<std::int32_t>(static_cast<std::int32_t>(index.code_size()));
    for (const auto& l : index.lists) {
        lists.put<std::int32_t>(static_cast<std::int32_t>(l.ids.size()));
        for (std::int64_t id : l.ids) {
            lists.put<std::int32_t>(static_cast<std::int32_t>(id));
        }
        lists.put_array<std::uint8_t>(l.codes);
    }

    if (const auto* pq = std::get_if<PQCodebook>(&index.codec)) {
        ByteWriter w;
        put_pq(w, *pq);
        write_file_atomic(dir / "codec.bin", w.str());
    } else if (const auto* itq = std::get_if<ITQModel>(&index.codec)) {
        ByteWriter w;
        w.put<std::uint32_t>(static_cast<std::uint32_t>(itq->dim));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(itq->n_bits));
        w.put_array<double>(itq->mean);
        w.put_array<double>(itq->pca_projection);
        w.put_array<double>(itq->rotation);
        write_file_atomic(dir / "codec.bin", w.str());
    }
    if (const auto* pa = std::get_if<PqApproxAssigner>(&index.assigner)) {
        ByteWriter w;
        put_pq(w, pa->prefilter);
        w.put_array<std::uint8_t>(pa->centroid_codes);
        write_file_atomic(dir / "assigner.bin", w.str());
    }
    write_fvecs(dir / "centroids.fvecs", index.centroids.vectors);
    write_file_atomic(dir / "lists.bin", lists.str());
    write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

IVFIndex load_ivf(const std::filesystem::path& dir) {
    json meta;
    try {
        meta = json::parse(read_in(dir, "meta.json"));
    } catch (const json::exception& e) {
        throw_error(ErrorKind::data, (dir / "meta.json").string() + ": " + e.what());
    }
    std::size_t k = 0;
    std::size_t dim = 0;
    std::size_t ntotal = 0;
    std::string codec;
    std::string assigner;
    bool residual = false;
    std::size_t rerank_factor = 8;
    try {
        if (meta.at("format").get<std::string>() != kIvfMagic) {
            throw_error(ErrorKind::data, (dir / "meta.json").string() + ": not an " + kIvfMagic + " index");
        }
        k = meta.at("k").get<std::size_t>();
        dim = meta.at("dim").get<std::size_t>();
        ntotal = meta.at("ntotal").get<std::size_t>();
        codec = meta.at("codec").get<std::string>();
        assigner = meta.at("assigner").get<std::string>();
        residual = meta.at("residual").get<bool>();
        if (meta.contains("rerank_factor")) {
            rerank_factor = meta.at("rerank_factor").get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw_error(ErrorKind::data, (dir / "meta.json").string() + ": " + e.what());
    }

    VectorDataset cvec = read_fvecs(dir / "centroids.fvecs");
    if (cvec.count() != k || cvec.dim() != dim) {
        throw_error(ErrorKind::data, (dir / "centroids.fvecs").string() + ": does not match meta.json");
    }
    Centroids centroids{std::move(cvec)};

    Codec c = FlatCodec{};
    if (codec == "pq") {
        const std::string bytes = read_in(dir, "codec.bin");
        ByteReader r(bytes, (dir / "codec.bin").string());
        c = get_pq(r);
        r.expect_end();
    } else if (codec == "itq") {
        const std::string bytes = read_in(dir, "codec.bin");
        ByteReader r(bytes, (dir / "codec.bin").string());
        ITQModel m;
        m.dim = r.get<std::uint32_t>();
        m.n_bits = r.get<std::uint32_t>();
        if (m.dim != dim || m.n_bits == 0 || m.n_bits > dim) {
            r.fail("bad ITQ header");
        }
        m.mean = r.get_array<double>(m.dim);
        m.pca_projection = r.get_array<double>(m.dim * m.n_bits);
        m.rotation = r.get_array<double>(m.n_bits * m.n_bits);
        r.expect_end();
        c = std::move(m);
    } else if (codec != "flat") {
        throw_error(ErrorKind::data, (dir / "meta.json").string() + ": unknown codec '" + codec + "'");
    }

    Assigner a = ExactAssigner{};
    if (assigner == "pq_approx") {
        const std::string bytes = read_in(dir, "assigner.bin");
        ByteReader r(bytes, (dir / "assigner.bin").string());
        PQCodebook pre = get_pq(r);
        auto codes = r.get_array<std::uint8_t>(k * pre.code_size());
        r.expect_end();
        a = PqApproxAssigner{std::move(pre), std::move(codes), rerank_factor};
    } else if (assigner != "exact") {
        throw_error(ErrorKind::data, (dir / "meta.json").string() + ": unknown assigner '" + assigner + "'");
    }

    IVFIndex index{std::move(centroids), std::move(c), residual, std::move(a), {}, ntotal};
    const std::size_t cs = index.code_size();
    const std::string bytes = read_in(dir, "lists.bin");
    ByteReader r(bytes, (dir / "lists.bin").string());
    if (r.get_bytes(std::strlen(kIvfMagic)) != kIvfMagic) {
        r.fail("bad magic");
    }
    if (static_cast<std::size_t>(r.get<std::int32_t>()) != k) {
        r.fail("list count does not match meta.json");
    }
    if (static_cast<std::size_t>(r.get<std::int32_t>()) != cs) {
        r.fail("code size does not match meta.json");
    }
    std::vector<char> seen(ntotal, 0);
    index.lists.resize(k);
    for (auto& l : index.lists) {
        const auto len = r.get<std::int32_t>();
        if (len < 0) {
            r.fail("negative list length");
        }
        const auto ids = r.get_array<std::int32_t>(static_cast<std::size_t>(len));
        l.ids.reserve(ids.size());
        for (std::int32_t id : ids) {
            if (id < 0 || static_cast<std::size_t>(id) >= ntotal || seen[static_cast<std::size_t>(id)]) {
                r.fail("invalid or duplicate id " + std::to_string(id));
            }
            seen[static_cast<std::size_t>(id)] = 1;
            l.ids.push_back(id);
        }
        l.codes = r.get_array<std::uint8_t>(ids.size() * cs);
    }
    r.expect_end();
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        r.fail("ids do not cover ntotal");
    }
    return index;
}

} // namespace rsbench
