#include <rsbench/ivf.hpp>

#include <algorithm>
#include <cstring>
#include <numeric>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>
#include <rsbench/parallel.hpp>

#include "topk.hpp"

namespace rsbench {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t code_size(const Codec& codec, std::size_t dim) {
    return std::visit(
            Overloaded{
                    [&](const FlatCodec&) { return dim * sizeof(float); },
                    [](const PQCodebook& pq) { return pq.code_size(); },
                    [](const ITQModel& itq) { return itq.code_size(); },
            },
            codec);
}

std::string codec_name(const Codec& codec) {
    return std::visit(
            Overloaded{
                    [](const FlatCodec&) { return std::string("Flat"); },
                    [](const PQCodebook& pq) {
                        return "PQ" + std::to_string(pq.m()) + "x" + std::to_string(pq.bits());
                    },
                    [](const ITQModel& itq) { return "ITQ" + std::to_string(itq.n_bits); },
            },
            codec);
}

PqApproxAssigner make_pq_assigner(
        const Centroids& centroids,
        std::size_t rerank_factor,
        std::size_t m,
        int bits,
        std::uint64_t seed) {
    RSBENCH_CHECK(rerank_factor >= 1, invalid_argument, "rerank_factor must be >= 1");
    const std::size_t d = centroids.dim();
    if (m == 0) {
        m = d % 2 == 0 ? d / 2 : d;
    }
    PQCodebook cb = train_pq(centroids.vectors, m, bits, seed);
    auto codes = encode_pq_batch(cb, centroids.vectors);
    return PqApproxAssigner{std::move(cb), std::move(codes), rerank_factor};
}

namespace {

struct Scored {
    double dist;
    std::int64_t id;
    bool operator<(const Scored& o) const noexcept {
        return dist != o.dist ? dist < o.dist : id < o.id;
    }
};

void take_smallest(std::vector<Scored>& v, std::size_t n) {
    n = std::min(n, v.size());
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), v.end());
    v.resize(n);
}

} // namespace

std::vector<std::vector<std::int64_t>> coarse_assign(
        const Assigner& assigner,
        const Centroids& centroids,
        const VectorDataset& queries,
        std::size_t nprobe) {
    const std::size_t k = centroids.k();
    RSBENCH_CHECK(
            nprobe >= 1 && nprobe <= k,
            invalid_argument,
            "nprobe = " + std::to_string(nprobe) + " outside [1, " + std::to_string(k) + "]");
    RSBENCH_CHECK(queries.dim() == centroids.dim(), invalid_argument, "coarse_assign: dimension mismatch");
    const std::size_t d = centroids.dim();
    std::vector<std::vector<std::int64_t>> out(queries.count());
    parallel_for(queries.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<Scored> scored;
        for (std::size_t qi = begin; qi < end; ++qi) {
            const float* q = queries.row_ptr(qi);
            scored.clear();
            std::visit(
                    Overloaded{
                            [&](const ExactAssigner&) {
                                for (std::size_t c = 0; c < k; ++c) {
                                    scored.push_back({detail::l2sq(q, centroids.vectors.row_ptr(c), d),
                                                      static_cast<std::int64_t>(c)});
                                }
                            },
                            [&](const PqApproxAssigner& pa) {
                                const auto tables = adc_tables(pa.prefilter, queries.row(qi));
                                const std::size_t cs = pa.prefilter.code_size();
                                for (std::size_t c = 0; c < k; ++c) {
                                    scored.push_back(
                                            {adc_distance(pa.prefilter, tables, {pa.centroid_codes.data() + c * cs, cs}),
                                             static_cast<std::int64_t>(c)});
                                }
                                take_smallest(scored, std::min(k, pa.rerank_factor * nprobe));
                                for (auto& s : scored) {
                                    s.dist = detail::l2sq(q, centroids.vectors.row_ptr(static_cast<std::size_t>(s.id)), d);
                                }
                            },
                    },
                    assigner);
            take_smallest(scored, nprobe);
            auto& ids = out[qi];
            ids.reserve(nprobe);
            for (const auto& s : scored) {
                ids.push_back(s.id);
            }
        }
    });
    return out;
}

IVFIndex build_ivf(const VectorDataset& db, Centroids centroids, Codec codec, bool residual, Assigner assigner) {
    const std::size_t d = db.dim();
    RSBENCH_CHECK(centroids.dim() == d, invalid_argument, "build_ivf: centroid dimension mismatch");
    RSBENCH_CHECK(centroids.k() >= 1, invalid_argument, "build_ivf: no centroids");
    const bool is_pq = std::holds_alternative<PQCodebook>(codec);
    RSBENCH_CHECK(
            !(residual && std::holds_alternative<ITQModel>(codec)),
            invalid_argument,
            "residual encoding is not supported with ITQ (Hamming codes have no residual form)");
    RSBENCH_CHECK(!residual || is_pq, invalid_argument, "residual encoding requires a PQ codec");
    if (is_pq) {
        RSBENCH_CHECK(std::get<PQCodebook>(codec).dim() == d, invalid_argument, "build_ivf: PQ dimension mismatch");
    }
    if (const auto* itq = std::get_if<ITQModel>(&codec)) {
        RSBENCH_CHECK(itq->dim == d, invalid_argument, "build_ivf: ITQ dimension mismatch");
    }
    if (const auto* pa = std::get_if<PqApproxAssigner>(&assigner)) {
        RSBENCH_CHECK(
                pa->prefilter.dim() == d && pa->centroid_codes.size() == centroids.k() * pa->prefilter.code_size(),
                invalid_argument,
                "build_ivf: PQ assigner does not match the centroids");
    }

    IVFIndex index{std::move(centroids), std::move(codec), residual, std::move(assigner), {}, db.count()};
    const std::size_t cs = index.code_size();
    const Assignment assign = assign_nearest(index.centroids.vectors, db);

    // Encode in parallel into a flat buffer, then scatter into lists in id order.
    std::vector<std::uint8_t> codes(db.count() * cs);
    parallel_for(db.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<float> tmp(d);
        for (std::size_t i = begin; i < end; ++i) {
            std::span<std::uint8_t> out(codes.data() + i * cs, cs);
            const auto x = db.row(i);
            std::visit(
                    Overloaded{
                            [&](const FlatCodec&) { std::memcpy(out.data(), x.data(), cs); },
                            [&](const PQCodebook& pq) {
                                if (index.residual) {
                                    const float* c = index.centroids.vectors.row_ptr(
                                            static_cast<std::size_t>(assign.labels[i]));
                                    for (std::size_t j = 0; j < d; ++j) {
                                        tmp[j] = x[j] - c[j];
                                    }
                                    encode_pq(pq, tmp, out);
                                } else {
                                    encode_pq(pq, x, out);
                                }
                            },
                            [&](const ITQModel& itq) { encode_itq(itq, x, out); },
                    },
                    index.codec);
        }
    });

    index.lists.resize(index.nlist());
    for (std::size_t i = 0; i < db.count(); ++i) {
        auto& l = index.lists[static_cast<std::size_t>(assign.labels[i])];
        l.ids.push_back(static_cast<std::int64_t>(i));
        l.codes.insert(l.codes.end(), codes.begin() + static_cast<std::ptrdiff_t>(i * cs),
                       codes.begin() + static_cast<std::ptrdiff_t>((i + 1) * cs));
    }
    return index;
}

std::vector<float> reconstruct(const IVFIndex& index, std::size_t list_no, std::size_t offset) {
    RSBENCH_CHECK(list_no < index.lists.size(), invalid_argument, "reconstruct: list out of range");
    const auto& l = index.lists[list_no];
    RSBENCH_CHECK(offset < l.ids.size(), invalid_argument, "reconstruct: offset out of range");
    const std::size_t cs = index.code_size();
    const std::span<const std::uint8_t> code(l.codes.data() + offset * cs, cs);
    return std::visit(
            Overloaded{
                    [&](const FlatCodec&) {
                        std::vector<float> x(index.dim());
                        std::memcpy(x.data(), code.data(), cs);
                        return x;
                    },
                    [&](const PQCodebook& pq) {
                        auto x = decode_pq(pq, code);
                        if (index.residual) {
                            const float* c = index.centroids.vectors.row_ptr(list_no);
                            for (std::size_t j = 0; j < x.size(); ++j) {
                                x[j] += c[j];
                            }
                        }
                        return x;
                    },
                    [&](const ITQModel&) -> std::vector<float> {
                        throw_error(ErrorKind::invalid_argument, "ITQ codes cannot be reconstructed");
                    },
            },
            index.codec);
}

namespace {

// Calls on(query_index, db_id, dist2) for every stored vector of the visited
// lists of queries [begin, end), in no particular order.
template <class OnCandidate>
void scan_queries(
        const IVFIndex& index,
        const VectorDataset& queries,
        const std::vector<std::vector<std::int64_t>>& probes,
        std::size_t begin,
        std::size_t end,
        OnCandidate&& on) {
    const std::size_t d = index.dim();
    const std::size_t cs = index.code_size();
    std::visit(
            Overloaded{
                    [&](const FlatCodec&) {
                        // List-major order: each list's vectors stay in cache
                        // while every query probing it is scanned.
                        std::vector<std::vector<std::uint32_t>> by_list(index.nlist());
                        for (std::size_t qi = begin; qi < end; ++qi) {
                            for (std::int64_t list_no : probes[qi]) {
                                by_list[static_cast<std::size_t>(list_no)].push_back(static_cast<std::uint32_t>(qi));
                            }
                        }
                        for (std::size_t list_no = 0; list_no < by_list.size(); ++list_no) {
                            const auto& l = index.lists[list_no];
                            for (std::uint32_t qi : by_list[list_no]) {
                                const float* q = queries.row_ptr(qi);
                                for (std::size_t e = 0; e < l.ids.size(); ++e) {
                                    on(qi, l.ids[e], static_cast<float>(detail::l2sq_bytes(q, l.codes.data() + e * cs, d)));
                                }
                            }
                        }
                    },
                    [&](const PQCodebook& pq) {
                        std::vector<float> tables;
                        std::vector<float> rq(d);
                        for (std::size_t qi = begin; qi < end; ++qi) {
                            const auto q = queries.row(qi);
                            if (!index.residual) {
                                tables = adc_tables(pq, q);
                            }
                            for (std::int64_t list_no : probes[qi]) {
                                const auto& l = index.lists[static_cast<std::size_t>(list_no)];
                                if (l.ids.empty()) {
                                    continue;
                                }
                                if (index.residual) {
                                    const float* c = index.centroids.vectors.row_ptr(static_cast<std::size_t>(list_no));
                                    for (std::size_t j = 0; j < d; ++j) {
                                        rq[j] = q[j] - c[j];
                                    }
                                    tables = adc_tables(pq, rq);
                                }
                                for (std::size_t e = 0; e < l.ids.size(); ++e) {
                                    on(qi, l.ids[e], static_cast<float>(adc_distance(pq, tables, {l.codes.data() + e * cs, cs})));
                                }
                            }
                        }
                    },
                    [&](const ITQModel& itq) {
                        std::vector<std::uint8_t> qcode(cs);
                        for (std::size_t qi = begin; qi < end; ++qi) {
                            encode_itq(itq, queries.row(qi), qcode);
                            for (std::int64_t list_no : probes[qi]) {
                                const auto& l = index.lists[static_cast<std::size_t>(list_no)];
                                for (std::size_t e = 0; e < l.ids.size(); ++e) {
                                    on(qi, l.ids[e],
                                       static_cast<float>(detail::hamming_unchecked(qcode.data(), l.codes.data() + e * cs, cs)));
                                }
                            }
                        }
                    },
            },
            index.codec);
}

PairList ivf_knn(
        const IVFIndex& index,
        const VectorDataset& queries,
        const std::vector<std::vector<std::int64_t>>& probes,
        std::size_t k) {
    const std::size_t nq = queries.count();
    std::vector<PairList> per_query(nq);
    parallel_for(nq, [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<detail::QueryHeap> heaps;
        heaps.reserve(end - begin);
        for (std::size_t q = begin; q < end; ++q) {
            heaps.emplace_back(k);
        }
        scan_queries(index, queries, probes, begin, end, [&](std::size_t qi, std::int64_t id, float d2) {
            auto& h = heaps[qi - begin];
            if (!h.rejects(d2)) {
                h.push({static_cast<std::int64_t>(qi), id, d2});
            }
        });
        for (std::size_t q = begin; q < end; ++q) {
            per_query[q] = heaps[q - begin].take_sorted();
        }
    });
    PairList out;
    for (auto& l : per_query) {
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

} // namespace

PairList ivf_search(const IVFIndex& index, const VectorDataset& queries, const SearchMode& mode, std::size_t nprobe) {
    const auto probes = coarse_assign(index.assigner, index.centroids, queries, nprobe);
    if (const auto* knn = std::get_if<KnnSearch>(&mode)) {
        return ivf_knn(index, queries, probes, knn->k);
    }
    const bool collect_all = std::holds_alternative<CollectSearch>(mode);
    const double r2 = collect_all ? 0.0 : std::get<RangeSearch>(mode).r2;
    const std::size_t nq = queries.count();
    std::vector<PairList> per_query(nq);
    parallel_for(nq, [&](std::size_t begin, std::size_t end, std::size_t) {
        scan_queries(index, queries, probes, begin, end, [&](std::size_t qi, std::int64_t id, float d2) {
            if (collect_all || d2 < r2) {
                per_query[qi].push_back({static_cast<std::int64_t>(qi), id, d2});
            }
        });
        for (std::size_t q = begin; q < end; ++q) {
            std::sort(per_query[q].begin(), per_query[q].end(), ByQueryThenDistance{});
        }
    });
    PairList out;
    for (auto& l : per_query) {
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

IvfSearcher::IvfSearcher(const IVFIndex& index, std::size_t nprobe) : index_(&index), nprobe_(nprobe) {
    RSBENCH_CHECK(
            nprobe >= 1 && nprobe <= index.nlist(),
            invalid_argument,
            "nprobe = " + std::to_string(nprobe) + " outside [1, " + std::to_string(index.nlist()) + "]");
}

PairList IvfSearcher::knn(const VectorDataset& queries, std::size_t k) const {
    return ivf_search(*index_, queries, KnnSearch{k}, nprobe_);
}

PairList IvfSearcher::smallest_pairs(const VectorDataset& queries, std::size_t n) const {
    const auto probes = coarse_assign(index_->assigner, index_->centroids, queries, nprobe_);
    const std::size_t workers = workers_for(queries.count());
    std::vector<detail::GlobalHeap> heaps(workers, detail::GlobalHeap(n));
    parallel_for(queries.count(), [&](std::size_t begin, std::size_t end, std::size_t w) {
        auto& h = heaps[w];
        scan_queries(*index_, queries, probes, begin, end, [&](std::size_t qi, std::int64_t id, float d2) {
            if (!h.rejects(d2)) {
                h.push({static_cast<std::int64_t>(qi), id, d2});
            }
        });
    });
    return detail::merge_global(heaps, n);
}

} // namespace rsbench
