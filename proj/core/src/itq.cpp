#include <rsbench/itq.hpp>

#include <Eigen/Dense>

#include <rsbench/error.hpp>
#include <rsbench/kmeans.hpp>
#include <rsbench/parallel.hpp>

namespace rsbench {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix sign_of(const Matrix& v) {
    return v.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
}

double quantization_loss(const Matrix& vr) {
    return (sign_of(vr) - vr).squaredNorm();
}

} // namespace

ITQTraining train_itq(
        const VectorDataset& data,
        std::size_t n_bits,
        std::size_t n_iters,
        std::uint64_t seed,
        std::size_t max_train) {
    const std::size_t d = data.dim();
    RSBENCH_CHECK(n_bits > 0, invalid_argument, "ITQ needs at least one bit");
    RSBENCH_CHECK(
            n_bits <= d,
            invalid_argument,
            "ITQ: n_bits = " + std::to_string(n_bits) + " exceeds dimension " + std::to_string(d));
    RSBENCH_CHECK(
            data.count() > n_bits,
            invalid_argument,
            "ITQ: need more than n_bits training vectors");
    const VectorDataset train = subsample(data, std::max(max_train, n_bits + 1), seed);
    const std::size_t n = train.count();

    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = train.row_ptr(i)[j];
        }
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    RSBENCH_CHECK(eig.info() == Eigen::Success, invariant, "ITQ: covariance eigendecomposition failed");
    // Eigenvalues come in ascending order; keep the n_bits largest, largest first.
    Matrix proj(d, n_bits);
    for (std::size_t b = 0; b < n_bits; ++b) {
        proj.col(static_cast<Eigen::Index>(b)) = eig.eigenvectors().col(static_cast<Eigen::Index>(d - 1 - b));
    }
    const Matrix v = x * proj;

    Matrix rot = Matrix::Identity(static_cast<Eigen::Index>(n_bits), static_cast<Eigen::Index>(n_bits));
    ITQTraining out;
    out.loss.push_back(quantization_loss(v * rot));
    for (std::size_t it = 0; it < n_iters; ++it) {
        const Matrix b = sign_of(v * rot);
        // max_R tr(B^T V R) over orthogonal R: with B^T V = U S W^T, R = W U^T.
        const Matrix c = b.transpose() * v;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
        rot = svd.matrixV() * svd.matrixU().transpose();
        out.loss.push_back(quantization_loss(v * rot));
    }

    ITQModel& m = out.model;
    m.dim = d;
    m.n_bits = n_bits;
    m.mean.assign(mean.data(), mean.data() + d);
    m.pca_projection.assign(proj.data(), proj.data() + d * n_bits);
    m.rotation.assign(rot.data(), rot.data() + n_bits * n_bits);
    return out;
}

std::vector<double> itq_project(const ITQModel& model, std::span<const float> x) {
    RSBENCH_CHECK(x.size() == model.dim, invalid_argument, "ITQ: dimension mismatch");
    const std::size_t d = model.dim;
    const std::size_t nb = model.n_bits;
    std::vector<double> centered(d);
    for (std::size_t j = 0; j < d; ++j) {
        centered[j] = static_cast<double>(x[j]) - model.mean[j];
    }
    std::vector<double> p(nb, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double cj = centered[j];
        const double* row = model.pca_projection.data() + j * nb;
        for (std::size_t b = 0; b < nb; ++b) {
            p[b] += cj * row[b];
        }
    }
    std::vector<double> out(nb, 0.0);
    for (std::size_t a = 0; a < nb; ++a) {
        const double pa = p[a];
        const double* row = model.rotation.data() + a * nb;
        for (std::size_t b = 0; b < nb; ++b) {
            out[b] += pa * row[b];
        }
    }
    return out;
}

void encode_itq(const ITQModel& model, std::span<const float> x, std::span<std::uint8_t> code) {
    RSBENCH_CHECK(code.size() == model.code_size(), invalid_argument, "encode_itq: code buffer size");
    const auto v = itq_project(model, x);
    std::fill(code.begin(), code.end(), 0);
    for (std::size_t b = 0; b < model.n_bits; ++b) {
        if (v[b] >= 0.0) {
            code[b / 8] |= static_cast<std::uint8_t>(1u << (b % 8));
        }
    }
}

std::vector<std::uint8_t> encode_itq(const ITQModel& model, std::span<const float> x) {
    std::vector<std::uint8_t> code(model.code_size());
    encode_itq(model, x, code);
    return code;
}

std::vector<std::uint8_t> encode_itq_batch(const ITQModel& model, const VectorDataset& data) {
    const std::size_t cs = model.code_size();
    std::vector<std::uint8_t> codes(data.count() * cs);
    parallel_for(data.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            encode_itq(model, data.row(i), std::span<std::uint8_t>(codes.data() + i * cs, cs));
        }
    });
    return codes;
}

int hamming(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    RSBENCH_CHECK(a.size() == b.size(), invalid_argument, "hamming: code length mismatch");
    return detail::hamming_unchecked(a.data(), b.data(), a.size());
}

} // namespace rsbench
