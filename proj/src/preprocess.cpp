#include "ssahc/preprocess.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace ssahc {

namespace {

constexpr double kEigenvalueFloor = 1e-10;
constexpr double kNormFloor = 1e-12;

// Covariance of mean-centered rows; zero matrix for a single row.
Matrix sample_covariance(const Matrix& rows) {
    const Eigen::Index n = rows.rows();
    Matrix centered = rows.rowwise() - rows.colwise().mean();
    if (n < 2) return Matrix::Zero(rows.cols(), rows.cols());
    return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

}  // namespace

WhiteningTransform compute_whitening(const Matrix& background) {
    if (background.rows() < 2)
        throw InsufficientDataError("whitening needs at least 2 rows, got " +
                                    std::to_string(background.rows()));
    WhiteningTransform t;
    t.mean = background.colwise().mean();
    const Matrix cov = sample_covariance(background);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("whitening eigendecomposition failed");
    Vector scales = solver.eigenvalues().cwiseMax(kEigenvalueFloor).cwiseSqrt().cwiseInverse();
    t.w = scales.asDiagonal() * solver.eigenvectors().transpose();
    t.bias = -(t.w * t.mean);
    return t;
}

Vector length_normalize(const Vector& v) {
    const double norm = v.norm();
    if (norm <= kNormFloor) throw DegenerateVectorError("cannot length-normalize a near-zero vector");
    return v / norm;
}

PcaTransform compute_pca(const Matrix& rows, int d) {
    if (d < 1 || d > rows.cols())
        throw DimensionError("pca dim " + std::to_string(d) + " out of range for " +
                             std::to_string(rows.cols()) + " columns");
    const Matrix cov = sample_covariance(rows);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("pca eigendecomposition failed");

    // Eigen returns ascending eigenvalues; take the top d in descending order.
    PcaTransform pca;
    pca.basis.resize(d, rows.cols());
    const Eigen::Index last = rows.cols() - 1;
    for (int r = 0; r < d; ++r) {
        Vector direction = solver.eigenvectors().col(last - r);
        // Sign convention: largest-magnitude entry positive, first on ties.
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < direction.size(); ++i) {
            const double mag = std::abs(direction(i));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (direction(pivot) < 0.0) direction = -direction;
        pca.basis.row(r) = direction.transpose();
    }
    return pca;
}

namespace detail {

Matrix normalized_whitened_rows(const Matrix& embeddings, const WhiteningTransform& whitening) {
    if (embeddings.cols() != whitening.dim())
        throw DimensionError("whitening dim " + std::to_string(whitening.dim()) +
                             " does not match embedding dim " + std::to_string(embeddings.cols()));
    Matrix out(embeddings.rows(), embeddings.cols());
    for (Eigen::Index row = 0; row < embeddings.rows(); ++row) {
        const Vector h = whitening.apply(embeddings.row(row).transpose());
        const double norm = h.norm();
        if (norm <= kNormFloor)
            throw DegenerateVectorError("row " + std::to_string(row) +
                                        " is degenerate after whitening");
        out.row(row) = (h / norm).transpose();
    }
    return out;
}

}  // namespace detail

Matrix baseline_project(const Recording& recording, const WhiteningTransform& whitening, int d) {
    const Matrix normalized = detail::normalized_whitened_rows(recording.embeddings, whitening);
    const PcaTransform pca = compute_pca(normalized, d);
    // Row-wise basis projection; bit-identical to forward() at init_network
    // parameters (same per-row apply/normalize/project path).
    Matrix out(normalized.rows(), d);
    for (Eigen::Index row = 0; row < normalized.rows(); ++row) {
        const Vector z = normalized.row(row).transpose();
        out.row(row) = (pca.basis * z).transpose();
    }
    return out;
}

}  // namespace ssahc
