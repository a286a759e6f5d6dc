#include "ssahc/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssahc {

namespace {
constexpr double kNormFloor = 1e-12;
constexpr double kTolerance = 1e-12;
}  // namespace

AffinityMatrix::AffinityMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols())
        throw DimensionError("affinity matrix must be square, got " + std::to_string(values_.rows()) +
                             "x" + std::to_string(values_.cols()));
    if (values_.rows() < 1) throw DimensionError("affinity matrix must be non-empty");
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        if (std::abs(values_(i, i) - 1.0) > kTolerance)
            throw PreconditionError("affinity diagonal entry " + std::to_string(i) + " is not 1");
        for (Eigen::Index j = i + 1; j < values_.cols(); ++j) {
            if (std::abs(values_(i, j) - values_(j, i)) > kTolerance)
                throw PreconditionError("affinity matrix asymmetric at (" + std::to_string(i) + ", " +
                                        std::to_string(j) + ")");
            if (values_(i, j) < -1.0 - kTolerance || values_(i, j) > 1.0 + kTolerance)
                throw PreconditionError("affinity entry (" + std::to_string(i) + ", " +
                                        std::to_string(j) + ") outside [-1, 1]");
        }
        if (!values_.row(i).allFinite())
            throw PreconditionError("non-finite affinity entry in row " + std::to_string(i));
    }
}

double cosine_similarity(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("cosine similarity: dimension mismatch");
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= kNormFloor || nb <= kNormFloor)
        throw DegenerateVectorError("cosine similarity of a near-zero vector");
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

AffinityMatrix pairwise_affinity(const Matrix& representations) {
    const Eigen::Index n = representations.rows();
    Matrix a(n, n);
    std::vector<double> norms(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        norms[static_cast<std::size_t>(i)] = representations.row(i).norm();
        if (norms[static_cast<std::size_t>(i)] <= kNormFloor)
            throw DegenerateVectorError("representation row " + std::to_string(i) + " is degenerate");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dot = representations.row(i).dot(representations.row(j));
            const double value = std::clamp(
                dot / (norms[static_cast<std::size_t>(i)] * norms[static_cast<std::size_t>(j)]), -1.0, 1.0);
            a(i, j) = value;
            a(j, i) = value;
        }
    }
    return AffinityMatrix(std::move(a));
}

double cluster_affinity(const std::vector<int>& ci, const std::vector<int>& cj,
                        const AffinityMatrix& a) {
    if (ci.empty() || cj.empty()) throw PreconditionError("cluster affinity of an empty cluster");
    for (int x : ci)
        for (int y : cj)
            if (x == y) throw PreconditionError("cluster affinity of overlapping clusters");
    double sum = 0.0;
    for (int x : ci)
        for (int y : cj) sum += a(x, y);
    return sum / (static_cast<double>(ci.size()) * static_cast<double>(cj.size()));
}

AffinityMatrix fuse_affinities(const AffinityMatrix& a1, const AffinityMatrix& a2) {
    if (a1.size() != a2.size())
        throw DimensionError("cannot fuse affinity matrices of sizes " + std::to_string(a1.size()) +
                             " and " + std::to_string(a2.size()));
    return AffinityMatrix((a1.values() + a2.values()) / 2.0);
}

}  // namespace ssahc
