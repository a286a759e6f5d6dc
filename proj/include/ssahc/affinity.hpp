#pragma once

#include "ssahc/types.hpp"

#include <vector>

namespace ssahc {

// Symmetric N x N cosine affinity with unit diagonal, entries in [-1, 1].
class AffinityMatrix {
public:
    // Validates symmetry (1e-12), range and unit diagonal; throws on failure.
    explicit AffinityMatrix(Matrix values);

    int size() const { return static_cast<int>(values_.rows()); }
    double operator()(int i, int j) const { return values_(i, j); }
    const Matrix& values() const { return values_; }

private:
    Matrix values_;
};

// a.b / (||a|| ||b||), clamped to [-1, 1]. Throws DegenerateVectorError when
// either norm is <= 1e-12.
double cosine_similarity(const Vector& a, const Vector& b);

// Pairwise cosine affinity of all row pairs of a representation matrix.
AffinityMatrix pairwise_affinity(const Matrix& representations);

// Average linkage: mean of A(x, y) over x in ci, y in cj. Clusters must be
// non-empty and disjoint.
double cluster_affinity(const std::vector<int>& ci, const std::vector<int>& cj,
                        const AffinityMatrix& a);

// Elementwise mean of two equal-size affinity matrices.
AffinityMatrix fuse_affinities(const AffinityMatrix& a1, const AffinityMatrix& a2);

}  // namespace ssahc
