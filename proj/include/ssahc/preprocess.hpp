#pragma once

#include "ssahc/types.hpp"

namespace ssahc {

// Affine transform mapping the data it was fit on to zero mean and identity
// sample covariance (up to the eigenvalue floor). apply() computes
// W*x + bias with bias = -W*mean, so repeated application paths are
// bit-identical with the network layer it initializes.
struct WhiteningTransform {
    Vector mean;
    Matrix w;     // dim x dim
    Vector bias;  // -w * mean, cached at construction

    int dim() const { return static_cast<int>(w.rows()); }
    Vector apply(const Vector& x) const { return w * x + bias; }
};

// Top-d principal directions, one per row, orthonormal, descending
// eigenvalue. Sign convention: the largest-magnitude entry of each row is
// positive (first such entry on ties).
struct PcaTransform {
    Matrix basis;  // d x dim

    int out_dim() const { return static_cast<int>(basis.rows()); }
    int in_dim() const { return static_cast<int>(basis.cols()); }
};

// Fit a whitening transform on background rows (M x D, M >= 2). Covariance
// eigenvalues are floored at 1e-10 before inversion.
WhiteningTransform compute_whitening(const Matrix& background);

// v / ||v||. Throws DegenerateVectorError when ||v|| <= 1e-12.
Vector length_normalize(const Vector& v);

// Fit PCA on rows (expected whitened + length-normalized). 1 <= d <= D.
PcaTransform compute_pca(const Matrix& rows, int d);

// Whiten, length-normalize and PCA-project every row of a recording. The PCA
// is fit on this recording's normalized whitened rows. Output is N x d.
Matrix baseline_project(const Recording& recording, const WhiteningTransform& whitening, int d);

namespace detail {
// Rows after whitening + length normalization; shared by baseline_project and
// the pipeline so the PCA fit sees identical inputs on both paths.
Matrix normalized_whitened_rows(const Matrix& embeddings, const WhiteningTransform& whitening);
}  // namespace detail

}  // namespace ssahc
