#include "ssahc/replearn.hpp"

#include "ssahc/affinity.hpp"
#include "ssahc/ahc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssahc {

namespace {

constexpr double kNormFloor = 1e-12;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

struct ForwardCache {
    Matrix inputs;      // N x D
    Matrix hidden_hat;  // N x D, length-normalized hidden activations
    Vector hidden_norm; // N
    Matrix outputs;     // N x d
};

ForwardCache forward_cached(const NetworkParams& theta, const Matrix& x) {
    if (x.cols() != theta.in_dim())
        throw DimensionError("forward: input dim " + std::to_string(x.cols()) +
                             " does not match network dim " + std::to_string(theta.in_dim()));
    ForwardCache cache;
    cache.inputs = x;
    cache.hidden_hat.resize(x.rows(), theta.in_dim());
    cache.hidden_norm.resize(x.rows());
    cache.outputs.resize(x.rows(), theta.out_dim());
    for (Eigen::Index row = 0; row < x.rows(); ++row) {
        const Vector xi = x.row(row).transpose();
        const Vector h = theta.w1 * xi + theta.b1;
        const double norm = h.norm();
        if (norm <= kNormFloor)
            throw DegenerateVectorError("hidden activation of row " + std::to_string(row) +
                                        " is degenerate");
        const Vector hhat = h / norm;
        cache.hidden_hat.row(row) = hhat.transpose();
        cache.hidden_norm(row) = norm;
        const Vector y = theta.w2 * hhat + theta.b2;
        cache.outputs.row(row) = y.transpose();
    }
    return cache;
}

void check_triplets(const std::vector<Triplet>& triplets, Eigen::Index rows) {
    if (triplets.empty()) throw PreconditionError("empty triplet list");
    for (const Triplet& t : triplets) {
        if (t.anchor < 0 || t.anchor >= rows || t.positive < 0 || t.positive >= rows ||
            t.negative < 0 || t.negative >= rows)
            throw PreconditionError("triplet index out of range");
    }
}

}  // namespace

NetworkParams init_network(const WhiteningTransform& whitening, const PcaTransform& pca) {
    if (pca.in_dim() != whitening.dim())
        throw DimensionError("pca input dim " + std::to_string(pca.in_dim()) +
                             " does not match whitening dim " + std::to_string(whitening.dim()));
    NetworkParams theta;
    theta.w1 = whitening.w;
    theta.b1 = whitening.bias;
    theta.w2 = pca.basis;
    theta.b2 = Vector::Zero(pca.out_dim());
    return theta;
}

Matrix forward(const NetworkParams& theta, const Matrix& x) {
    return forward_cached(theta, x).outputs;
}

std::vector<Triplet> mine_triplets(const ClusterState& state, Rng& rng) {
    state.validate();
    if (state.num_clusters < 2)
        throw PreconditionError("triplet mining needs at least 2 clusters");
    const std::vector<std::vector<int>> clusters = clusters_from_state(state);
    std::vector<Triplet> triplets;
    const std::size_t k = clusters.size();
    for (std::size_t i = 0; i < k; ++i) {
        const std::vector<int>& members = clusters[i];
        for (std::size_t p = 0; p + 1 < members.size(); ++p) {
            for (std::size_t q = p + 1; q < members.size(); ++q) {
                std::size_t other = rng.uniform_index(k - 1);
                if (other >= i) ++other;
                const std::vector<int>& pool = clusters[other];
                Triplet t;
                t.anchor = members[p];
                t.positive = members[q];
                t.negative = pool[rng.uniform_index(pool.size())];
                triplets.push_back(t);
            }
        }
    }
    return triplets;
}

ObjectiveValue triplet_objective(const NetworkParams& theta, const Matrix& x,
                                 const std::vector<Triplet>& triplets, double gamma) {
    check_triplets(triplets, x.rows());
    const ForwardCache cache = forward_cached(theta, x);
    double objective = 0.0;
    for (const Triplet& t : triplets) {
        const Vector ya = cache.outputs.row(t.anchor).transpose();
        const Vector yb = cache.outputs.row(t.positive).transpose();
        const Vector yc = cache.outputs.row(t.negative).transpose();
        objective += cosine_similarity(ya, yb) - gamma * cosine_similarity(ya, yc);
    }
    ObjectiveValue value;
    value.objective = objective;
    // L = sum (1 - cos(ya,yb)) + gamma (1 + cos(ya,yc)), kept as an exact
    // affine image of J so the eta ratio has a nonnegative scale.
    value.loss = (1.0 + gamma) * static_cast<double>(triplets.size()) - objective;
    return value;
}

NetworkGrad objective_gradient(const NetworkParams& theta, const Matrix& x,
                               const std::vector<Triplet>& triplets, double gamma) {
    check_triplets(triplets, x.rows());
    const ForwardCache cache = forward_cached(theta, x);
    const Eigen::Index n = x.rows();
    const int d = theta.out_dim();

    // dL/dy accumulated per segment, in triplet order.
    Matrix grad_y = Matrix::Zero(n, d);
    std::vector<bool> touched(static_cast<std::size_t>(n), false);
    Vector norms(n);
    for (Eigen::Index row = 0; row < n; ++row) {
        norms(row) = cache.outputs.row(row).norm();
        if (norms(row) <= kNormFloor)
            throw DegenerateVectorError("output row " + std::to_string(row) + " is degenerate");
    }
    for (const Triplet& t : triplets) {
        const Vector ya = cache.outputs.row(t.anchor).transpose();
        const Vector yb = cache.outputs.row(t.positive).transpose();
        const Vector yc = cache.outputs.row(t.negative).transpose();
        const double na = norms(t.anchor), nb = norms(t.positive), nc = norms(t.negative);
        const double cos_ab = cosine_similarity(ya, yb);
        const double cos_ac = cosine_similarity(ya, yc);
        // d/du cos(u, v) = v/(|u||v|) - cos * u/|u|^2
        grad_y.row(t.anchor) -= (yb / (na * nb) - cos_ab * ya / (na * na)).transpose();
        grad_y.row(t.positive) -= (ya / (na * nb) - cos_ab * yb / (nb * nb)).transpose();
        grad_y.row(t.anchor) += gamma * (yc / (na * nc) - cos_ac * ya / (na * na)).transpose();
        grad_y.row(t.negative) += gamma * (ya / (na * nc) - cos_ac * yc / (nc * nc)).transpose();
        touched[static_cast<std::size_t>(t.anchor)] = true;
        touched[static_cast<std::size_t>(t.positive)] = true;
        touched[static_cast<std::size_t>(t.negative)] = true;
    }

    NetworkGrad grad;
    grad.w1 = Matrix::Zero(theta.w1.rows(), theta.w1.cols());
    grad.b1 = Vector::Zero(theta.b1.size());
    grad.w2 = Matrix::Zero(theta.w2.rows(), theta.w2.cols());
    grad.b2 = Vector::Zero(theta.b2.size());
    // Backprop per segment in row order (fixed reduction order).
    for (Eigen::Index row = 0; row < n; ++row) {
        if (!touched[static_cast<std::size_t>(row)]) continue;
        const Vector gy = grad_y.row(row).transpose();
        const Vector hhat = cache.hidden_hat.row(row).transpose();
        grad.w2 += gy * hhat.transpose();
        grad.b2 += gy;
        const Vector ghat = theta.w2.transpose() * gy;
        // Length-normalization Jacobian: (I - hhat hhat^T) / |h|
        const Vector gh = (ghat - hhat.dot(ghat) * hhat) / cache.hidden_norm(row);
        grad.w1 += gh * cache.inputs.row(row);
        grad.b1 += gh;
    }
    return grad;
}

TrainResult train(const NetworkParams& theta0, const Matrix& x, const ClusterState& state,
                  const Hyperparams& hp, Rng& rng) {
    TrainResult result;
    result.theta = theta0;

    const std::vector<std::vector<int>> clusters = clusters_from_state(state);
    const bool has_pair =
        std::any_of(clusters.begin(), clusters.end(), [](const auto& c) { return c.size() >= 2; });
    if (state.num_clusters < 2 || !has_pair) return result;

    const std::vector<Triplet> triplets = mine_triplets(state, rng);
    if (triplets.empty() || hp.max_epochs == 0) return result;

    result.initial_loss = triplet_objective(theta0, x, triplets, hp.gamma).loss;
    if (result.initial_loss <= 1e-12) return result;

    NetworkParams theta = theta0;
    NetworkGrad m, v;
    m.w1 = Matrix::Zero(theta.w1.rows(), theta.w1.cols());
    m.b1 = Vector::Zero(theta.b1.size());
    m.w2 = Matrix::Zero(theta.w2.rows(), theta.w2.cols());
    m.b2 = Vector::Zero(theta.b2.size());
    v = m;

    const double lr = hp.learning_rate;
    for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
        const NetworkGrad g = objective_gradient(theta, x, triplets, hp.gamma);
        const double bias1 = 1.0 - std::pow(kAdamBeta1, epoch);
        const double bias2 = 1.0 - std::pow(kAdamBeta2, epoch);
        auto adam_update = [&](Matrix& param, Matrix& m1, Matrix& m2, const Matrix& grad) {
            m1 = kAdamBeta1 * m1 + (1.0 - kAdamBeta1) * grad;
            m2 = (kAdamBeta2 * m2.array() + (1.0 - kAdamBeta2) * grad.array().square()).matrix();
            param.array() -=
                lr * (m1.array() / bias1) / ((m2.array() / bias2).sqrt() + kAdamEpsilon);
        };
        adam_update(theta.w1, m.w1, v.w1, g.w1);
        adam_update(theta.w2, m.w2, v.w2, g.w2);
        auto adam_update_vec = [&](Vector& param, Vector& m1, Vector& m2, const Vector& grad) {
            m1 = kAdamBeta1 * m1 + (1.0 - kAdamBeta1) * grad;
            m2 = (kAdamBeta2 * m2.array() + (1.0 - kAdamBeta2) * grad.array().square()).matrix();
            param.array() -=
                lr * (m1.array() / bias1) / ((m2.array() / bias2).sqrt() + kAdamEpsilon);
        };
        adam_update_vec(theta.b1, m.b1, v.b1, g.b1);
        adam_update_vec(theta.b2, m.b2, v.b2, g.b2);

        const double loss = triplet_objective(theta, x, triplets, hp.gamma).loss;
        result.epoch_losses.push_back(loss);
        if (loss / result.initial_loss <= hp.eta) break;
    }
    result.theta = std::move(theta);
    return result;
}

}  // namespace ssahc
