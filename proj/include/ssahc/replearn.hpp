#pragma once

#include "ssahc/preprocess.hpp"
#include "ssahc/rng.hpp"
#include "ssahc/types.hpp"

#include <utility>
#include <vector>

namespace ssahc {

// Two-layer representation network:
//   h = W1 x + b1,  y = W2 (h / ||h||) + b2
struct NetworkParams {
    Matrix w1;  // D x D
    Vector b1;  // D
    Matrix w2;  // d x D
    Vector b2;  // d

    int in_dim() const { return static_cast<int>(w1.cols()); }
    int out_dim() const { return static_cast<int>(w2.rows()); }
};

// Gradient buffer with the same shape as NetworkParams.
using NetworkGrad = NetworkParams;

struct Triplet {
    int anchor = 0;
    int positive = 0;
    int negative = 0;
};

// Layer 1 <- whitening (W1 = W, b1 = -W mean), layer 2 <- PCA basis, b2 = 0.
// forward() at these parameters reproduces baseline_project bit for bit.
NetworkParams init_network(const WhiteningTransform& whitening, const PcaTransform& pca);

// Forward pass over all rows of X. Throws DegenerateVectorError (naming the
// row) when a hidden activation has norm <= 1e-12.
Matrix forward(const NetworkParams& theta, const Matrix& x);

// One triplet per within-cluster unordered pair: anchor/positive are the pair
// (anchor < positive), the negative is drawn by picking a different cluster
// uniformly, then one of its members uniformly. Emitted in cluster-then-pair
// lexicographic order. Requires >= 2 clusters; all-singleton states yield an
// empty list.
std::vector<Triplet> mine_triplets(const ClusterState& state, Rng& rng);

struct ObjectiveValue {
    double objective = 0.0;  // J = sum cos(ya,yb) - gamma cos(ya,yc)
    double loss = 0.0;       // L = (1+gamma)*T - J, nonnegative
};

ObjectiveValue triplet_objective(const NetworkParams& theta, const Matrix& x,
                                 const std::vector<Triplet>& triplets, double gamma);

// Analytic gradient of the loss L with respect to all parameters.
NetworkGrad objective_gradient(const NetworkParams& theta, const Matrix& x,
                               const std::vector<Triplet>& triplets, double gamma);

struct TrainResult {
    NetworkParams theta;
    std::vector<double> epoch_losses;  // loss after each full-batch Adam step
    double initial_loss = 0.0;
};

// Full-batch Adam (0.9/0.999, eps 1e-8) on the triplet loss. Triplets are
// mined once from `state` and held fixed. Stops when epoch loss drops to
// hp.eta times the initial loss, or at hp.max_epochs. Returns theta0
// untouched when no triplets are minable, when hp.max_epochs is 0, or when
// the initial loss is already <= 1e-12.
TrainResult train(const NetworkParams& theta0, const Matrix& x, const ClusterState& state,
                  const Hyperparams& hp, Rng& rng);

}  // namespace ssahc
