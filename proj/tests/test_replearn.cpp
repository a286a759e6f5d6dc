#include "ssahc/replearn.hpp"

#include "ssahc/preprocess.hpp"

#include "doctest.h"
#include "oracles.hpp"

using namespace ssahc;

namespace {

NetworkParams identity_network(int in_dim, int out_dim) {
    NetworkParams theta;
    theta.w1 = Matrix::Identity(in_dim, in_dim);
    theta.b1 = Vector::Zero(in_dim);
    theta.w2 = Matrix::Identity(out_dim, in_dim);
    theta.b2 = Vector::Zero(out_dim);
    return theta;
}

NetworkParams random_network(Rng& rng, int in_dim, int out_dim) {
    NetworkParams theta;
    theta.w1 = Matrix(in_dim, in_dim);
    theta.b1 = Vector(in_dim);
    theta.w2 = Matrix(out_dim, in_dim);
    theta.b2 = Vector(out_dim);
    for (int i = 0; i < in_dim; ++i) {
        theta.b1(i) = 0.1 * rng.normal();
        for (int j = 0; j < in_dim; ++j)
            theta.w1(i, j) = (i == j ? 1.0 : 0.0) + 0.3 * rng.normal();
    }
    for (int o = 0; o < out_dim; ++o) {
        theta.b2(o) = 0.1 * rng.normal();
        for (int j = 0; j < in_dim; ++j) theta.w2(o, j) = 0.5 * rng.normal();
    }
    return theta;
}

ClusterState two_cluster_state(int n) {
    ClusterState state;
    for (int i = 0; i < n; ++i) state.labels.push_back(i < n / 2 ? 0 : 1);
    state.num_clusters = 2;
    return state;
}

}  // namespace

TEST_CASE("forward at the initial network reproduces baseline_project bit for bit") {
    Rng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        const Recording rec = oracle::random_recording(rng, 25, 7);
        const WhiteningTransform whitening = compute_whitening(rec.embeddings);
        const Matrix normalized =
            detail::normalized_whitened_rows(rec.embeddings, whitening);
        const PcaTransform pca = compute_pca(normalized, 4);
        const NetworkParams theta = init_network(whitening, pca);

        const Matrix via_network = forward(theta, rec.embeddings);
        const Matrix via_baseline = baseline_project(rec, whitening, 4);
        CHECK(via_network == via_baseline);
    }
}

TEST_CASE("init_network rejects mismatched whitening and pca dimensions") {
    Rng rng(52);
    const Recording rec = oracle::random_recording(rng, 20, 6);
    const WhiteningTransform whitening = compute_whitening(rec.embeddings);
    const Matrix other = Matrix::Random(20, 5);
    const PcaTransform pca = compute_pca(other, 3);
    CHECK_THROWS_AS(init_network(whitening, pca), DimensionError);
}

TEST_CASE("forward matches a scalar-loop reference") {
    Rng rng(53);
    const Recording rec = oracle::random_recording(rng, 15, 6);
    const NetworkParams theta = random_network(rng, 6, 3);
    const Matrix got = forward(theta, rec.embeddings);
    const Matrix want = oracle::scalar_forward(theta, rec.embeddings);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forward errors") {
    const NetworkParams theta = identity_network(3, 2);
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(forward(theta, Matrix::Random(4, 5)), DimensionError);
    }
    SUBCASE("degenerate hidden activation names the row") {
        Matrix x = Matrix::Ones(3, 3);
        x.row(2).setZero();  // W1 x + b1 = 0 for the identity layer
        CHECK_THROWS_WITH_AS(forward(theta, x), doctest::Contains("2"),
                             DegenerateVectorError);
    }
}

TEST_CASE("mine_triplets emits one triplet per within-cluster pair") {
    ClusterState state;
    state.labels = {0, 0, 0, 1, 2};  // cluster 0 = {0,1,2}, 1 = {3}, 2 = {4}
    state.num_clusters = 3;
    Rng rng(54);
    const auto triplets = mine_triplets(state, rng);
    // Cluster 0 contributes pairs (0,1), (0,2), (1,2); singletons none.
    REQUIRE(triplets.size() == 3);
    CHECK(triplets[0].anchor == 0);
    CHECK(triplets[0].positive == 1);
    CHECK(triplets[1].anchor == 0);
    CHECK(triplets[1].positive == 2);
    CHECK(triplets[2].anchor == 1);
    CHECK(triplets[2].positive == 2);
    for (const Triplet& t : triplets) {
        const bool negative_elsewhere = t.negative == 3 || t.negative == 4;
        CHECK(negative_elsewhere);
    }

    SUBCASE("same seed, same triplets") {
        Rng rng_a(99), rng_b(99);
        const auto first = mine_triplets(state, rng_a);
        const auto second = mine_triplets(state, rng_b);
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i) {
            CHECK(first[i].anchor == second[i].anchor);
            CHECK(first[i].positive == second[i].positive);
            CHECK(first[i].negative == second[i].negative);
        }
    }
}

TEST_CASE("mine_triplets degenerate states") {
    Rng rng(55);
    SUBCASE("fewer than two clusters is an error") {
        ClusterState one;
        one.labels = {0, 0, 0};
        one.num_clusters = 1;
        CHECK_THROWS_AS(mine_triplets(one, rng), PreconditionError);
    }
    SUBCASE("all singletons yields an empty list") {
        ClusterState singles;
        singles.labels = {0, 1, 2, 3};
        singles.num_clusters = 4;
        CHECK(mine_triplets(singles, rng).empty());
    }
}

TEST_CASE("triplet_objective on hand geometry") {
    // Identity network; outputs are the length-normalized inputs.
    const NetworkParams theta = identity_network(2, 2);
    Matrix x(3, 2);
    x << 1.0, 0.0,  // anchor
        2.0, 0.0,   // positive, parallel to the anchor
        0.0, 3.0;   // negative, orthogonal
    const std::vector<Triplet> triplets = {{0, 1, 2}};
    const double gamma = 0.5;

    const ObjectiveValue v = triplet_objective(theta, x, triplets, gamma);
    CHECK(v.objective == 1.0);  // cos = 1 exactly, orthogonal cos = 0 exactly
    CHECK(v.loss == 0.5);       // (1 + 0.5) * 1 - 1

    SUBCASE("anti-parallel negative zeroes the loss") {
        Matrix y = x;
        y.row(2) << -1.0, 0.0;
        const ObjectiveValue w = triplet_objective(theta, y, triplets, gamma);
        CHECK(w.objective == 1.5);
        CHECK(w.loss == 0.0);
    }
    SUBCASE("loss identity holds on random data") {
        Rng rng(56);
        const Recording rec = oracle::random_recording(rng, 12, 4);
        const NetworkParams net = random_network(rng, 4, 3);
        std::vector<Triplet> ts;
        for (int i = 0; i + 2 < 12; i += 3) ts.push_back({i, i + 1, i + 2});
        const ObjectiveValue got = triplet_objective(net, rec.embeddings, ts, 0.3);
        const double expected =
            (1.0 + 0.3) * static_cast<double>(ts.size()) - got.objective;
        CHECK(got.loss == expected);  // exact affine identity
    }
    SUBCASE("empty triplet list is an error") {
        CHECK_THROWS_AS(triplet_objective(theta, x, {}, gamma), PreconditionError);
    }
    SUBCASE("out-of-range index is an error") {
        CHECK_THROWS_AS(triplet_objective(theta, x, {{0, 1, 7}}, gamma), PreconditionError);
    }
}

TEST_CASE("objective_gradient matches central finite differences") {
    Rng rng(57);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 6 + static_cast<int>(rng.uniform_index(6));
        const int in_dim = 3 + static_cast<int>(rng.uniform_index(3));
        const int out_dim = 2 + static_cast<int>(rng.uniform_index(2));
        const Recording rec = oracle::random_recording(rng, n, in_dim);
        const NetworkParams theta = random_network(rng, in_dim, out_dim);
        const ClusterState state = two_cluster_state(n);
        const auto triplets = mine_triplets(state, rng);
        REQUIRE(!triplets.empty());
        const double gamma = 0.2 + 0.1 * static_cast<double>(trial % 5);

        const NetworkGrad got = objective_gradient(theta, rec.embeddings, triplets, gamma);
        const NetworkGrad want = oracle::fd_gradient(theta, rec.embeddings, triplets, gamma);
        CHECK(oracle::gradient_rel_error(got, want) <= 1e-5);
    }
}

TEST_CASE("gradient vanishes exactly at the perfectly-arranged optimum") {
    // Anchor == positive and negative == -anchor: both cosine terms sit at
    // their clamped extremes and every contribution cancels bitwise.
    const NetworkParams theta = identity_network(3, 3);
    Matrix x(3, 3);
    x << 0.3, -1.2, 0.7,  //
        0.3, -1.2, 0.7,   //
        -0.3, 1.2, -0.7;
    const NetworkGrad grad = objective_gradient(theta, x, {{0, 1, 2}}, 0.4);
    CHECK(grad.w1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(grad.b1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(grad.w2.cwiseAbs().maxCoeff() == 0.0);
    CHECK(grad.b2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("train reduces the loss and respects the eta stop") {
    // Two clusters near (1, eps) and (eps, 1): separable but noisy.
    Rng rng(58);
    const int n = 16;
    Matrix x(n, 2);
    for (int i = 0; i < n; ++i) {
        const bool first = i < n / 2;
        x(i, 0) = (first ? 1.0 : 0.15) + 0.05 * rng.normal();
        x(i, 1) = (first ? 0.15 : 1.0) + 0.05 * rng.normal();
    }
    Recording rec;
    rec.id = "train";
    for (int i = 0; i < n; ++i) rec.segments.push_back({0.75 * i, 0.75 * i + 1.5});
    rec.embeddings = x;
    const ClusterState state = two_cluster_state(n);
    const NetworkParams theta0 = identity_network(2, 2);

    Hyperparams hp;
    hp.gamma = 0.5;
    hp.eta = 0.2;
    hp.learning_rate = 0.02;
    hp.max_epochs = 400;

    Rng train_rng(90);
    const TrainResult result = train(theta0, rec.embeddings, state, hp, train_rng);
    REQUIRE(!result.epoch_losses.empty());
    CHECK(result.initial_loss > 0.0);
    const double final_loss = result.epoch_losses.back();
    CHECK(final_loss < result.initial_loss);
    // Either the ratio target was reached or the epoch cap kicked in.
    const bool ratio_met = final_loss / result.initial_loss <= hp.eta;
    const bool capped = static_cast<int>(result.epoch_losses.size()) == hp.max_epochs;
    CHECK((ratio_met || capped));
    if (ratio_met && !capped) {
        // Every non-final epoch must have been above the stop ratio.
        for (std::size_t e = 0; e + 1 < result.epoch_losses.size(); ++e)
            CHECK(result.epoch_losses[e] / result.initial_loss > hp.eta);
    }

    SUBCASE("training is deterministic given the seed") {
        Rng a(90), b(90);
        const TrainResult r1 = train(theta0, rec.embeddings, state, hp, a);
        const TrainResult r2 = train(theta0, rec.embeddings, state, hp, b);
        CHECK(r1.epoch_losses == r2.epoch_losses);
        CHECK(r1.theta.w1 == r2.theta.w1);
        CHECK(r1.theta.b1 == r2.theta.b1);
        CHECK(r1.theta.w2 == r2.theta.w2);
        CHECK(r1.theta.b2 == r2.theta.b2);
    }
    SUBCASE("eta = 1.0 stops at the first epoch that does not regress") {
        Hyperparams lax = hp;
        lax.eta = 1.0;
        Rng c(90);
        const TrainResult r = train(theta0, rec.embeddings, state, lax, c);
        REQUIRE(!r.epoch_losses.empty());
        for (std::size_t e = 0; e + 1 < r.epoch_losses.size(); ++e)
            CHECK(r.epoch_losses[e] > r.initial_loss);
        CHECK(r.epoch_losses.back() <= r.initial_loss);
    }
}

TEST_CASE("train no-op paths return theta0 untouched") {
    Rng rng(59);
    const Recording rec = oracle::random_recording(rng, 8, 3);
    const NetworkParams theta0 = random_network(rng, 3, 2);
    Hyperparams hp;

    SUBCASE("max_epochs = 0") {
        hp.max_epochs = 0;
        Rng r(1);
        const TrainResult result = train(theta0, rec.embeddings, two_cluster_state(8), hp, r);
        CHECK(result.epoch_losses.empty());
        CHECK(result.theta.w1 == theta0.w1);
        CHECK(result.theta.b2 == theta0.b2);
    }
    SUBCASE("single cluster") {
        ClusterState one;
        one.labels.assign(8, 0);
        one.num_clusters = 1;
        Rng r(1);
        const TrainResult result = train(theta0, rec.embeddings, one, hp, r);
        CHECK(result.epoch_losses.empty());
        CHECK(result.theta.w1 == theta0.w1);
    }
    SUBCASE("all singletons") {
        ClusterState singles;
        for (int i = 0; i < 8; ++i) singles.labels.push_back(i);
        singles.num_clusters = 8;
        Rng r(1);
        const TrainResult result = train(theta0, rec.embeddings, singles, hp, r);
        CHECK(result.epoch_losses.empty());
        CHECK(result.theta.w2 == theta0.w2);
    }
    SUBCASE("already-zero loss") {
        // Cluster 0 rows all +v, cluster 1 rows all -v: cosines sit at the
        // clamped extremes, so the initial loss is exactly zero.
        Matrix x(6, 3);
        for (int i = 0; i < 6; ++i) {
            const double sign = i < 3 ? 1.0 : -1.0;
            x.row(i) << sign * 0.4, sign * -0.8, sign * 0.2;
        }
        const NetworkParams theta = identity_network(3, 3);
        Rng r(1);
        const TrainResult result = train(theta, x, two_cluster_state(6), Hyperparams{}, r);
        CHECK(result.initial_loss == 0.0);
        CHECK(result.epoch_losses.empty());
        CHECK(result.theta.w1 == theta.w1);
    }
}
