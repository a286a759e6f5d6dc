#include "ssahc/pipeline.hpp"

#include "ssahc/affinity.hpp"
#include "ssahc/synth.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <string>
#include <vector>

using namespace ssahc;

namespace {

Recording tiled_recording(const std::vector<std::pair<double, double>>& spans, const Matrix& x,
                          const std::string& id = "rec") {
    Recording rec;
    rec.id = id;
    for (const auto& [start, end] : spans) rec.segments.push_back({start, end});
    rec.embeddings = x;
    return rec;
}

}  // namespace

TEST_CASE("initialize_clusters composes projection, affinity, and threshold AHC") {
    Rng rng(81);
    const Recording rec = oracle::random_recording(rng, 18, 8);
    const WhiteningTransform whitening = compute_whitening(rec.embeddings);
    Hyperparams hp;
    hp.pca_dim = 4;
    hp.init_threshold = 0.2;

    const auto [state, reps] = initialize_clusters(rec, whitening, hp);

    const Matrix expected_reps = baseline_project(rec, whitening, hp.pca_dim);
    CHECK(reps == expected_reps);
    const auto [expected_state, steps] = ahc_cluster(
        pairwise_affinity(expected_reps), StopRule::by_threshold(hp.init_threshold, 1), 0.0,
        hp.k_c);
    CHECK(state.labels == expected_state.labels);
    CHECK(state.num_clusters == expected_state.num_clusters);

    SUBCASE("a known speaker count floors the merge at max(target, 2)") {
        Hyperparams greedy = hp;
        greedy.init_threshold = -2.0;  // below any cosine: merge as far as allowed
        greedy.target_speakers = 1;
        const auto [floored, r2] = initialize_clusters(rec, whitening, greedy);
        (void)r2;
        CHECK(floored.num_clusters == 2);
    }
    SUBCASE("without a target the same threshold merges to one cluster") {
        Hyperparams greedy = hp;
        greedy.init_threshold = -2.0;
        const auto [single, r2] = initialize_clusters(rec, whitening, greedy);
        (void)r2;
        CHECK(single.num_clusters == 1);
    }
    SUBCASE("target range is validated") {
        Hyperparams bad = hp;
        bad.target_speakers = 0;
        CHECK_THROWS_AS(initialize_clusters(rec, whitening, bad), ConfigError);
        bad.target_speakers = 19;  // > num_segments
        CHECK_THROWS_AS(initialize_clusters(rec, whitening, bad), PreconditionError);
    }
}

TEST_CASE("labels_to_turns geometry") {
    SUBCASE("single segment") {
        const Recording rec = tiled_recording({{0.0, 1.5}}, Matrix::Ones(1, 2));
        ClusterState state;
        state.labels = {0};
        state.num_clusters = 1;
        const auto turns = labels_to_turns(rec, state);
        REQUIRE(turns.size() == 1);
        CHECK(turns[0].speaker == "spk0");
        CHECK(turns[0].onset_sec == 0.0);
        CHECK(turns[0].duration_sec == 1.5);
        CHECK(turns[0].recording_id == "rec");
    }
    SUBCASE("half-overlapped pair splits at the midpoint") {
        const Recording rec = tiled_recording({{0.0, 1.5}, {0.75, 2.25}}, Matrix::Ones(2, 2));
        ClusterState state;
        state.labels = {0, 1};
        state.num_clusters = 2;
        const auto turns = labels_to_turns(rec, state);
        REQUIRE(turns.size() == 2);
        CHECK(turns[0].onset_sec == 0.0);
        CHECK(turns[0].duration_sec == doctest::Approx(1.125).epsilon(1e-15));
        CHECK(turns[1].onset_sec == doctest::Approx(1.125).epsilon(1e-15));
        CHECK(turns[1].duration_sec == doctest::Approx(1.125).epsilon(1e-15));
    }
    SUBCASE("equal labels collapse into one turn") {
        const Recording rec = tiled_recording(
            {{0.0, 1.5}, {0.75, 2.25}, {1.5, 3.0}, {2.25, 3.75}}, Matrix::Ones(4, 2));
        ClusterState state;
        state.labels = {0, 0, 0, 0};
        state.num_clusters = 1;
        const auto turns = labels_to_turns(rec, state);
        REQUIRE(turns.size() == 1);
        CHECK(turns[0].speaker == "spk0");
        CHECK(turns[0].onset_sec == 0.0);
        CHECK(turns[0].duration_sec == 3.75);
    }
    SUBCASE("alternation produces one turn per run") {
        const Recording rec = tiled_recording(
            {{0.0, 1.5}, {0.75, 2.25}, {1.5, 3.0}}, Matrix::Ones(3, 2));
        ClusterState state;
        state.labels = {0, 1, 0};
        state.num_clusters = 2;
        const auto turns = labels_to_turns(rec, state);
        REQUIRE(turns.size() == 3);
        CHECK(turns[0].speaker == "spk0");
        CHECK(turns[1].speaker == "spk1");
        CHECK(turns[2].speaker == "spk0");
        // Contiguous tiling of [0, 3].
        CHECK(turns[0].onset_sec == 0.0);
        for (std::size_t i = 1; i < turns.size(); ++i)
            CHECK(turns[i].onset_sec ==
                  doctest::Approx(turns[i - 1].onset_sec + turns[i - 1].duration_sec)
                      .epsilon(1e-15));
        CHECK(turns.back().onset_sec + turns.back().duration_sec ==
              doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("non-monotone midpoints are clamped and empty turns dropped") {
        // The first segment swallows the later ones; their clamped spans are
        // empty and must not appear.
        const Recording rec = tiled_recording(
            {{0.0, 10.0}, {1.0, 1.5}, {2.0, 2.5}}, Matrix::Ones(3, 2));
        ClusterState state;
        state.labels = {0, 1, 2};
        state.num_clusters = 3;
        const auto turns = labels_to_turns(rec, state);
        REQUIRE(turns.size() == 1);
        CHECK(turns[0].speaker == "spk0");
        CHECK(turns[0].onset_sec == 0.0);
        CHECK(turns[0].duration_sec == doctest::Approx(5.5).epsilon(1e-15));
    }
    SUBCASE("label count must match the segment count") {
        const Recording rec = tiled_recording({{0.0, 1.5}, {0.75, 2.25}}, Matrix::Ones(2, 2));
        ClusterState state;
        state.labels = {0};
        state.num_clusters = 1;
        CHECK_THROWS_AS(labels_to_turns(rec, state), DimensionError);
    }
}

TEST_CASE("run_ssa reaches a known speaker count and logs the schedule") {
    SynthSpec spec;
    spec.num_speakers = 2;
    spec.duration_sec = 15.75;  // exactly 20 segments
    spec.separation = 1.5;
    spec.within_noise = 0.1;
    spec.dim = 8;
    spec.seed = 11;
    const auto [rec, truth] = generate_recording(spec);
    REQUIRE(rec.num_segments() == 20);
    const WhiteningTransform whitening = compute_whitening(rec.embeddings);

    Hyperparams hp;
    hp.target_speakers = 2;
    hp.init_threshold = 1.01;  // above any cosine: no initial merges, N0 = 20
    hp.num_iterations = 2;
    hp.pca_dim = 4;
    hp.max_epochs = 10;

    const DiarizationResult result = run_ssa(rec, whitening, hp);
    CHECK(result.initial_clusters == 20);
    CHECK(result.clusters.num_clusters == 2);
    REQUIRE(result.iterations.size() == 2);
    // Geometric schedule: round(20 * (2/20)^(1/2)) = round(sqrt(40)) = 6.
    CHECK(result.iterations[0].clusters_after == 6);
    CHECK(result.iterations[0].merges == 14);
    CHECK(result.iterations[1].clusters_after == 2);
    CHECK(result.iterations[1].merges == 4);
    CHECK(result.loss_history.size() == result.iterations.size());

    // All-singleton initialization has no positive pairs: round 1 cannot
    // train, round 2 can.
    CHECK(result.iterations[0].epochs == 0);
    CHECK(result.iterations[1].epochs > 0);

    SUBCASE("merge trace covers both phases with correct numbering") {
        REQUIRE(result.merge_trace.size() == 18);  // 14 + 4, none in phase 0
        for (std::size_t i = 0; i < 14; ++i) CHECK(result.merge_trace[i].iteration == 1);
        for (std::size_t i = 14; i < 18; ++i) CHECK(result.merge_trace[i].iteration == 2);
    }
    SUBCASE("reruns are bitwise identical") {
        const DiarizationResult again = run_ssa(rec, whitening, hp);
        CHECK(again.clusters.labels == result.clusters.labels);
        CHECK(again.representations == result.representations);
        CHECK(again.affinity == result.affinity);
        CHECK(serialize_report(again) == serialize_report(result));
    }
    SUBCASE("the explicit-rng overload uses the derived per-recording stream") {
        Rng rng(derive_seed(hp.seed, rec.id));
        const DiarizationResult manual = run_ssa(rec, whitening, hp, rng);
        CHECK(manual.clusters.labels == result.clusters.labels);
        CHECK(manual.representations == result.representations);
    }
}

TEST_CASE("max_epochs 0 with one round equals the baseline plus count-mode AHC") {
    SynthSpec spec;
    spec.num_speakers = 3;
    spec.duration_sec = 30.0;
    spec.separation = 1.0;
    spec.within_noise = 0.2;
    spec.seed = 6;
    const auto [rec, truth] = generate_recording(spec);
    const WhiteningTransform whitening = compute_whitening(rec.embeddings);

    Hyperparams hp;
    hp.target_speakers = 3;
    hp.max_epochs = 0;
    hp.num_iterations = 1;
    hp.pca_dim = 5;

    const DiarizationResult result = run_ssa(rec, whitening, hp);

    // Same computation by hand: the untrained network equals the baseline
    // projection, so round 1 merges the initial state on the same affinities.
    const auto [state0, reps] = initialize_clusters(rec, whitening, hp);
    const auto [expected, steps] =
        ahc_cluster(pairwise_affinity(reps), StopRule::by_count(3), hp.lambda, hp.k_c, state0);
    CHECK(result.clusters.labels == expected.labels);
    CHECK(result.representations == reps);
}

TEST_CASE("run_ssa stops early once the target count is reached") {
    SynthSpec spec;
    spec.num_speakers = 2;
    spec.duration_sec = 20.0;
    spec.seed = 4;
    const auto [rec, truth] = generate_recording(spec);
    const WhiteningTransform whitening = compute_whitening(rec.embeddings);

    Hyperparams hp;
    hp.target_speakers = 2;
    hp.init_threshold = -2.0;  // initialization merges straight down to N* = 2
    hp.num_iterations = 3;
    hp.pca_dim = 4;

    const DiarizationResult result = run_ssa(rec, whitening, hp);
    CHECK(result.initial_clusters == 2);
    CHECK(result.clusters.num_clusters == 2);
    CHECK(result.iterations.empty());
    CHECK(result.loss_history.empty());
    for (const MergeStep& step : result.merge_trace) CHECK(step.iteration == 0);
    CHECK(!result.merge_trace.empty());
    CHECK(!result.turns.empty());
}

TEST_CASE("unknown speaker count runs every round and keeps at least one cluster") {
    SynthSpec spec;
    spec.num_speakers = 3;
    spec.duration_sec = 30.0;
    spec.seed = 13;
    const auto [rec, truth] = generate_recording(spec);
    const WhiteningTransform whitening = compute_whitening(rec.embeddings);

    Hyperparams hp;
    hp.stop_threshold = 0.3;
    hp.num_iterations = 2;
    hp.pca_dim = 4;
    hp.max_epochs = 5;

    const DiarizationResult result = run_ssa(rec, whitening, hp);
    CHECK(result.clusters.num_clusters >= 1);
    CHECK(result.iterations.size() == 2);
    const DiarizationResult again = run_ssa(rec, whitening, hp);
    CHECK(serialize_report(again) == serialize_report(result));
}

TEST_CASE("single-segment recordings diarize with an external whitening") {
    Rng rng(82);
    const Recording background = oracle::random_recording(rng, 30, 6, "bg");
    const WhiteningTransform whitening = compute_whitening(background.embeddings);

    Recording rec = tiled_recording({{0.0, 1.5}}, Matrix::Zero(1, 6), "solo");
    for (int j = 0; j < 6; ++j) rec.embeddings(0, j) = rng.normal();

    Hyperparams hp;
    hp.target_speakers = 1;
    hp.pca_dim = 3;
    const DiarizationResult result = run_ssa(rec, whitening, hp);
    CHECK(result.clusters.num_clusters == 1);
    REQUIRE(result.turns.size() == 1);
    CHECK(result.turns[0].speaker == "spk0");
    CHECK(result.turns[0].onset_sec == 0.0);
    CHECK(result.turns[0].duration_sec == 1.5);
    CHECK(result.iterations.empty());  // already at the target
}

TEST_CASE("identical embeddings cannot be projected") {
    Recording rec = tiled_recording({{0.0, 1.5}, {0.75, 2.25}, {1.5, 3.0}}, Matrix::Ones(3, 4));
    const WhiteningTransform whitening = compute_whitening(rec.embeddings);
    Hyperparams hp;
    hp.pca_dim = 2;
    CHECK_THROWS_AS(initialize_clusters(rec, whitening, hp), DegenerateVectorError);
}

TEST_CASE("serialize_report emits a fixed field order") {
    DiarizationResult r;
    r.recording_id = "rec \"x\"\\";
    r.initial_clusters = 3;
    r.clusters.labels = {0, 1, 0};
    r.clusters.num_clusters = 2;
    IterationSummary it;
    it.iteration = 1;
    it.epochs = 2;
    it.merges = 1;
    it.clusters_after = 2;
    it.initial_loss = 1.5;
    it.final_loss = 0.75;
    r.iterations.push_back(it);
    r.loss_history.push_back({1.0, 0.75});
    MergeStep step;
    r.merge_trace.push_back(step);
    SpeakerTurn turn;
    turn.speaker = "spk0";
    turn.onset_sec = 0.0;
    turn.duration_sec = 1.5;
    r.turns.push_back(turn);

    const std::string expected =
        "{\n"
        "  \"recording_id\": \"rec \\\"x\\\"\\\\\",\n"
        "  \"initial_clusters\": 3,\n"
        "  \"final_clusters\": 2,\n"
        "  \"labels\": [0, 1, 0],\n"
        "  \"iterations\": [\n"
        "    {\"iteration\": 1, \"epochs\": 2, \"merges\": 1, \"clusters_after\": 2, "
        "\"initial_loss\": 1.5, \"final_loss\": 0.75, \"losses\": [1, 0.75]}\n"
        "  ],\n"
        "  \"merge_steps\": 1,\n"
        "  \"turns\": [\n"
        "    {\"speaker\": \"spk0\", \"onset\": 0, \"duration\": 1.5}\n"
        "  ]\n"
        "}\n";
    CHECK(serialize_report(r) == expected);

    SUBCASE("empty iteration and turn lists stay valid") {
        DiarizationResult empty;
        empty.recording_id = "e";
        empty.clusters.labels = {0};
        empty.clusters.num_clusters = 1;
        const std::string out = serialize_report(empty);
        CHECK(out.find("\"iterations\": []") != std::string::npos);
        CHECK(out.find("\"turns\": []") != std::string::npos);
    }
}
