#include "ssahc/pipeline.hpp"

#include "ssahc/affinity.hpp"
#include "ssahc/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssahc {

namespace {

// Cluster-count schedule for known N*: geometric interpolation from N0 down
// to the target over `total` rounds.
int schedule_target(int n0, int target, int round_index, int total) {
    const double ratio = static_cast<double>(target) / static_cast<double>(n0);
    const double exponent = static_cast<double>(round_index) / static_cast<double>(total);
    const double value = static_cast<double>(n0) * std::pow(ratio, exponent);
    return std::max(target, static_cast<int>(std::lround(value)));
}

void append_json_string(std::string& out, const std::string& value) {
    out += '"';
    for (const char c : value) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

}  // namespace

std::pair<ClusterState, Matrix> initialize_clusters(const Recording& recording,
                                                    const WhiteningTransform& whitening,
                                                    const Hyperparams& hp) {
    hp.validate();
    recording.validate();
    int min_clusters = 1;
    if (hp.target_speakers) {
        if (*hp.target_speakers < 1 || *hp.target_speakers > recording.num_segments())
            throw PreconditionError("target speaker count must be within [1, num_segments]");
        // Keep at least two clusters so triplets stay minable on the way down.
        min_clusters = std::max(*hp.target_speakers, 2);
    }
    Matrix representations = baseline_project(recording, whitening, hp.pca_dim);
    const AffinityMatrix affinity = pairwise_affinity(representations);
    auto [state, steps] = ahc_cluster(
        affinity, StopRule::by_threshold(hp.init_threshold, min_clusters), 0.0, hp.k_c);
    (void)steps;
    return {std::move(state), std::move(representations)};
}

std::vector<SpeakerTurn> labels_to_turns(const Recording& recording, const ClusterState& state) {
    recording.validate();
    state.validate();
    const std::size_t n = recording.segments.size();
    if (state.labels.size() != n)
        throw DimensionError("label count does not match segment count");

    // Effective boundaries: first start, midpoints between consecutive
    // segments, last end; clamped monotone for safety on odd geometries.
    std::vector<double> bounds(n + 1);
    bounds[0] = recording.segments[0].start_sec;
    for (std::size_t i = 1; i < n; ++i)
        bounds[i] = std::max(
            bounds[i - 1],
            0.5 * (recording.segments[i - 1].end_sec + recording.segments[i].start_sec));
    bounds[n] = std::max(bounds[n - 1], recording.segments[n - 1].end_sec);

    std::vector<SpeakerTurn> turns;
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && state.labels[i] == state.labels[run_start]) continue;
        SpeakerTurn turn;
        turn.recording_id = recording.id;
        turn.speaker = "spk" + std::to_string(state.labels[run_start]);
        turn.onset_sec = bounds[run_start];
        turn.duration_sec = bounds[i] - bounds[run_start];
        if (turn.duration_sec > 0.0) turns.push_back(std::move(turn));
        run_start = i;
    }
    return turns;
}

DiarizationResult run_ssa(const Recording& recording, const WhiteningTransform& whitening,
                          const Hyperparams& hp, Rng& rng) {
    auto [state, representations] = initialize_clusters(recording, whitening, hp);
    const int n0 = state.num_clusters;
    if (hp.target_speakers && *hp.target_speakers > n0)
        throw ConfigError("target speaker count " + std::to_string(*hp.target_speakers) +
                          " exceeds the initial cluster count " + std::to_string(n0));

    DiarizationResult result;
    result.recording_id = recording.id;
    result.initial_clusters = n0;

    // Reconstruct the initialization trace for the merge log (phase 0).
    {
        const AffinityMatrix affinity = pairwise_affinity(representations);
        int min_clusters = hp.target_speakers ? std::max(*hp.target_speakers, 2) : 1;
        auto [state0, steps0] = ahc_cluster(
            affinity, StopRule::by_threshold(hp.init_threshold, min_clusters), 0.0, hp.k_c);
        (void)state0;
        for (MergeStep step : steps0) {
            step.iteration = 0;
            result.merge_trace.push_back(step);
        }
    }

    // The network starts as the whitening + PCA baseline, fit exactly as
    // baseline_project fits it.
    const Matrix normalized =
        detail::normalized_whitened_rows(recording.embeddings, whitening);
    const PcaTransform pca = compute_pca(normalized, hp.pca_dim);
    NetworkParams theta = init_network(whitening, pca);

    Matrix affinity_values = pairwise_affinity(representations).values();
    for (int p = 1; p <= hp.num_iterations; ++p) {
        if (hp.target_speakers && state.num_clusters == *hp.target_speakers) break;

        const TrainResult trained = train(theta, recording.embeddings, state, hp, rng);
        theta = trained.theta;
        representations = forward(theta, recording.embeddings);
        const AffinityMatrix affinity = pairwise_affinity(representations);
        affinity_values = affinity.values();

        StopRule stop;
        if (hp.target_speakers) {
            stop = StopRule::by_count(
                schedule_target(n0, *hp.target_speakers, p, hp.num_iterations));
        } else {
            stop = StopRule::by_threshold(hp.stop_threshold, 1);
        }
        auto [merged, steps] = ahc_cluster(affinity, stop, hp.lambda, hp.k_c, state);
        state = std::move(merged);

        IterationSummary summary;
        summary.iteration = p;
        summary.epochs = static_cast<int>(trained.epoch_losses.size());
        summary.merges = static_cast<int>(steps.size());
        summary.clusters_after = state.num_clusters;
        summary.initial_loss = trained.initial_loss;
        summary.final_loss =
            trained.epoch_losses.empty() ? trained.initial_loss : trained.epoch_losses.back();
        result.iterations.push_back(summary);
        result.loss_history.push_back(trained.epoch_losses);
        for (MergeStep step : steps) {
            step.iteration = p;
            result.merge_trace.push_back(step);
        }
    }

    result.clusters = std::move(state);
    result.representations = std::move(representations);
    result.affinity = std::move(affinity_values);
    result.turns = labels_to_turns(recording, result.clusters);
    return result;
}

DiarizationResult run_ssa(const Recording& recording, const WhiteningTransform& whitening,
                          const Hyperparams& hp) {
    Rng rng(derive_seed(hp.seed, recording.id));
    return run_ssa(recording, whitening, hp, rng);
}

std::string serialize_report(const DiarizationResult& result) {
    std::string out;
    out += "{\n  \"recording_id\": ";
    append_json_string(out, result.recording_id);
    out += ",\n  \"initial_clusters\": " + std::to_string(result.initial_clusters);
    out += ",\n  \"final_clusters\": " + std::to_string(result.clusters.num_clusters);
    out += ",\n  \"labels\": [";
    for (std::size_t i = 0; i < result.clusters.labels.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(result.clusters.labels[i]);
    }
    out += "],\n  \"iterations\": [";
    for (std::size_t i = 0; i < result.iterations.size(); ++i) {
        const IterationSummary& it = result.iterations[i];
        out += (i > 0) ? ",\n    {" : "\n    {";
        out += "\"iteration\": " + std::to_string(it.iteration);
        out += ", \"epochs\": " + std::to_string(it.epochs);
        out += ", \"merges\": " + std::to_string(it.merges);
        out += ", \"clusters_after\": " + std::to_string(it.clusters_after);
        out += ", \"initial_loss\": " + io::format_full(it.initial_loss);
        out += ", \"final_loss\": " + io::format_full(it.final_loss);
        out += ", \"losses\": [";
        static const std::vector<double> kNoLosses;
        const std::vector<double>& losses =
            i < result.loss_history.size() ? result.loss_history[i] : kNoLosses;
        for (std::size_t e = 0; e < losses.size(); ++e) {
            if (e > 0) out += ", ";
            out += io::format_full(losses[e]);
        }
        out += "]}";
    }
    out += result.iterations.empty() ? "],\n" : "\n  ],\n";
    out += "  \"merge_steps\": " + std::to_string(result.merge_trace.size());
    out += ",\n  \"turns\": [";
    for (std::size_t i = 0; i < result.turns.size(); ++i) {
        const SpeakerTurn& t = result.turns[i];
        out += (i > 0) ? ",\n    {" : "\n    {";
        out += "\"speaker\": ";
        append_json_string(out, t.speaker);
        out += ", \"onset\": " + io::format_full(t.onset_sec);
        out += ", \"duration\": " + io::format_full(t.duration_sec);
        out += "}";
    }
    out += result.turns.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

}  // namespace ssahc
