#pragma once

#include "ssahc/ahc.hpp"
#include "ssahc/preprocess.hpp"
#include "ssahc/replearn.hpp"
#include "ssahc/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ssahc {

struct IterationSummary {
    int iteration = 0;       // 1-based train/merge round
    int epochs = 0;          // Adam steps run in this round
    int merges = 0;          // merge steps committed in this round
    int clusters_after = 0;  // N^p
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

struct DiarizationResult {
    std::string recording_id;
    ClusterState clusters;
    Matrix representations;  // final N x d
    Matrix affinity;         // final pairwise affinity
    int initial_clusters = 0;
    std::vector<IterationSummary> iterations;
    std::vector<MergeStep> merge_trace;  // all phases, globally renumbered
    std::vector<std::vector<double>> loss_history;  // per iteration, per epoch
    std::vector<SpeakerTurn> turns;
};

// Baseline projection plus threshold-mode AHC on its cosine affinities,
// giving the initial labels z^0 with N^0 clusters. When hp.target_speakers is
// set, merging never goes below max(N*, 2) so the target stays reachable and
// triplets stay minable.
std::pair<ClusterState, Matrix> initialize_clusters(const Recording& recording,
                                                    const WhiteningTransform& whitening,
                                                    const Hyperparams& hp);

// Convert per-segment labels to speaker turns. Effective segment boundaries
// are the midpoints between each segment's start and the previous segment's
// end (first start and last end are kept); consecutive segments with the same
// label collapse into one turn named "spk<label>".
std::vector<SpeakerTurn> labels_to_turns(const Recording& recording, const ClusterState& state);

// The full self-supervised loop: initialization, then num_iterations rounds
// of (train network on current labels, recompute representations and
// affinities, merge). With known N*, the per-round cluster target follows a
// geometric schedule from N^0 down to N*; otherwise each round merges until
// affinities fall below hp.stop_threshold. Stops early once N^p reaches N*.
DiarizationResult run_ssa(const Recording& recording, const WhiteningTransform& whitening,
                          const Hyperparams& hp, Rng& rng);

// Same, with the RNG stream derived from (hp.seed, recording.id).
DiarizationResult run_ssa(const Recording& recording, const WhiteningTransform& whitening,
                          const Hyperparams& hp);

// Fixed-field-order JSON report of a result; byte-stable for a given result.
std::string serialize_report(const DiarizationResult& result);

}  // namespace ssahc
