#pragma once

#include "ssahc/affinity.hpp"
#include "ssahc/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ssahc {

// Audit record of one merge decision.
struct MergeStep {
    int iteration = 0;        // 1-based merge counter within one clustering run
    int cluster_a = 0;        // positions in the cluster list at merge time, a < b
    int cluster_b = 0;
    double score = 0.0;       // criterion value that selected the pair
    int clusters_after = 0;
};

// Stopping rule for ahc_cluster. Exactly one of target_count / threshold is
// active. min_clusters is a floor applied in threshold mode: merging never
// reduces the cluster count below it.
struct StopRule {
    std::optional<int> target_count;
    double threshold = 0.0;
    int min_clusters = 1;

    static StopRule by_count(int n) {
        StopRule r;
        r.target_count = n;
        return r;
    }
    static StopRule by_threshold(double t, int min_clusters = 1) {
        StopRule r;
        r.threshold = t;
        r.min_clusters = min_clusters;
        return r;
    }
};

// The min(k_c, |others|) clusters with highest average-linkage affinity to
// target, in descending order; ties go to the smaller position in `others`.
std::vector<std::vector<int>> nearest_neighbor_clusters(const std::vector<int>& target,
                                                        const std::vector<std::vector<int>>& others,
                                                        const AffinityMatrix& a, int k_c);

struct MergeChoice {
    int a = 0;  // positions in `clusters`, a < b
    int b = 0;
    double score = 0.0;
};

// Pick the pair to merge. With lambda = 0 this is the plain average-linkage
// argmax. With lambda > 0 the score of a pair (i, j) is
//   A(C_i, C_j) - lambda * sum_k A(C_i u C_j, Q_k)
// where Q_1..Q_kc are the nearest-neighbor clusters of the hypothetical union
// among the remaining clusters. Ties break lexicographically on (min index,
// max index). Requires at least 2 clusters.
MergeChoice select_merge_pair(const std::vector<std::vector<int>>& clusters,
                              const AffinityMatrix& a, double lambda, int k_c);

// Agglomerative clustering over a fixed affinity matrix. Starts from
// `initial` (default: singletons in row order) and repeatedly merges the
// select_merge_pair winner. A merge replaces the lower-positioned cluster of
// the pair with the union and erases the higher one. Stops at the target
// count, or in threshold mode when the selected pair's plain average-linkage
// affinity drops below the threshold, or when one cluster remains. Final
// labels are renumbered densely by first occurrence.
std::pair<ClusterState, std::vector<MergeStep>> ahc_cluster(
    const AffinityMatrix& a, const StopRule& stop, double lambda, int k_c,
    const std::optional<ClusterState>& initial = std::nullopt);

// Cluster membership lists ordered by label, used to seed ahc_cluster
// internals and by the trainer's triplet miner.
std::vector<std::vector<int>> clusters_from_state(const ClusterState& state);

}  // namespace ssahc
