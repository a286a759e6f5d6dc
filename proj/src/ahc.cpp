#include "ssahc/ahc.hpp"

#include <algorithm>
#include <string>

namespace ssahc {

namespace {

// Incremental cluster-pair state over a fixed affinity matrix: member lists
// plus the matrix of summed pairwise affinities, so average linkage and the
// union affinities of regularized merge candidates are O(1) per query.
struct ClusterScratch {
    std::vector<std::vector<int>> members;
    std::vector<std::vector<double>> sums;  // sums[i][j] = sum of A over members[i] x members[j]

    explicit ClusterScratch(const std::vector<std::vector<int>>& clusters, const AffinityMatrix& a)
        : members(clusters) {
        const std::size_t m = members.size();
        sums.assign(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                double s = 0.0;
                for (int x : members[i])
                    for (int y : members[j]) s += a(x, y);
                sums[i][j] = s;
                sums[j][i] = s;
            }
        }
    }

    std::size_t count() const { return members.size(); }

    double size(std::size_t i) const { return static_cast<double>(members[i].size()); }

    double pair_affinity(std::size_t i, std::size_t j) const {
        return sums[i][j] / (size(i) * size(j));
    }

    double union_affinity(std::size_t i, std::size_t j, std::size_t k) const {
        return (sums[i][k] + sums[j][k]) / ((size(i) + size(j)) * size(k));
    }

    void merge(std::size_t a, std::size_t b) {  // a < b
        std::vector<int>& into = members[a];
        const std::size_t mid = into.size();
        into.insert(into.end(), members[b].begin(), members[b].end());
        std::inplace_merge(into.begin(), into.begin() + static_cast<std::ptrdiff_t>(mid), into.end());
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(b));
        for (std::size_t k = 0; k < sums.size(); ++k) sums[k][a] += sums[k][b];
        for (std::size_t k = 0; k < sums.size(); ++k)
            sums[k].erase(sums[k].begin() + static_cast<std::ptrdiff_t>(b));
        sums.erase(sums.begin() + static_cast<std::ptrdiff_t>(b));
        for (std::size_t k = 0; k < sums.size(); ++k) sums[a][k] = sums[k][a];
    }
};

// Regularized merge score of candidate pair (i, j): plain average linkage
// minus lambda times the summed affinity between the hypothetical union and
// its k_c nearest-neighbor clusters among the rest. No neighbors exist when
// only the pair remains, so the penalty vanishes.
double merge_score(const ClusterScratch& scratch, std::size_t i, std::size_t j, double lambda,
                   int k_c) {
    double score = scratch.pair_affinity(i, j);
    if (lambda == 0.0 || scratch.count() <= 2) return score;
    std::vector<double> neighbor_affinities;
    neighbor_affinities.reserve(scratch.count() - 2);
    for (std::size_t k = 0; k < scratch.count(); ++k) {
        if (k == i || k == j) continue;
        neighbor_affinities.push_back(scratch.union_affinity(i, j, k));
    }
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k_c),
                                                   neighbor_affinities.size());
    // Descending; equal affinities keep smaller-index-first order.
    std::stable_sort(neighbor_affinities.begin(), neighbor_affinities.end(),
                     [](double x, double y) { return x > y; });
    double penalty = 0.0;
    for (std::size_t k = 0; k < take; ++k) penalty += neighbor_affinities[k];
    return score - lambda * penalty;
}

MergeChoice select_merge_pair_scratch(const ClusterScratch& scratch, double lambda, int k_c) {
    MergeChoice best;
    bool have = false;
    for (std::size_t i = 0; i < scratch.count(); ++i) {
        for (std::size_t j = i + 1; j < scratch.count(); ++j) {
            const double score = merge_score(scratch, i, j, lambda, k_c);
            if (!have || score > best.score) {
                best.a = static_cast<int>(i);
                best.b = static_cast<int>(j);
                best.score = score;
                have = true;
            }
        }
    }
    return best;
}

}  // namespace

std::vector<std::vector<int>> clusters_from_state(const ClusterState& state) {
    state.validate();
    std::vector<std::vector<int>> clusters(static_cast<std::size_t>(state.num_clusters));
    for (std::size_t i = 0; i < state.labels.size(); ++i)
        clusters[static_cast<std::size_t>(state.labels[i])].push_back(static_cast<int>(i));
    return clusters;
}

std::vector<std::vector<int>> nearest_neighbor_clusters(const std::vector<int>& target,
                                                        const std::vector<std::vector<int>>& others,
                                                        const AffinityMatrix& a, int k_c) {
    if (others.empty()) throw PreconditionError("nearest-neighbor query with no candidate clusters");
    if (k_c < 1) throw PreconditionError("k_c must be >= 1");
    std::vector<std::size_t> order(others.size());
    for (std::size_t i = 0; i < others.size(); ++i) order[i] = i;
    std::vector<double> affinities(others.size());
    for (std::size_t i = 0; i < others.size(); ++i) affinities[i] = cluster_affinity(target, others[i], a);
    std::stable_sort(order.begin(), order.end(), [&affinities](std::size_t x, std::size_t y) {
        return affinities[x] > affinities[y];
    });
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k_c), others.size());
    std::vector<std::vector<int>> result;
    result.reserve(take);
    for (std::size_t i = 0; i < take; ++i) result.push_back(others[order[i]]);
    return result;
}

MergeChoice select_merge_pair(const std::vector<std::vector<int>>& clusters, const AffinityMatrix& a,
                              double lambda, int k_c) {
    if (clusters.size() < 2) throw PreconditionError("merge selection needs at least 2 clusters");
    if (k_c < 1) throw PreconditionError("k_c must be >= 1");
    ClusterScratch scratch(clusters, a);
    return select_merge_pair_scratch(scratch, lambda, k_c);
}

std::pair<ClusterState, std::vector<MergeStep>> ahc_cluster(
    const AffinityMatrix& a, const StopRule& stop, double lambda, int k_c,
    const std::optional<ClusterState>& initial) {
    const int n = a.size();
    std::vector<std::vector<int>> start;
    if (initial) {
        if (static_cast<int>(initial->labels.size()) != n)
            throw DimensionError("initial cluster state does not match the affinity size");
        start = clusters_from_state(*initial);
    } else {
        start.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) start[static_cast<std::size_t>(i)] = {i};
    }

    int floor_count = 1;
    if (stop.target_count) {
        if (*stop.target_count < 1 || *stop.target_count > static_cast<int>(start.size()))
            throw PreconditionError("target cluster count " + std::to_string(*stop.target_count) +
                                    " out of range for " + std::to_string(start.size()) + " clusters");
        floor_count = *stop.target_count;
    } else {
        floor_count = std::max(1, stop.min_clusters);
    }

    ClusterScratch scratch(start, a);
    std::vector<MergeStep> steps;
    while (static_cast<int>(scratch.count()) > floor_count) {
        const MergeChoice choice = select_merge_pair_scratch(scratch, lambda, k_c);
        if (!stop.target_count) {
            // Threshold stop always reads the plain affinity scale,
            // regardless of lambda.
            const double plain = scratch.pair_affinity(static_cast<std::size_t>(choice.a),
                                                       static_cast<std::size_t>(choice.b));
            if (plain < stop.threshold) break;
        }
        scratch.merge(static_cast<std::size_t>(choice.a), static_cast<std::size_t>(choice.b));
        MergeStep step;
        step.iteration = static_cast<int>(steps.size()) + 1;
        step.cluster_a = choice.a;
        step.cluster_b = choice.b;
        step.score = choice.score;
        step.clusters_after = static_cast<int>(scratch.count());
        steps.push_back(step);
    }

    // Dense relabeling by first occurrence in segment order.
    std::vector<int> raw(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < scratch.count(); ++c)
        for (int member : scratch.members[c]) raw[static_cast<std::size_t>(member)] = static_cast<int>(c);
    std::vector<int> remap(scratch.count(), -1);
    ClusterState state;
    state.labels.resize(static_cast<std::size_t>(n));
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int& label = remap[static_cast<std::size_t>(raw[static_cast<std::size_t>(i)])];
        if (label < 0) label = next++;
        state.labels[static_cast<std::size_t>(i)] = label;
    }
    state.num_clusters = next;
    return {std::move(state), std::move(steps)};
}

}  // namespace ssahc
