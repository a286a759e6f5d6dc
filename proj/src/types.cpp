#include "ssahc/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ssahc {

void Recording::validate() const {
    if (embeddings.rows() < 1) throw DimensionError("recording '" + id + "': no segments");
    if (static_cast<int>(segments.size()) != num_segments())
        throw DimensionError("recording '" + id + "': " + std::to_string(segments.size()) +
                             " segments vs " + std::to_string(num_segments()) + " embedding rows");
    double prev_start = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        if (!(s.start_sec >= 0.0))
            throw PreconditionError("recording '" + id + "': segment " + std::to_string(i) +
                                    " has negative start");
        if (!(s.end_sec > s.start_sec))
            throw PreconditionError("recording '" + id + "': segment " + std::to_string(i) +
                                    " has end <= start");
        if (s.start_sec < prev_start)
            throw PreconditionError("recording '" + id + "': segments not ordered by start at index " +
                                    std::to_string(i));
        prev_start = s.start_sec;
    }
    if (!embeddings.allFinite()) throw PreconditionError("recording '" + id + "': non-finite embedding");
}

void ClusterState::validate() const {
    if (num_clusters < 1) throw PreconditionError("cluster state: no clusters");
    std::vector<bool> seen(static_cast<std::size_t>(num_clusters), false);
    for (int label : labels) {
        if (label < 0 || label >= num_clusters)
            throw PreconditionError("cluster state: label " + std::to_string(label) +
                                    " outside [0, " + std::to_string(num_clusters) + ")");
        seen[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < num_clusters; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw PreconditionError("cluster state: empty cluster " + std::to_string(c));
}

void Hyperparams::validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must be in (0, 1]");
    if (k_c < 1) throw ConfigError("k_c must be >= 1");
    if (target_speakers && *target_speakers < 1) throw ConfigError("target speaker count must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
    if (max_epochs < 0) throw ConfigError("max epochs must be >= 0");
    if (num_iterations < 1) throw ConfigError("iteration count must be >= 1");
    if (pca_dim < 1) throw ConfigError("pca dim must be >= 1");
}

}  // namespace ssahc
