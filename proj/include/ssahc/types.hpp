#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssahc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error categories. Everything derives from Error so callers can catch the
// whole family when isolating per-recording failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct DegenerateVectorError : Error {
    using Error::Error;
};
struct InsufficientDataError : Error {
    using Error::Error;
};
struct PreconditionError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// One time-stamped analysis window. Windows may overlap in time.
struct Segment {
    double start_sec = 0.0;
    double end_sec = 0.0;
};

// A recording: one embedding vector per segment, segments sorted by start.
struct Recording {
    std::string id;
    std::vector<Segment> segments;
    Matrix embeddings;  // num_segments x dim

    int num_segments() const { return static_cast<int>(embeddings.rows()); }
    int dim() const { return static_cast<int>(embeddings.cols()); }

    // Throws if any structural invariant is violated.
    void validate() const;
};

// Per-segment cluster assignment. Labels are dense: every value in
// [0, num_clusters) occurs at least once.
struct ClusterState {
    std::vector<int> labels;
    int num_clusters = 0;

    void validate() const;
};

// One speaker turn, RTTM style.
struct SpeakerTurn {
    std::string recording_id;
    std::string speaker;
    double onset_sec = 0.0;
    double duration_sec = 0.0;
};

// All tunables of the algorithm. Defaults follow the reference configuration.
struct Hyperparams {
    double lambda = 0.1;          // merge regularization weight
    double gamma = 0.5;           // negative-pair weight in the triplet loss
    double eta = 0.5;             // training stops when loss/initial_loss <= eta
    int k_c = 1;                  // nearest-neighbor clusters in the merge penalty
    double init_threshold = 0.1;  // affinity threshold selecting N0
    double stop_threshold = 0.0;  // merge stop threshold when N* is unknown
    std::optional<int> target_speakers;  // known N*, if any
    double learning_rate = 0.001;
    int max_epochs = 50;
    int num_iterations = 2;  // train/merge rounds
    int pca_dim = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

}  // namespace ssahc
