#pragma once

#include "ssahc/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ssahc {

// Recipe for a deterministic synthetic recording: speaker centroids on the
// unit sphere (pairwise angle grows with `separation`), a non-overlapping
// exponential-length turn sequence, and window/shift segment tiling with one
// noisy centroid embedding per segment.
struct SynthSpec {
    int num_speakers = 2;
    double duration_sec = 60.0;
    double window_sec = 1.5;
    double shift_sec = 0.75;
    double mean_turn_sec = 3.0;
    double separation = 1.0;    // > 0; centroid pairwise cosine is 1/(1+separation^2)
    double within_noise = 0.1;  // >= 0, per-coordinate Gaussian scale
    int dim = 16;
    std::uint64_t seed = 0;

    std::string recording_id = "synth";

    void validate() const;
};

// Generate the recording plus its ground-truth turns. Fully determined by the
// spec (including seed).
std::pair<Recording, std::vector<SpeakerTurn>> generate_recording(const SynthSpec& spec);

}  // namespace ssahc
