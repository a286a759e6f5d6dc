#include "ssahc/synth.hpp"

#include "ssahc/rng.hpp"

#include <cmath>
#include <string>

namespace ssahc {

namespace {

constexpr int kMaxTurnSequenceAttempts = 1000;

Vector draw_gaussian(Rng& rng, int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
    return v;
}

// Orthonormal frame of `count` vectors via Gram-Schmidt on Gaussian draws;
// near-dependent draws are rejected and redrawn.
std::vector<Vector> orthonormal_frame(Rng& rng, int dim, int count) {
    std::vector<Vector> frame;
    frame.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(frame.size()) < count) {
        Vector v = draw_gaussian(rng, dim);
        for (const Vector& u : frame) v -= u.dot(v) * u;
        const double norm = v.norm();
        if (norm <= 1e-9) continue;
        frame.push_back(v / norm);
    }
    return frame;
}

struct SampledTurn {
    int speaker = 0;
    double onset = 0.0;
    double offset = 0.0;
};

// Non-overlapping turns covering [0, duration]; consecutive turns always
// switch speaker, and every speaker must appear at least once.
std::vector<SampledTurn> sample_turns(Rng& rng, const SynthSpec& spec) {
    const std::size_t k = static_cast<std::size_t>(spec.num_speakers);
    for (int attempt = 0; attempt < kMaxTurnSequenceAttempts; ++attempt) {
        std::vector<SampledTurn> turns;
        std::vector<bool> seen(k, false);
        double t = 0.0;
        int previous = -1;
        while (t < spec.duration_sec) {
            int speaker;
            if (previous < 0 || k == 1) {
                speaker = static_cast<int>(rng.uniform_index(k));
            } else {
                speaker = static_cast<int>(rng.uniform_index(k - 1));
                if (speaker >= previous) ++speaker;
            }
            const double length = rng.exponential(spec.mean_turn_sec);
            SampledTurn turn;
            turn.speaker = speaker;
            turn.onset = t;
            turn.offset = std::min(t + length, spec.duration_sec);
            if (turn.offset > turn.onset) {
                turns.push_back(turn);
                seen[static_cast<std::size_t>(speaker)] = true;
            }
            t = turn.offset;
            previous = speaker;
        }
        bool all_seen = true;
        for (const bool s : seen) all_seen = all_seen && s;
        if (all_seen && !turns.empty()) return turns;
    }
    throw InsufficientDataError("could not sample a turn sequence covering all " +
                                std::to_string(spec.num_speakers) + " speakers; the recording "
                                "is too short for the requested speaker count");
}

}  // namespace

void SynthSpec::validate() const {
    if (num_speakers < 1) throw PreconditionError("num_speakers must be >= 1");
    if (!(window_sec > 0.0)) throw PreconditionError("window must be positive");
    if (!(shift_sec > 0.0) || shift_sec > window_sec)
        throw PreconditionError("shift must satisfy 0 < shift <= window");
    if (!(duration_sec >= window_sec))
        throw PreconditionError("duration must be at least one window");
    if (!(mean_turn_sec > 0.0)) throw PreconditionError("mean turn length must be positive");
    if (!(separation > 0.0)) throw PreconditionError("separation must be positive");
    if (!(within_noise >= 0.0)) throw PreconditionError("within_noise must be nonnegative");
    if (dim < num_speakers + 1)
        throw PreconditionError("dim must be at least num_speakers + 1 to place the centroids");
    if (recording_id.empty()) throw PreconditionError("recording_id must be non-empty");
}

std::pair<Recording, std::vector<SpeakerTurn>> generate_recording(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // Centroids c_k = (b + s e_k) / sqrt(1 + s^2) for an orthonormal frame
    // {b, e_1..e_K}: unit vectors with pairwise cosine 1 / (1 + s^2).
    const std::vector<Vector> frame = orthonormal_frame(rng, spec.dim, spec.num_speakers + 1);
    const double s = spec.separation;
    const double scale = 1.0 / std::sqrt(1.0 + s * s);
    std::vector<Vector> centroids;
    centroids.reserve(static_cast<std::size_t>(spec.num_speakers));
    for (int k = 0; k < spec.num_speakers; ++k)
        centroids.push_back(scale * (frame[0] + s * frame[static_cast<std::size_t>(k) + 1]));

    const std::vector<SampledTurn> turns = sample_turns(rng, spec);

    const int num_segments =
        static_cast<int>(std::floor((spec.duration_sec - spec.window_sec) / spec.shift_sec)) + 1;
    Recording recording;
    recording.id = spec.recording_id;
    recording.segments.reserve(static_cast<std::size_t>(num_segments));
    recording.embeddings.resize(num_segments, spec.dim);
    std::size_t turn_cursor = 0;
    for (int i = 0; i < num_segments; ++i) {
        Segment segment;
        segment.start_sec = static_cast<double>(i) * spec.shift_sec;
        segment.end_sec = segment.start_sec + spec.window_sec;
        recording.segments.push_back(segment);

        const double mid = segment.start_sec + 0.5 * spec.window_sec;
        while (turn_cursor + 1 < turns.size() && turns[turn_cursor].offset <= mid) ++turn_cursor;
        const int owner = turns[turn_cursor].speaker;

        Vector row = centroids[static_cast<std::size_t>(owner)];
        if (spec.within_noise > 0.0) row += spec.within_noise * draw_gaussian(rng, spec.dim);
        recording.embeddings.row(i) = row.transpose();
    }
    recording.validate();

    std::vector<SpeakerTurn> reference;
    reference.reserve(turns.size());
    for (const SampledTurn& t : turns) {
        SpeakerTurn turn;
        turn.recording_id = spec.recording_id;
        turn.speaker = "spk" + std::to_string(t.speaker);
        turn.onset_sec = t.onset;
        turn.duration_sec = t.offset - t.onset;
        reference.push_back(turn);
    }
    return {std::move(recording), std::move(reference)};
}

}  // namespace ssahc
