#include "ssahc/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssahc {

namespace {

constexpr double kBoundaryMergeTol = 1e-9;

struct IndexedTurn {
    double onset = 0.0;
    double offset = 0.0;
    int speaker = 0;
};

// Speaker names indexed by first appearance, so region bookkeeping is stable
// under input reordering of turns with the same content.
struct SpeakerTable {
    std::vector<std::string> names;

    int intern(const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        names.push_back(name);
        return static_cast<int>(names.size() - 1);
    }
};

struct Region {
    double duration = 0.0;
    std::vector<int> ref_active;
    std::vector<int> hyp_active;
    bool scored = true;
};

struct Timeline {
    SpeakerTable ref_speakers;
    SpeakerTable hyp_speakers;
    std::vector<Region> regions;  // scored regions only
};

std::vector<IndexedTurn> index_turns(const std::vector<SpeakerTurn>& turns, SpeakerTable& table) {
    std::vector<IndexedTurn> indexed;
    indexed.reserve(turns.size());
    for (const SpeakerTurn& t : turns) {
        IndexedTurn it;
        it.onset = t.onset_sec;
        it.offset = t.onset_sec + t.duration_sec;
        it.speaker = table.intern(t.speaker);
        indexed.push_back(it);
    }
    return indexed;
}

Timeline build_timeline(const std::vector<SpeakerTurn>& ref, const std::vector<SpeakerTurn>& hyp,
                        double collar_sec, bool ignore_overlap) {
    Timeline timeline;
    const std::vector<IndexedTurn> ref_turns = index_turns(ref, timeline.ref_speakers);
    const std::vector<IndexedTurn> hyp_turns = index_turns(hyp, timeline.hyp_speakers);

    std::vector<double> ref_edges;
    ref_edges.reserve(2 * ref_turns.size());
    for (const IndexedTurn& t : ref_turns) {
        ref_edges.push_back(t.onset);
        ref_edges.push_back(t.offset);
    }

    std::vector<double> cuts;
    cuts.reserve(4 * ref_turns.size() + 2 * hyp_turns.size());
    for (const double edge : ref_edges) {
        cuts.push_back(edge);
        if (collar_sec > 0.0) {
            cuts.push_back(edge - collar_sec);
            cuts.push_back(edge + collar_sec);
        }
    }
    for (const IndexedTurn& t : hyp_turns) {
        cuts.push_back(t.onset);
        cuts.push_back(t.offset);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return b - a <= kBoundaryMergeTol; }),
               cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double t0 = cuts[i];
        const double t1 = cuts[i + 1];
        const double mid = 0.5 * (t0 + t1);

        Region region;
        region.duration = t1 - t0;
        for (const IndexedTurn& t : ref_turns)
            if (t.onset <= mid && mid < t.offset) region.ref_active.push_back(t.speaker);
        for (const IndexedTurn& t : hyp_turns)
            if (t.onset <= mid && mid < t.offset) region.hyp_active.push_back(t.speaker);

        bool in_collar = false;
        if (collar_sec > 0.0)
            for (const double edge : ref_edges)
                if (std::abs(mid - edge) < collar_sec) {
                    in_collar = true;
                    break;
                }
        const bool overlap_excluded = ignore_overlap && region.ref_active.size() >= 2;
        region.scored = !in_collar && !overlap_excluded;
        if (region.scored && (!region.ref_active.empty() || !region.hyp_active.empty()))
            timeline.regions.push_back(std::move(region));
    }
    return timeline;
}

// ref speaker index -> hyp speaker index (-1 when unmapped), maximizing the
// summed co-occurrence duration over the scored regions.
std::vector<int> map_speakers(const Timeline& timeline) {
    const int num_ref = static_cast<int>(timeline.ref_speakers.names.size());
    const int num_hyp = static_cast<int>(timeline.hyp_speakers.names.size());
    std::vector<int> mapped(static_cast<std::size_t>(num_ref), -1);
    if (num_ref == 0 || num_hyp == 0) return mapped;

    Matrix overlap = Matrix::Zero(num_ref, num_hyp);
    for (const Region& region : timeline.regions)
        for (const int r : region.ref_active)
            for (const int h : region.hyp_active) overlap(r, h) += region.duration;

    const std::vector<int> assignment = solve_assignment(-overlap);
    for (int r = 0; r < num_ref; ++r) {
        const int h = assignment[static_cast<std::size_t>(r)];
        if (h >= 0 && overlap(r, h) > 0.0) mapped[static_cast<std::size_t>(r)] = h;
    }
    return mapped;
}

std::map<std::string, std::string> mapping_names(const Timeline& timeline,
                                                 const std::vector<int>& mapped) {
    std::map<std::string, std::string> result;
    for (std::size_t r = 0; r < mapped.size(); ++r)
        if (mapped[r] >= 0)
            result[timeline.ref_speakers.names[r]] =
                timeline.hyp_speakers.names[static_cast<std::size_t>(mapped[r])];
    return result;
}

}  // namespace

std::vector<int> solve_assignment(const Matrix& cost) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    if (rows == 0 || cols == 0) return std::vector<int>(static_cast<std::size_t>(rows), -1);
    if (rows > cols) {
        // Solve the transpose and invert the assignment.
        const std::vector<int> by_col = solve_assignment(cost.transpose());
        std::vector<int> by_row(static_cast<std::size_t>(rows), -1);
        for (int c = 0; c < cols; ++c)
            if (by_col[static_cast<std::size_t>(c)] >= 0)
                by_row[static_cast<std::size_t>(by_col[static_cast<std::size_t>(c)])] = c;
        return by_row;
    }

    // Hungarian algorithm with row/column potentials, 1-based internally.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(rows) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(cols) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(cols) + 1, 0);  // column -> row
    std::vector<int> way(static_cast<std::size_t>(cols) + 1, 0);

    for (int i = 1; i <= rows; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> min_slack(static_cast<std::size_t>(cols) + 1, kInf);
        std::vector<bool> used(static_cast<std::size_t>(cols) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= cols; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < min_slack[static_cast<std::size_t>(j)]) {
                    min_slack[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (min_slack[static_cast<std::size_t>(j)] < delta) {
                    delta = min_slack[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    min_slack[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> result(static_cast<std::size_t>(rows), -1);
    for (int j = 1; j <= cols; ++j)
        if (match[static_cast<std::size_t>(j)] != 0)
            result[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return result;
}

std::map<std::string, std::string> optimal_speaker_mapping(const std::vector<SpeakerTurn>& ref,
                                                           const std::vector<SpeakerTurn>& hyp) {
    if (ref.empty()) throw PreconditionError("speaker mapping requires a non-empty reference");
    const Timeline timeline = build_timeline(ref, hyp, 0.0, false);
    return mapping_names(timeline, map_speakers(timeline));
}

DerReport compute_der(const std::vector<SpeakerTurn>& ref, const std::vector<SpeakerTurn>& hyp,
                      double collar_sec, bool ignore_overlap) {
    if (ref.empty()) throw PreconditionError("scoring requires a non-empty reference");
    if (collar_sec < 0.0) throw PreconditionError("collar must be nonnegative");

    const Timeline timeline = build_timeline(ref, hyp, collar_sec, ignore_overlap);
    const std::vector<int> mapped = map_speakers(timeline);

    DerReport report;
    report.mapping = mapping_names(timeline, mapped);
    for (const Region& region : timeline.regions) {
        const int num_ref = static_cast<int>(region.ref_active.size());
        const int num_hyp = static_cast<int>(region.hyp_active.size());
        int num_correct = 0;
        for (const int r : region.ref_active) {
            const int h = mapped[static_cast<std::size_t>(r)];
            if (h >= 0 &&
                std::find(region.hyp_active.begin(), region.hyp_active.end(), h) !=
                    region.hyp_active.end())
                ++num_correct;
        }
        report.scored_sec += region.duration * num_ref;
        report.missed_sec += region.duration * std::max(0, num_ref - num_hyp);
        report.false_alarm_sec += region.duration * std::max(0, num_hyp - num_ref);
        report.confusion_sec += region.duration * (std::min(num_ref, num_hyp) - num_correct);
    }
    if (report.scored_sec <= 0.0)
        throw PreconditionError("no scored reference time; cannot compute an error rate");
    report.der_percent = 100.0 *
                         (report.missed_sec + report.false_alarm_sec + report.confusion_sec) /
                         report.scored_sec;
    return report;
}

DerReport aggregate_der(const std::vector<DerReport>& reports) {
    if (reports.empty()) throw PreconditionError("cannot aggregate zero reports");
    DerReport total;
    for (const DerReport& r : reports) {
        total.missed_sec += r.missed_sec;
        total.false_alarm_sec += r.false_alarm_sec;
        total.confusion_sec += r.confusion_sec;
        total.scored_sec += r.scored_sec;
    }
    if (total.scored_sec <= 0.0)
        throw PreconditionError("no scored reference time; cannot compute an error rate");
    total.der_percent = 100.0 *
                        (total.missed_sec + total.false_alarm_sec + total.confusion_sec) /
                        total.scored_sec;
    return total;
}

}  // namespace ssahc
