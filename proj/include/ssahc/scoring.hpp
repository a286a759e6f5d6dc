#pragma once

#include "ssahc/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace ssahc {

struct DerReport {
    double missed_sec = 0.0;
    double false_alarm_sec = 0.0;
    double confusion_sec = 0.0;
    double scored_sec = 0.0;
    double der_percent = 0.0;
    std::map<std::string, std::string> mapping;  // reference speaker -> hypothesis speaker
};

// One-to-one partial mapping between reference and hypothesis speakers
// maximizing the total time mapped speakers co-occur, via optimal assignment
// on the speaker-overlap duration matrix. Reference must be non-empty.
std::map<std::string, std::string> optimal_speaker_mapping(const std::vector<SpeakerTurn>& ref,
                                                           const std::vector<SpeakerTurn>& hyp);

// Diarization error rate. The timeline is partitioned at every turn boundary
// and collar edge; regions within +-collar of a reference boundary are not
// scored, and regions where the reference has two or more simultaneous
// speakers are not scored when ignore_overlap is set. Speaker mapping is
// computed globally over the scored regions before errors are attributed.
// Throws when the scored time is zero.
DerReport compute_der(const std::vector<SpeakerTurn>& ref, const std::vector<SpeakerTurn>& hyp,
                      double collar_sec = 0.25, bool ignore_overlap = true);

// Time-weighted corpus aggregate: summed error seconds over summed scored
// seconds. The mapping field is left empty.
DerReport aggregate_der(const std::vector<DerReport>& reports);

// Optimal assignment (cost minimization) on an n x m cost matrix; returns for
// each row the assigned column or -1. Exposed for reuse and direct testing.
std::vector<int> solve_assignment(const Matrix& cost);

}  // namespace ssahc
