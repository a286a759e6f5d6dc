#pragma once

#include "ssahc/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ssahc::io {

// XVEC text format:
//   line 1:        <recording_id> <num_segments> <dim>
//   lines 2..N+1:  <start_sec> <end_sec> <v_1> ... <v_dim>
// All fields whitespace-separated decimals. Parse errors name the 1-based
// line number.
Recording read_embeddings(const std::filesystem::path& path);
void write_embeddings(const Recording& recording, const std::filesystem::path& path);

// RTTM: 10-field SPEAKER lines, e.g.
//   SPEAKER rec1 1 0.000 2.500 <NA> <NA> spk0 <NA> <NA>
// Lines of other types are skipped on read; times are written with 3 decimals.
std::vector<SpeakerTurn> read_rttm(const std::filesystem::path& path);
void write_rttm(const std::vector<SpeakerTurn>& turns, const std::filesystem::path& path);

// Plain text matrix: one row per line, full round-trip precision.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const Matrix& m, const std::filesystem::path& path);

// Affinity matrix file: line 1 is N, then N lines of N decimals.
// The result is validated against the affinity-matrix invariants by callers
// that require them (see affinity.hpp).
Matrix read_affinity_file(const std::filesystem::path& path);
void write_affinity_file(const Matrix& m, const std::filesystem::path& path);

// Round-trip exact formatting for doubles ("%.17g").
std::string format_full(double v);

}  // namespace ssahc::io
