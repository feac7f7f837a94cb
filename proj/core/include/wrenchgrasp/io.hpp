#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wrenchgrasp/dynsim.hpp"
#include "wrenchgrasp/grasp.hpp"
#include "wrenchgrasp/harness.hpp"
#include "wrenchgrasp/stats.hpp"
#include "wrenchgrasp/surrogate.hpp"

namespace wrenchgrasp {

inline constexpr int kCsvSchemaVersion = 1;

/// %.17g (round-trips exactly), the format used for every real number written by the library.
std::string format_real(double x);

// Trial records. Columns (units in the names):
//   schema_version, scenario, method, trial, seed, grasp_index,
//   candidate_count, candidate_hash, score, c_tau_nm, c_slip_n, c_align_rad,
//   total, lever_m, tau_max_nm, s_max_m, alpha_max_rad, failed, status
void write_records_csv(std::ostream& out, std::span<const TrialRecord> records);
std::vector<TrialRecord> read_records_csv(std::istream& in);

// Surrogate examples: schema_version, group, f0..f9, c_tau_nm, c_slip_n, c_align_rad
void write_dataset_csv(std::ostream& out, std::span<const LabeledExample> data);
std::vector<LabeledExample> read_dataset_csv(std::istream& in);

/// Ranked candidate table for one trial.
void write_scored_csv(std::ostream& out, std::span<const ScoredCandidate> scored,
                      std::span<const GraspCandidate> candidates, const Vec3& c_tool);

void write_phase_csv(std::ostream& out, const PhaseReport& report);

std::string candidates_to_json(std::span<const GraspCandidate> candidates);
std::string phase_report_json(const PhaseReport& report, const ThresholdFit& fit);
std::string fit_to_json(const ThresholdFit& fit);
std::string history_to_json(const TrainHistory& history);
std::string evaluation_to_json(const SurrogateEvaluation& ev);
std::string metrics_to_json(const SimMetrics& metrics);

}  // namespace wrenchgrasp
