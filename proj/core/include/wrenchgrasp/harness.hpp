#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wrenchgrasp/cost.hpp"
#include "wrenchgrasp/dynsim.hpp"
#include "wrenchgrasp/grasp.hpp"
#include "wrenchgrasp/scenario.hpp"
#include "wrenchgrasp/stats.hpp"
#include "wrenchgrasp/surrogate.hpp"

namespace wrenchgrasp {

/// `sampled` marks rollouts of unselected candidates used for phase studies.
enum class Method { analytic, surrogate, geometry, sampled };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// Everything shared by the methods within one trial.
struct TrialSetup {
  std::uint64_t seed = 0;
  RigidBodyModel body;
  Trajectory trajectory;
  PointCloud cloud;        // full tool surface
  PointCloud grasp_cloud;  // cropped to the grasp region
  std::vector<GraspCandidate> candidates;
  std::uint64_t candidate_hash = 0;
  std::string status;
};

std::uint64_t trial_seed(const Scenario& scenario, std::size_t trial);

/// Builds body, trajectory, cloud and candidates for one trial. `count`
/// overrides the sampler's candidate count when non-zero.
TrialSetup prepare_trial(const Scenario& scenario, std::size_t trial, std::size_t count = 0);

struct ScoredCandidate {
  std::size_t index = 0;
  double score = 0.0;        // the method's objective; lower is better
  CostBreakdown breakdown;   // analytic costs (predicted heads for the surrogate)
};

/// Scores every candidate with the given method. Geometry uses 1 - geometry_score.
/// Throws InvalidParameter for the surrogate without a model.
std::vector<ScoredCandidate> score_candidates(const Scenario& scenario, const TrialSetup& setup, Method method,
                                              const MlpModel* model = nullptr);

/// Index picked by a method: minimum score with the select_grasp tie rule.
std::size_t select_index(std::span<const ScoredCandidate> scored);

struct TrialRecord {
  std::string scenario;
  Method method = Method::analytic;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  long long grasp_index = -1;  // -1 when no candidate was available
  std::size_t candidate_count = 0;
  std::uint64_t candidate_hash = 0;
  double score = 0.0;
  CostBreakdown cost;       // analytic breakdown of the chosen grasp
  double lever_m = 0.0;     // |c_tool - grasp origin| in the tool frame
  double tau_max = 0.0;
  double s_max = 0.0;
  double alpha_max = 0.0;
  bool failed = false;
  std::string status;       // empty on success

  bool ok() const { return status.empty(); }
};

/// Sort key (scenario, method, trial).
bool record_less(const TrialRecord& a, const TrialRecord& b);

/// Runs every (scenario, trial), selects one grasp per method from the shared
/// candidate set and rolls it out. `trials` = 0 uses each scenario's count.
/// Output is sorted by (scenario, method, trial) whatever the thread count.
std::vector<TrialRecord> run_comparison(const std::vector<Scenario>& scenarios, const std::vector<Method>& methods,
                                        std::size_t trials = 0, const MlpModel* model = nullptr,
                                        unsigned threads = 0);

/// Rolls out `count` sampled candidates of one trial without selection.
std::vector<TrialRecord> rollout_sampled(const Scenario& scenario, std::size_t count, std::size_t trial = 0,
                                         unsigned threads = 0);

struct PhaseRow {
  std::string scenario;
  std::string method;
  double tau_max = 0.0;
  double s_max = 0.0;
  bool failed = false;
};

struct PhaseReport {
  std::vector<PhaseRow> rows;
  std::vector<std::pair<std::string, std::optional<double>>> spearman_by_method;
  std::optional<double> spearman_pooled;
};

/// Scatter rows of successful records plus Spearman(tau_max, s_max) per
/// method. Throws InvalidInput with fewer than 30 usable records.
PhaseReport phase_diagram(std::span<const TrialRecord> records);

/// Logistic failure fit over the usable records.
ThresholdFit threshold_fit(std::span<const TrialRecord> records);

/// Share of usable records of `method` with tau_max below `b`.
double fraction_below(std::span<const TrialRecord> records, Method method, double b);

struct DatasetConfig {
  std::size_t scenarios = 250;
  std::size_t candidates_per_scenario = 40;
  std::uint64_t seed = 7;
};

/// Randomized copy of a base scenario: speed, mass, density and restitution
/// draws. The horizon grows when a slow draw no longer fits the motion.
Scenario randomize_scenario(const Scenario& base, std::uint64_t seed);

/// Labeled examples from randomized variants of the base scenarios, cycling
/// through the bases. `group` is the variant index.
std::vector<LabeledExample> generate_dataset(const std::vector<Scenario>& bases, const DatasetConfig& cfg,
                                             unsigned threads = 0);

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  std::vector<LabeledExample> test;
};

/// Splits by group so no variant straddles two sets.
DatasetSplit split_by_group(std::span<const LabeledExample> data, double train_fraction, double validation_fraction,
                            std::uint64_t seed);

struct SurrogateEvaluation {
  std::optional<double> spearman;      // pooled predicted vs analytic totals
  double regret_pass_fraction = 0.0;   // groups with regret <= bound
  double regret_bound = 0.1;
  std::vector<double> regrets;         // per group, (C(g_pred) - C*) / C*
  std::size_t groups = 0;
};

SurrogateEvaluation evaluate_surrogate(const MlpModel& model, std::span<const LabeledExample> data,
                                       const CostWeights& weights, double regret_bound = 0.1);

}  // namespace wrenchgrasp
