#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wrenchgrasp/breakdown.hpp"
#include "wrenchgrasp/dynsim.hpp"
#include "wrenchgrasp/grasp.hpp"
#include "wrenchgrasp/motion.hpp"
#include "wrenchgrasp/spatial.hpp"

namespace wrenchgrasp {

inline constexpr int kScenarioSchemaVersion = 1;

/// Adjustments applied on top of the inertia composed from the primitives.
struct BodyOverrides {
  double restitution = 0.2;
  double friction = 0.5;  // tool-gripper pad friction used by the analytic slip penalty
  double mass_scale = 1.0;
};

struct CostSettings {
  CostWeights weights;
  double dt_s = 0.005;
};

/// One fixed tool, contact and trajectory. Trials vary only the sampled
/// point cloud and grasp candidates.
struct Scenario {
  std::string name;
  TaskKind task = TaskKind::hammer;
  ToolModel tool;
  BodyOverrides body;
  ContactParams contact;
  MotionParams motion;
  std::size_t cloud_points = 3000;
  std::optional<GraspRegion> grasp_region;
  SamplerConfig sampler;
  CostSettings cost;
  SimConfig sim;
  std::uint64_t seed = 1;
  std::size_t trials = 20;

  /// Throws InvalidInput.
  void validate() const;
};

/// Composed inertia with the scenario overrides applied.
RigidBodyModel make_body(const Scenario& scenario);

/// Reads and validates a scenario document. Missing optional fields take
/// their defaults. Schema and value errors raise ParseError naming the field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Full document with every default written out.
std::string scenario_to_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace wrenchgrasp
