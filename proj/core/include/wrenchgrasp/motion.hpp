#pragma once

#include <limits>
#include <string>
#include <vector>

#include "wrenchgrasp/spatial.hpp"

namespace wrenchgrasp {

enum class TaskKind { hammer, sweep, knock, reach };

std::string to_string(TaskKind kind);
TaskKind task_from_string(const std::string& name);

/// Contact parameters: designated tool point (tool body frame), object
/// contact point (world), interaction normal pointing from the object into
/// the tool, and interaction direction of travel.
struct ContactParams {
  Vec3 c_tool = Vec3::Zero();
  Vec3 c_obj = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();
  Vec3 d = -Vec3::UnitZ();

  void validate() const;
};

/// Object surface the tool point may strike: plane through `point` with
/// normal `normal`. Immovable objects have inverse_mass = 0.
struct ContactTarget {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double inverse_mass = 0.0;
};

/// Tool body pose in the world with the twist of the body-frame origin.
struct TrajectorySample {
  double t = 0.0;
  Pose pose;
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double horizon = 1.0;
  std::vector<ContactTarget> targets;
  std::size_t nominal_index = 0;  // sample at the designed first contact

  double sample_dt() const;
  /// Checks ordering, sample count and twist/pose consistency (relative
  /// tolerance on central finite differences). Throws InvalidInput.
  void validate(double twist_tolerance = 0.05) const;
};

struct MotionParams {
  double horizon_s = 1.0;
  std::size_t samples = 200;
  /// Peak contact-point speed (hammer, knock) or cruise speed (sweep, reach).
  double speed_mps = 1.0;
  double event_time_s = 0.4;  // designed time of the first contact
  double ramp_s = 0.3;        // acceleration phase length
  double decel_s = 0.3;       // deceleration phase length
  double pre_cruise_s = 0.0;  // constant-speed time before the first contact
  double post_cruise_s = 0.0; // constant-speed time after the last contact
  double arc_radius_m = 0.5;  // hammer swing radius about the pivot
  std::size_t sweep_count = 3;
  double sweep_spacing_m = 0.04;
  /// Per-target object masses; missing entries or non-positive values mean immovable.
  std::vector<double> object_masses_kg;
  Mat3 tool_rotation = Mat3::Identity();  // tool orientation at the contact configuration

  static MotionParams defaults(TaskKind kind);
};

/// Builds a parametric trajectory for `kind` that brings Ω.c_tool onto
/// Ω.c_obj at `event_time_s`. Throws SynthesisError when the phases do not
/// fit in the horizon or the direction does not approach the object.
Trajectory synth_trajectory(TaskKind kind, const MotionParams& params, const ContactParams& contact);

struct ContactEvent {
  double t = 0.0;
  std::size_t sample = 0;
  std::size_t target = 0;
  Pose pose;                  // tool pose at the event
  Vec3 point = Vec3::Zero();  // world position of the tool contact point
  Vec3 normal = Vec3::UnitZ();
  Vec3 v = Vec3::Zero();      // body-origin velocity
  Vec3 omega = Vec3::Zero();
  Vec3 contact_velocity = Vec3::Zero();
  double approach_speed = 0.0;  // -v_c . n, positive
  double object_inverse_mass = 0.0;
};

/// Plane crossings of the tool contact point, resolved at the nearest sample,
/// ordered by time. Separating crossings are dropped.
std::vector<ContactEvent> contact_events(const Trajectory& trajectory, const ContactParams& contact);

/// Velocity of a world point rigidly attached to the tool at this sample.
Vec3 point_velocity(const TrajectorySample& sample, const Vec3& world_point);

/// Scales the motion about the start pose: displacements, rotation angles
/// and twists all scale by `factor` with timing unchanged.
Trajectory scale_speed(const Trajectory& trajectory, double factor);

Trajectory transform(const Pose& t, const Trajectory& trajectory);
ContactParams transform(const Pose& t, const ContactParams& contact);

}  // namespace wrenchgrasp
