#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "wrenchgrasp/grasp.hpp"
#include "wrenchgrasp/motion.hpp"
#include "wrenchgrasp/spatial.hpp"
#include "wrenchgrasp/wrench.hpp"

namespace wrenchgrasp {

struct SimConfig {
  double dt_sim = 0.001;             // s
  double mu_g = 1.0;                 // pad friction
  double clamp_force = 40.0;         // N; +inf disables slip
  double a_patch = 0.01;             // m, soft-finger torsion radius
  double slip_limit = 0.005;         // m
  double rotation_limit = 0.17453292519943295;  // rad (10 deg)
  std::uint64_t seed = 0;
  double impulse_dt = 0.005;         // s, duration of the contact force pulse
  double k_t = 0.003;                // m / (N s), translational slip mobility
  double k_r = 7.0;                  // rad / (N m s), rotational slip mobility
  double mu_sigma = 0.0;             // lognormal per-trial jitter of mu_g
  double clamp_sigma = 0.0;          // lognormal per-trial jitter of clamp_force
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  bool record_series = false;

  /// Throws InvalidParameter.
  void validate() const;
};

struct SimSample {
  double t = 0.0;
  Vec3 wrist_force = Vec3::Zero();   // world
  Vec3 wrist_torque = Vec3::Zero();  // world, about the grasp origin
  double slip = 0.0;                 // m
  double rotation = 0.0;             // rad
};

struct SimMetrics {
  double tau_max = 0.0;
  double s_max = 0.0;
  double alpha_max = 0.0;
  bool failed = false;
  std::size_t events = 0;
  /// e * (pre-impact v_c.n) + (post-impact v_c.n) per event; zero when restitution holds.
  std::vector<double> restitution_residuals;
  std::vector<SimSample> time_series;
};

/// Tool-in-gripper slip, grasp-frame coordinates (closure along y).
struct SlipState {
  Vec3 u = Vec3::Zero();      // translational drift (m)
  Vec3 theta = Vec3::Zero();  // accumulated small rotation (rad)
  double jaw_width = 0.0;
  double mu_g = 1.0;
  double clamp_force = 40.0;

  /// Pad slip distance: drift plus rotation times the pad lever for each axis.
  double slip_distance(double a_patch) const;
  double rotation() const { return theta.norm(); }
};

/// Advances slip by one step under a grasp-frame load (force and torque
/// fields of `grasp_load`; closure along y). Each mode moves at a rate
/// proportional to the load in excess of its friction limit:
///   tangential force    mu N
///   torque about y      mu N a_patch
///   torque about x, z   mu N w / 2
SlipState slip_update(const SlipState& state, const WrenchReport& grasp_load, const SimConfig& cfg, double dt);

/// Strict threshold test on s_max and alpha_max.
bool failure_classify(const SimMetrics& metrics, const SimConfig& cfg);

/// Kinematic gripper rollout at dt_sim with impact force pulses at the
/// predicted contact events. Throws SimulationDiverged on non-finite state.
SimMetrics rollout(const ToolModel& tool, const RigidBodyModel& body, const GraspCandidate& g,
                   const Trajectory& trajectory, const ContactParams& contact, const SimConfig& cfg);

}  // namespace wrenchgrasp
