#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wrenchgrasp/breakdown.hpp"
#include "wrenchgrasp/grasp.hpp"
#include "wrenchgrasp/motion.hpp"
#include "wrenchgrasp/spatial.hpp"
#include "wrenchgrasp/wrench.hpp"

namespace wrenchgrasp {

enum class RegimeLabel { quasi_static, dynamic, clustered };

std::string to_string(RegimeLabel label);

/// Norm of the torque component orthogonal to the closure axis.
/// Throws InvalidParameter for a non-unit axis.
double torque_penalty(const Vec3& torque, const Vec3& closure_axis);

/// max(0, |F_t| - mu |F_n|) at the finger pad.
double slip_penalty(const Vec3& force, const Vec3& n_finger, double mu);

/// Angle in [0, pi] between two unit vectors.
double alignment_penalty(const Vec3& n_finger, const Vec3& n);

struct CostOptions {
  double dt = 0.005;          // impulse duration (s)
  std::optional<double> mu;   // pad friction; defaults to body.friction
};

/// One scored contact event, world frame.
struct EventCost {
  ContactEvent event;
  WrenchReport wrench;
  CostBreakdown breakdown;  // unweighted components at this event
  Vec3 grasp_lever = Vec3::Zero();  // contact point - grasp origin
  Vec3 com_lever = Vec3::Zero();    // contact point - COM
  Vec3 closure_axis = Vec3::UnitY();
  Vec3 n_finger = Vec3::UnitY();    // pad normal, oriented to face the interaction normal
};

struct CostEvaluation {
  CostBreakdown breakdown;
  std::vector<EventCost> events;
  std::optional<std::size_t> peak_event;  // event with the largest contact force
};

/// Per-event impulse chain and penalties, aggregated by per-component maximum
/// over events. Alignment is taken at the peak-force event. Without events
/// the breakdown is (0, 0, alignment at the nominal pose).
CostEvaluation evaluate_cost(const GraspCandidate& g, const Trajectory& trajectory, const ContactParams& contact,
                             const RigidBodyModel& body, const CostWeights& weights,
                             const CostOptions& options = {});

CostBreakdown analytic_cost(const GraspCandidate& g, const Trajectory& trajectory, const ContactParams& contact,
                            const RigidBodyModel& body, const CostWeights& weights,
                            const CostOptions& options = {});

/// Largest |m a_COM| along the trajectory from central differences of the COM velocity.
double peak_inertial_force(const RigidBodyModel& body, const Trajectory& trajectory);

/// Clustered for more than one contact; otherwise dynamic when the peak
/// inertial or contact force reaches theta * grasp_reaction.
RegimeLabel classify_regime(const RigidBodyModel& body, const Trajectory& trajectory, double grasp_reaction,
                            std::size_t contact_count, double peak_contact_force = 0.0, double theta = 1.0);

}  // namespace wrenchgrasp
