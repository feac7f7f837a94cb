#include "wrenchgrasp/cost.hpp"

#include <algorithm>
#include <cmath>

#include "wrenchgrasp/errors.hpp"

namespace wrenchgrasp {

std::string to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::quasi_static: return "quasi_static";
    case RegimeLabel::dynamic: return "dynamic";
    case RegimeLabel::clustered: return "clustered";
  }
  return "unknown";
}

double torque_penalty(const Vec3& torque, const Vec3& closure_axis) {
  if (!is_unit(closure_axis, 1e-6)) throw InvalidParameter("closure axis must be unit length");
  return reject(torque, closure_axis).norm();
}

double slip_penalty(const Vec3& force, const Vec3& n_finger, double mu) {
  if (!(mu >= 0.0)) throw InvalidParameter("friction coefficient must be non-negative");
  const ForceSplit s = decompose_force(force, n_finger);
  return std::max(0.0, s.tangential.norm() - mu * s.normal.norm());
}

double alignment_penalty(const Vec3& n_finger, const Vec3& n) {
  if (!is_unit(n_finger, 1e-6) || !is_unit(n, 1e-6)) throw InvalidParameter("alignment inputs must be unit length");
  return std::acos(std::clamp(n_finger.dot(n), -1.0, 1.0));
}

namespace {

// Pad normal in the world, flipped to the side facing the interaction normal.
// Either pad of a parallel jaw can be the one that meets the load.
Vec3 facing_pad_normal(const Pose& pose, const GraspCandidate& g, const Vec3& n) {
  Vec3 nf = pose.rotate(g.finger_normal);
  if (nf.dot(n) < 0.0) nf = -nf;
  return nf;
}

}  // namespace

CostEvaluation evaluate_cost(const GraspCandidate& g, const Trajectory& trajectory, const ContactParams& contact,
                             const RigidBodyModel& body, const CostWeights& weights,
                             const CostOptions& options) {
  weights.validate();
  body.validate();
  if (!(options.dt > 0.0)) throw InvalidParameter("impulse duration must be positive");
  const double mu = options.mu.value_or(body.friction);

  CostEvaluation out;
  const auto events = contact_events(trajectory, contact);
  double peak_force = -1.0;
  for (const auto& e : events) {
    EventCost ec;
    ec.event = e;
    const RigidBodyModel world_body = body.expressed_in(e.pose);
    const Vec3 com = world_body.com;
    const Vec3 grasp_origin = e.pose.apply(g.origin());
    ec.com_lever = e.point - com;
    ec.grasp_lever = e.point - grasp_origin;
    ec.closure_axis = e.pose.rotate(g.closure_axis).normalized();
    ec.n_finger = facing_pad_normal(e.pose, g, e.normal).normalized();

    ContactState cs;
    cs.r = ec.com_lever;
    cs.n = e.normal;
    cs.v = e.v + e.omega.cross(com - e.pose.translation());
    cs.omega = e.omega;
    cs.dt = options.dt;
    cs.object_inverse_mass = e.object_inverse_mass;
    ec.wrench = evaluate_contact(world_body, cs, ec.grasp_lever, ec.n_finger);

    ec.breakdown.c_tau = torque_penalty(ec.wrench.torque, ec.closure_axis);
    ec.breakdown.c_slip = std::max(0.0, ec.wrench.tangential_force.norm() - mu * ec.wrench.normal_force.norm());
    ec.breakdown.c_align = alignment_penalty(ec.n_finger, e.normal);
    ec.breakdown = weighted(ec.breakdown, weights);

    out.breakdown.c_tau = std::max(out.breakdown.c_tau, ec.breakdown.c_tau);
    out.breakdown.c_slip = std::max(out.breakdown.c_slip, ec.breakdown.c_slip);
    const double f = ec.wrench.force.norm();
    if (f > peak_force) {
      peak_force = f;
      out.peak_event = out.events.size();
    }
    out.events.push_back(ec);
  }

  if (out.peak_event) {
    out.breakdown.c_align = out.events[*out.peak_event].breakdown.c_align;
  } else {
    const std::size_t k = std::min(trajectory.nominal_index, trajectory.samples.size() - 1);
    const Vec3 n = trajectory.targets.empty() ? contact.n : trajectory.targets.front().normal;
    out.breakdown.c_align = alignment_penalty(facing_pad_normal(trajectory.samples[k].pose, g, n).normalized(), n);
  }
  out.breakdown = weighted(out.breakdown, weights);
  return out;
}

CostBreakdown analytic_cost(const GraspCandidate& g, const Trajectory& trajectory, const ContactParams& contact,
                            const RigidBodyModel& body, const CostWeights& weights, const CostOptions& options) {
  return evaluate_cost(g, trajectory, contact, body, weights, options).breakdown;
}

double peak_inertial_force(const RigidBodyModel& body, const Trajectory& trajectory) {
  const auto& s = trajectory.samples;
  if (s.size() < 3) return 0.0;
  std::vector<Vec3> vcom(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 r = s[i].pose.rotate(body.com);
    vcom[i] = s[i].v + s[i].omega.cross(r);
  }
  double peak = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h = s[i + 1].t - s[i - 1].t;
    if (h <= 0.0) continue;
    peak = std::max(peak, body.mass * ((vcom[i + 1] - vcom[i - 1]) / h).norm());
  }
  return peak;
}

RegimeLabel classify_regime(const RigidBodyModel& body, const Trajectory& trajectory, double grasp_reaction,
                            std::size_t contact_count, double peak_contact_force, double theta) {
  if (!(grasp_reaction > 0.0)) throw InvalidParameter("grasp reaction must be positive");
  if (contact_count > 1) return RegimeLabel::clustered;
  const double peak = std::max(peak_inertial_force(body, trajectory), peak_contact_force);
  return peak >= theta * grasp_reaction ? RegimeLabel::dynamic : RegimeLabel::quasi_static;
}

}  // namespace wrenchgrasp
