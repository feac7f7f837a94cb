#include "wrenchgrasp/dynsim.hpp"

#include <algorithm>
#include <cmath>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/random.hpp"

namespace wrenchgrasp {

void SimConfig::validate() const {
  if (!(dt_sim > 0.0)) throw InvalidParameter("dt_sim must be positive");
  if (!(mu_g >= 0.0)) throw InvalidParameter("mu_g must be non-negative");
  if (!(a_patch > 0.0)) throw InvalidParameter("a_patch must be positive");
  if (!(clamp_force > 0.0)) throw InvalidParameter("clamp_force must be positive");
  if (!(slip_limit > 0.0) || !(rotation_limit > 0.0)) throw InvalidParameter("failure limits must be positive");
  if (!(impulse_dt > 0.0)) throw InvalidParameter("impulse_dt must be positive");
  if (!(k_t >= 0.0) || !(k_r >= 0.0)) throw InvalidParameter("slip mobilities must be non-negative");
  if (!(mu_sigma >= 0.0) || !(clamp_sigma >= 0.0)) throw InvalidParameter("jitter sigmas must be non-negative");
}

double SlipState::slip_distance(double a_patch) const {
  const double lever = 0.5 * jaw_width;
  return u.norm() + a_patch * std::abs(theta.y()) + lever * std::hypot(theta.x(), theta.z());
}

SlipState slip_update(const SlipState& state, const WrenchReport& load, const SimConfig& cfg, double dt) {
  SlipState next = state;
  if (!std::isfinite(state.clamp_force)) return next;
  const double cap = state.mu_g * state.clamp_force;

  const Vec3 ft(load.force.x(), 0.0, load.force.z());
  const double ft_excess = ft.norm() - cap;
  if (ft_excess > 0.0) next.u += cfg.k_t * ft_excess * dt * ft.normalized();

  const double ty = load.torque.y();
  const double ty_excess = std::abs(ty) - cap * cfg.a_patch;
  if (ty_excess > 0.0) next.theta.y() += cfg.k_r * ty_excess * dt * (ty > 0.0 ? 1.0 : -1.0);

  const Vec3 tp(load.torque.x(), 0.0, load.torque.z());
  const double tp_excess = tp.norm() - cap * 0.5 * state.jaw_width;
  if (tp_excess > 0.0) next.theta += cfg.k_r * tp_excess * dt * tp.normalized();
  return next;
}

bool failure_classify(const SimMetrics& m, const SimConfig& cfg) {
  return m.s_max > cfg.slip_limit || m.alpha_max > cfg.rotation_limit;
}

namespace {

struct Kinematics {
  Pose pose;
  Vec3 v = Vec3::Zero();      // body origin
  Vec3 omega = Vec3::Zero();
  Vec3 a = Vec3::Zero();      // body origin
  Vec3 alpha = Vec3::Zero();
};

// Pose by linear translation and slerp between samples; twists linear;
// accelerations piecewise constant over the sample interval.
Kinematics interpolate(const Trajectory& traj, double t) {
  const auto& s = traj.samples;
  const double t0 = s.front().t;
  const double h = traj.sample_dt();
  std::size_t i = static_cast<std::size_t>(std::max(0.0, std::floor((t - t0) / h)));
  i = std::min(i, s.size() - 2);
  const auto& a = s[i];
  const auto& b = s[i + 1];
  const double span = b.t - a.t;
  const double u = std::clamp((t - a.t) / span, 0.0, 1.0);

  const Eigen::Quaterniond qa(a.pose.rotation());
  const Eigen::Quaterniond qb(b.pose.rotation());
  const Mat3 r = qa.slerp(u, qb).normalized().toRotationMatrix();
  Kinematics k;
  k.pose = Pose(r, (1.0 - u) * a.pose.translation() + u * b.pose.translation()).orthonormalized();
  k.v = (1.0 - u) * a.v + u * b.v;
  k.omega = (1.0 - u) * a.omega + u * b.omega;
  k.a = (b.v - a.v) / span;
  k.alpha = (b.omega - a.omega) / span;
  return k;
}

bool on_surface(const ToolModel& tool, const Vec3& p) {
  constexpr double tol = 1e-4;
  bool near = false;
  for (const auto& prim : tool.primitives) {
    if (prim.contains(p, tol)) return false;
    if (prim.contains(p, -tol)) near = true;
  }
  return near;
}

void check_finite(const Vec3& v, const char* what) {
  if (!v.allFinite()) throw SimulationDiverged(std::string("non-finite ") + what);
}

struct Pulse {
  double t0 = 0.0;
  Vec3 force_local = Vec3::Zero();  // body frame, fixed for the pulse
  bool impact = false;
};

}  // namespace

SimMetrics rollout(const ToolModel& tool, const RigidBodyModel& body, const GraspCandidate& g,
                   const Trajectory& trajectory, const ContactParams& contact, const SimConfig& cfg) {
  cfg.validate();
  body.validate();
  trajectory.validate();
  if (!tool.primitives.empty()) {
    for (const auto& c : g.contacts) {
      if (!on_surface(tool, c)) throw InvalidInput("grasp contact is not on the tool surface");
    }
  }

  Rng rng(cfg.seed);
  SlipState slip;
  slip.jaw_width = g.jaw_width;
  slip.mu_g = cfg.mu_g * std::exp(cfg.mu_sigma * rng.normal());
  slip.clamp_force = cfg.clamp_force * std::exp(cfg.clamp_sigma * rng.normal());

  SimMetrics m;
  std::vector<Pulse> pulses;
  for (const auto& e : contact_events(trajectory, contact)) {
    const RigidBodyModel wb = body.expressed_in(e.pose);
    ContactState cs;
    cs.r = e.point - wb.com;
    cs.n = e.normal;
    cs.v = e.v + e.omega.cross(wb.com - e.pose.translation());
    cs.omega = e.omega;
    cs.dt = cfg.impulse_dt;
    cs.object_inverse_mass = e.object_inverse_mass;
    const ImpulseResult j = normal_impulse(wb, cs);
    const Twist after = apply_normal_impulse(wb, cs, j.impulse);
    const double pre = contact_velocity(cs.v, cs.omega, cs.r).dot(cs.n);
    const double post = contact_velocity(after.v, after.omega, cs.r).dot(cs.n);
    if (cs.object_inverse_mass == 0.0) m.restitution_residuals.push_back(post + wb.restitution * pre);
    Pulse p;
    p.t0 = e.t;
    p.force_local = e.pose.rotation().transpose() * contact_force(j.impulse, cs);
    p.impact = j.impact;
    pulses.push_back(p);
    ++m.events;
  }

  // Grasp frame constants, tool body frame.
  const Mat3 rg = g.pose.rotation();
  const Vec3 og = g.origin();
  const double t_begin = trajectory.samples.front().t;
  const double t_end = trajectory.samples.back().t;
  const auto steps = static_cast<std::size_t>(std::floor((t_end - t_begin) / cfg.dt_sim + 1e-9));

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = t_begin + static_cast<double>(k) * cfg.dt_sim;
    const Kinematics kin = interpolate(trajectory, t);
    const Mat3& r = kin.pose.rotation();
    const Vec3 c = kin.pose.apply(body.com);
    const Vec3 o = kin.pose.apply(og);
    const Vec3 rc = c - kin.pose.translation();
    const Vec3 a_com = kin.a + kin.alpha.cross(rc) + kin.omega.cross(kin.omega.cross(rc));
    const Mat3 iw = r * body.inertia * r.transpose();

    Vec3 f_ext = Vec3::Zero();
    Vec3 tau_ext = Vec3::Zero();  // about the grasp origin
    for (const auto& p : pulses) {
      if (!p.impact || t < p.t0 - 1e-12 || t >= p.t0 + cfg.impulse_dt - 1e-12) continue;
      const Vec3 f = r * p.force_local;
      const Vec3 ce = kin.pose.apply(contact.c_tool);
      f_ext += f;
      tau_ext += (ce - o).cross(f);
    }

    const Vec3 weight = body.mass * cfg.gravity;
    const Vec3 fg = body.mass * a_com - weight - f_ext;
    const Vec3 tg = iw * kin.alpha + kin.omega.cross(iw * kin.omega) + (c - o).cross(body.mass * a_com) -
                    tau_ext - (c - o).cross(weight);
    check_finite(fg, "grasp force");
    check_finite(tg, "grasp torque");

    // Load in the grasp frame.
    const Mat3 to_grasp = (r * rg).transpose();
    WrenchReport load;
    load.force = to_grasp * fg;
    load.torque = to_grasp * tg;
    slip = slip_update(slip, load, cfg, cfg.dt_sim);
    check_finite(slip.u, "slip drift");
    check_finite(slip.theta, "slip rotation");

    const double tau = tg.norm();
    m.tau_max = std::max(m.tau_max, tau);
    m.s_max = std::max(m.s_max, slip.slip_distance(cfg.a_patch));
    m.alpha_max = std::max(m.alpha_max, slip.rotation());
    if (cfg.record_series) m.time_series.push_back({t, fg, tg, slip.slip_distance(cfg.a_patch), slip.rotation()});
  }
  m.failed = failure_classify(m, cfg);
  return m;
}

}  // namespace wrenchgrasp
