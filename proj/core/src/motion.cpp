#include "wrenchgrasp/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wrenchgrasp/errors.hpp"

namespace wrenchgrasp {

namespace {

constexpr double kPi = std::numbers::pi;

/// Smooth trapezoid: sin^2 ramp up, cruise, cos^2 ramp down.
struct SpeedProfile {
  double peak = 0.0;
  double a0 = 0.0, a1 = 0.0, d0 = 0.0, d1 = 0.0;

  double speed(double t) const {
    if (t <= a0) return 0.0;
    if (t < a1) {
      const double x = 0.5 * kPi * (t - a0) / (a1 - a0);
      return peak * std::sin(x) * std::sin(x);
    }
    if (t <= d0) return peak;
    if (t < d1) {
      const double x = 0.5 * kPi * (t - d0) / (d1 - d0);
      return peak * std::cos(x) * std::cos(x);
    }
    return 0.0;
  }

  /// Distance travelled since a0.
  double distance(double t) const {
    const double ramp = a1 - a0;
    const double decel = d1 - d0;
    if (t <= a0) return 0.0;
    if (t < a1) {
      const double tau = t - a0;
      return peak * (0.5 * tau - ramp / (2.0 * kPi) * std::sin(kPi * tau / ramp));
    }
    const double after_ramp = 0.5 * peak * ramp;
    if (t <= d0) return after_ramp + peak * (t - a1);
    const double after_cruise = after_ramp + peak * (d0 - a1);
    const double tau = std::min(t, d1) - d0;
    return after_cruise + peak * (0.5 * tau + decel / (2.0 * kPi) * std::sin(kPi * tau / decel));
  }
};

Vec3 any_perpendicular(const Vec3& n) {
  const Vec3 trial = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return reject(trial, n).normalized();
}

}  // namespace

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::hammer: return "hammer";
    case TaskKind::sweep: return "sweep";
    case TaskKind::knock: return "knock";
    case TaskKind::reach: return "reach";
  }
  return "hammer";
}

TaskKind task_from_string(const std::string& name) {
  if (name == "hammer") return TaskKind::hammer;
  if (name == "sweep") return TaskKind::sweep;
  if (name == "knock") return TaskKind::knock;
  if (name == "reach") return TaskKind::reach;
  throw InvalidParameter("unknown trajectory kind '" + name + "'");
}

void ContactParams::validate() const {
  if (!c_tool.allFinite() || !c_obj.allFinite()) throw InvalidParameter("contact points must be finite");
  if (!is_unit(n, 1e-6)) throw InvalidParameter("contact normal n must be unit length");
  if (!is_unit(d, 1e-6)) throw InvalidParameter("interaction direction d must be unit length");
}

double Trajectory::sample_dt() const {
  if (samples.size() < 2) return 0.0;
  return samples[1].t - samples[0].t;
}

void Trajectory::validate(double twist_tolerance) const {
  if (samples.size() < 2) throw InvalidInput("trajectory needs at least two samples");
  double v_max = 0.0;
  double w_max = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.t < 0.0 || s.t > horizon + 1e-12) throw InvalidInput("trajectory time outside [0, T]");
    if (i > 0 && !(s.t > samples[i - 1].t)) throw InvalidInput("trajectory times must be strictly increasing");
    v_max = std::max(v_max, s.v.norm());
    w_max = std::max(w_max, s.omega.norm());
  }
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const auto& prev = samples[i - 1];
    const auto& next = samples[i + 1];
    const double h = next.t - prev.t;
    const Vec3 fd_v = (next.pose.translation() - prev.pose.translation()) / h;
    const Vec3 fd_w = rotation_log(next.pose.rotation() * prev.pose.rotation().transpose()) / h;
    const Vec3& v = samples[i].v;
    const Vec3& w = samples[i].omega;
    if ((fd_v - v).norm() > twist_tolerance * v.norm() + 1e-3 * v_max + 1e-12 ||
        (fd_w - w).norm() > twist_tolerance * w.norm() + 1e-3 * w_max + 1e-12) {
      throw InvalidInput("trajectory twist inconsistent with poses at sample " + std::to_string(i));
    }
  }
}

MotionParams MotionParams::defaults(TaskKind kind) {
  MotionParams p;
  switch (kind) {
    case TaskKind::hammer:
      p.speed_mps = 2.0;
      p.event_time_s = 0.4;
      p.ramp_s = 0.4;
      p.decel_s = 0.5;
      break;
    case TaskKind::knock:
      p.speed_mps = 0.8;
      p.event_time_s = 0.5;
      p.ramp_s = 0.3;
      p.decel_s = 0.4;
      break;
    case TaskKind::sweep:
      p.speed_mps = 0.5;
      p.event_time_s = 0.3;
      p.ramp_s = 0.2;
      p.pre_cruise_s = 0.05;
      p.post_cruise_s = 0.05;
      p.decel_s = 0.3;
      p.sweep_count = 3;
      p.sweep_spacing_m = 0.05;
      p.object_masses_kg = {0.05, 0.08, 0.1};
      break;
    case TaskKind::reach:
      p.speed_mps = 0.5;
      p.event_time_s = 0.5;
      p.ramp_s = 0.3;
      p.pre_cruise_s = 0.1;
      p.post_cruise_s = 0.05;
      p.decel_s = 0.3;
      p.object_masses_kg = {0.3};
      break;
  }
  return p;
}

Trajectory synth_trajectory(TaskKind kind, const MotionParams& params, const ContactParams& contact) {
  contact.validate();
  validate_rotation(params.tool_rotation);
  if (!(params.speed_mps > 0.0)) throw SynthesisError("speed must be positive");
  if (!(params.ramp_s > 0.0) || !(params.decel_s > 0.0)) throw SynthesisError("ramp and deceleration times must be positive");
  if (params.pre_cruise_s < 0.0 || params.post_cruise_s < 0.0) throw SynthesisError("cruise times must be non-negative");
  if (!(params.horizon_s > 0.0) || params.samples < 2) throw SynthesisError("horizon and sample count must be positive");
  if (kind == TaskKind::hammer && !(params.arc_radius_m > 0.0)) throw SynthesisError("arc radius must be positive");
  if (contact.d.dot(contact.n) >= -1e-9) {
    throw SynthesisError("interaction direction does not approach the object (d.n >= 0)");
  }

  const std::size_t events = kind == TaskKind::sweep ? std::max<std::size_t>(params.sweep_count, 1) : 1;
  if (kind == TaskKind::sweep && (params.sweep_count < 2 || !(params.sweep_spacing_m > 0.0))) {
    throw SynthesisError("sweep needs at least two contacts with positive spacing");
  }
  const double t_first = params.event_time_s;
  const double t_last = t_first + static_cast<double>(events - 1) * params.sweep_spacing_m / params.speed_mps;

  SpeedProfile profile;
  profile.peak = params.speed_mps;
  profile.a1 = t_first - params.pre_cruise_s;
  profile.a0 = profile.a1 - params.ramp_s;
  profile.d0 = t_last + params.post_cruise_s;
  profile.d1 = profile.d0 + params.decel_s;
  const double dt = params.horizon_s / static_cast<double>(params.samples);
  if (profile.a0 < -1e-12 || profile.d1 > params.horizon_s + 1e-12) {
    throw SynthesisError("motion phases do not fit inside the horizon");
  }

  // Tool pose at the designed contact configuration.
  const Pose contact_pose(params.tool_rotation, contact.c_obj - params.tool_rotation * contact.c_tool);
  const double s_contact = profile.distance(t_first);

  // Hammer swing: rotation about a pivot behind the contact so the tool point
  // moves along -n at the contact instant.
  Vec3 pivot = Vec3::Zero();
  Vec3 axis = Vec3::UnitY();
  if (kind == TaskKind::hammer) {
    Vec3 back = reject(contact_pose.translation() - contact.c_obj, contact.n);
    back = back.norm() > 1e-9 ? back.normalized() : any_perpendicular(contact.n);
    pivot = contact.c_obj + params.arc_radius_m * back;
    axis = back.cross(contact.n);
  }
  const Vec3 travel = kind == TaskKind::hammer ? Vec3(-contact.n) : contact.d;

  Trajectory traj;
  traj.horizon = params.horizon_s;
  traj.samples.reserve(params.samples);
  for (std::size_t i = 0; i < params.samples; ++i) {
    TrajectorySample s;
    s.t = static_cast<double>(i) * params.horizon_s / static_cast<double>(params.samples);
    const double ds = profile.distance(s.t) - s_contact;
    const double speed = profile.speed(s.t);
    if (kind == TaskKind::hammer) {
      const double angle = ds / params.arc_radius_m;
      s.pose = Pose::about_pivot(axis, angle, pivot) * contact_pose;
      s.omega = (speed / params.arc_radius_m) * axis;
      s.v = s.omega.cross(s.pose.translation() - pivot);
    } else {
      s.pose = Pose::from_translation(ds * travel) * contact_pose;
      s.v = speed * travel;
      s.omega = Vec3::Zero();
    }
    traj.samples.push_back(s);
  }
  traj.nominal_index = std::min<std::size_t>(static_cast<std::size_t>(std::llround(t_first / dt)), params.samples - 1);

  for (std::size_t k = 0; k < events; ++k) {
    ContactTarget target;
    target.point = contact.c_obj + static_cast<double>(k) * params.sweep_spacing_m * contact.d;
    target.normal = contact.n;
    if (k < params.object_masses_kg.size() && params.object_masses_kg[k] > 0.0 &&
        std::isfinite(params.object_masses_kg[k])) {
      target.inverse_mass = 1.0 / params.object_masses_kg[k];
    }
    traj.targets.push_back(target);
  }
  return traj;
}

Vec3 point_velocity(const TrajectorySample& sample, const Vec3& world_point) {
  return sample.v + sample.omega.cross(world_point - sample.pose.translation());
}

std::vector<ContactEvent> contact_events(const Trajectory& trajectory, const ContactParams& contact) {
  std::vector<ContactEvent> events;
  const auto& samples = trajectory.samples;
  for (std::size_t k = 0; k < trajectory.targets.size(); ++k) {
    const ContactTarget& target = trajectory.targets[k];
    double prev = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double dist = (samples[i].pose.apply(contact.c_tool) - target.point).dot(target.normal);
      if (i > 0 && prev > 0.0 && dist <= 0.0) {
        const std::size_t j = std::abs(prev) < std::abs(dist) ? i - 1 : i;
        const TrajectorySample& s = samples[j];
        ContactEvent e;
        e.t = s.t;
        e.sample = j;
        e.target = k;
        e.pose = s.pose;
        e.point = s.pose.apply(contact.c_tool);
        e.normal = target.normal;
        e.v = s.v;
        e.omega = s.omega;
        e.contact_velocity = point_velocity(s, e.point);
        e.approach_speed = -e.contact_velocity.dot(target.normal);
        e.object_inverse_mass = target.inverse_mass;
        if (e.approach_speed > 0.0) events.push_back(e);
      }
      prev = dist;
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ContactEvent& a, const ContactEvent& b) { return a.t < b.t; });
  return events;
}

Trajectory scale_speed(const Trajectory& trajectory, double factor) {
  if (!(factor >= 0.0)) throw InvalidParameter("speed scale must be non-negative");
  Trajectory out = trajectory;
  if (trajectory.samples.empty()) return out;
  const Vec3 p0 = trajectory.samples.front().pose.translation();
  const Mat3 r0 = trajectory.samples.front().pose.rotation();
  for (auto& s : out.samples) {
    const Vec3 p = p0 + factor * (s.pose.translation() - p0);
    const Mat3 r = rotation_exp(factor * rotation_log(s.pose.rotation() * r0.transpose())) * r0;
    s.pose = Pose(r, p);
    s.v *= factor;
    s.omega *= factor;
  }
  return out;
}

Trajectory transform(const Pose& t, const Trajectory& trajectory) {
  Trajectory out = trajectory;
  for (auto& s : out.samples) {
    s.pose = t * s.pose;
    s.v = t.rotate(s.v);
    s.omega = t.rotate(s.omega);
  }
  for (auto& target : out.targets) {
    target.point = t.apply(target.point);
    target.normal = t.rotate(target.normal);
  }
  return out;
}

ContactParams transform(const Pose& t, const ContactParams& contact) {
  ContactParams out = contact;
  out.c_obj = t.apply(contact.c_obj);
  out.n = t.rotate(contact.n);
  out.d = t.rotate(contact.d);
  return out;
}

}  // namespace wrenchgrasp
