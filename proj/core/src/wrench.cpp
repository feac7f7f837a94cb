#include "wrenchgrasp/wrench.hpp"

#include <cmath>

#include "wrenchgrasp/errors.hpp"

namespace wrenchgrasp {

void ContactState::validate() const {
  if (!is_unit(n, 1e-6)) throw InvalidParameter("contact normal must be unit length");
  if (!(dt > 0.0)) throw InvalidParameter("impulse duration must be positive");
  if (!r.allFinite() || !v.allFinite() || !omega.allFinite()) throw InvalidParameter("non-finite contact state");
  if (!(object_inverse_mass >= 0.0)) throw InvalidParameter("object inverse mass must be non-negative");
}

Vec3 contact_velocity(const Vec3& v, const Vec3& omega, const Vec3& r) { return v + omega.cross(r); }

ImpulseResult normal_impulse(const RigidBodyModel& body, const ContactState& cs) {
  const Vec3 vc = contact_velocity(cs.v, cs.omega, cs.r);
  const double approach = vc.dot(cs.n);
  if (!(approach < 0.0)) return {};
  const Vec3 angular = body.inertia.ldlt().solve(cs.r.cross(cs.n));
  const double denom = 1.0 / body.mass + cs.object_inverse_mass + cs.n.dot(angular.cross(cs.r));
  return {-(1.0 + body.restitution) * approach / denom, true};
}

Vec3 contact_force(double impulse, const ContactState& cs) {
  if (!(cs.dt > 0.0)) throw InvalidParameter("impulse duration must be positive");
  return (impulse / cs.dt) * cs.n;
}

Vec3 induced_torque(const Vec3& r, const Vec3& force) { return r.cross(force); }

ForceSplit decompose_force(const Vec3& force, const Vec3& n_finger) {
  if (!is_unit(n_finger, 1e-6)) throw InvalidParameter("finger normal must be unit length");
  ForceSplit out;
  out.normal = force.dot(n_finger) * n_finger;
  out.tangential = force - out.normal;
  return out;
}

WrenchReport aggregate_contacts(std::span<const WrenchReport> reports) {
  WrenchReport sum;
  for (const auto& r : reports) {
    sum.impulse += r.impulse;
    sum.force += r.force;
    sum.torque += r.torque;
    sum.normal_force += r.normal_force;
    sum.tangential_force += r.tangential_force;
  }
  return sum;
}

WrenchReport evaluate_contact(const RigidBodyModel& body, const ContactState& cs, const Vec3& grasp_lever,
                              const Vec3& n_finger) {
  cs.validate();
  WrenchReport out;
  out.impulse = normal_impulse(body, cs).impulse;
  out.force = contact_force(out.impulse, cs);
  out.torque = induced_torque(grasp_lever, out.force);
  const ForceSplit split = decompose_force(out.force, n_finger);
  out.normal_force = split.normal;
  out.tangential_force = split.tangential;
  return out;
}

Twist apply_normal_impulse(const RigidBodyModel& body, const ContactState& cs, double impulse) {
  const Vec3 p = impulse * cs.n;
  return {cs.v + p / body.mass, cs.omega + body.inertia.ldlt().solve(cs.r.cross(p))};
}

}  // namespace wrenchgrasp
