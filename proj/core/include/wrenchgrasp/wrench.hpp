#pragma once

#include <span>

#include "wrenchgrasp/spatial.hpp"

namespace wrenchgrasp {

/// Inputs of one tool-object impact, all vectors in a common frame.
struct ContactState {
  Vec3 r = Vec3::Zero();      // lever arm c_obj - c_COM (m)
  Vec3 n = Vec3::UnitZ();     // interaction normal, unit, pointing from the object into the tool
  Vec3 v = Vec3::Zero();      // COM linear velocity (m/s)
  Vec3 omega = Vec3::Zero();  // angular velocity (rad/s)
  double dt = 0.005;          // impulse duration (s)
  double object_inverse_mass = 0.0;  // 0 for an immovable object

  void validate() const;
};

struct ImpulseResult {
  double impulse = 0.0;  // N s, non-negative
  bool impact = false;   // false for separating or grazing contact
};

/// Impact quantities at one contact, with the force split at the finger pad.
struct WrenchReport {
  double impulse = 0.0;
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  Vec3 normal_force = Vec3::Zero();
  Vec3 tangential_force = Vec3::Zero();
};

struct ForceSplit {
  Vec3 normal = Vec3::Zero();
  Vec3 tangential = Vec3::Zero();
};

struct Twist {
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

/// v + omega x r.
Vec3 contact_velocity(const Vec3& v, const Vec3& omega, const Vec3& r);

/// Normal impulse magnitude against a rigid object,
///   J = -(1 + e) v_c.n / (1/m + 1/m_obj + n.[I^-1 (r x n) x r]),
/// with `body` inertia expressed in the same frame as the contact vectors.
/// Separating contacts (v_c.n >= 0) return J = 0 and impact = false.
ImpulseResult normal_impulse(const RigidBodyModel& body, const ContactState& cs);

/// (J / dt) n. Throws InvalidParameter for dt <= 0.
Vec3 contact_force(double impulse, const ContactState& cs);

/// r x F, with r from the reference (wrist) origin to the contact point.
Vec3 induced_torque(const Vec3& r, const Vec3& force);

/// F_n = (F.n_f) n_f, F_t = F - F_n. Throws InvalidParameter for a non-unit normal.
ForceSplit decompose_force(const Vec3& force, const Vec3& n_finger);

/// Component-wise sums; an empty list gives the zero wrench.
WrenchReport aggregate_contacts(std::span<const WrenchReport> reports);

/// Full chain for one contact: impulse, force, torque about the grasp origin
/// (lever `grasp_lever` = contact point - grasp origin) and pad decomposition.
WrenchReport evaluate_contact(const RigidBodyModel& body, const ContactState& cs, const Vec3& grasp_lever,
                              const Vec3& n_finger);

/// Velocity of the free body after impulse J n is applied at r.
Twist apply_normal_impulse(const RigidBodyModel& body, const ContactState& cs, double impulse);

}  // namespace wrenchgrasp
