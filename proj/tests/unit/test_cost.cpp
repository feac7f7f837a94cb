#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wrenchgrasp/cost.hpp"
#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/random.hpp"

using namespace wrenchgrasp;

namespace {

constexpr double kPi = std::numbers::pi;

// Rod along x, uniform box, tool frame at its end.
RigidBodyModel rod() {
  Primitive p;
  p.shape = Shape::box;
  p.dims = Vec3(0.3, 0.02, 0.02);
  p.density = 2700.0;
  p.pose = Pose::from_translation(Vec3(0.15, 0, 0));
  ToolModel t;
  t.primitives = {p};
  RigidBodyModel b = compose_inertia(t);
  b.restitution = 0.2;
  b.friction = 0.5;
  return b;
}

ContactParams tip_strike() {
  ContactParams c;
  c.c_tool = Vec3(0.28, 0, -0.01);
  c.c_obj = Vec3(0.5, 0.2, 0.0);
  c.n = Vec3::UnitZ();
  c.d = -Vec3::UnitZ();
  return c;
}

GraspCandidate grasp_at(double x, const Vec3& closure) {
  GraspCandidate g;
  const Vec3 y = closure.normalized();
  const Vec3 z = reject(std::abs(y.z()) > 0.9 ? Vec3::UnitX() : Vec3::UnitZ(), y).normalized();
  Mat3 r;
  r.col(0) = y.cross(z);
  r.col(1) = y;
  r.col(2) = z;
  g.pose = Pose(r, Vec3(x, 0, 0));
  g.closure_axis = y;
  g.finger_normal = y;
  g.jaw_width = 0.02;
  g.contacts = {Vec3(x, 0, 0) - 0.01 * y, Vec3(x, 0, 0) + 0.01 * y};
  g.contact_normals = {-y, y};
  return g;
}

}  // namespace

TEST(Penalties, TorqueKnownValues) {
  EXPECT_NEAR(torque_penalty(Vec3(3, 0, 4), Vec3::UnitZ()), 3.0, 1e-12);
  EXPECT_NEAR(torque_penalty(Vec3(0, 0, 5), Vec3::UnitZ()), 0.0, 1e-12);
  EXPECT_THROW(torque_penalty(Vec3(1, 0, 0), Vec3(0, 0, 2)), InvalidParameter);
}

TEST(Penalties, SlipKnownValues) {
  // 3 N tangential against mu * 4 N normal.
  EXPECT_NEAR(slip_penalty(Vec3(3, 0, 4), Vec3::UnitZ(), 0.5), 1.0, 1e-12);
  EXPECT_NEAR(slip_penalty(Vec3(3, 0, 4), Vec3::UnitZ(), 1.0), 0.0, 1e-12);
  EXPECT_NEAR(slip_penalty(Vec3(3, 0, 4), Vec3::UnitZ(), 0.0), 3.0, 1e-12);
  EXPECT_THROW(slip_penalty(Vec3(1, 0, 0), Vec3::UnitZ(), -0.1), InvalidParameter);
}

TEST(Penalties, AlignmentBounds) {
  EXPECT_NEAR(alignment_penalty(Vec3::UnitZ(), Vec3::UnitZ()), 0.0, 1e-12);
  EXPECT_NEAR(alignment_penalty(Vec3::UnitZ(), -Vec3::UnitZ()), kPi, 1e-12);
  EXPECT_NEAR(alignment_penalty(Vec3::UnitX(), Vec3::UnitZ()), kPi / 2, 1e-12);
  EXPECT_THROW(alignment_penalty(Vec3(0, 0, 1.1), Vec3::UnitZ()), InvalidParameter);
}

TEST(Penalties, NonNegativeOnRandomInputs) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 f(rng.normal(), rng.normal(), rng.normal());
    const Vec3 a = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    const Vec3 b = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    EXPECT_GE(torque_penalty(f, a), 0.0);
    EXPECT_GE(slip_penalty(f, a, rng.uniform(0, 2)), 0.0);
    const double al = alignment_penalty(a, b);
    EXPECT_GE(al, 0.0);
    EXPECT_LE(al, kPi);
  }
}

TEST(EvaluateCost, MatchesHandDerivedImpact) {
  const RigidBodyModel body = rod();
  const ContactParams c = tip_strike();
  MotionParams p = MotionParams::defaults(TaskKind::knock);
  const Trajectory traj = synth_trajectory(TaskKind::knock, p, c);
  const GraspCandidate g = grasp_at(0.05, Vec3::UnitY());
  const CostEvaluation ev = evaluate_cost(g, traj, c, body, {});
  ASSERT_EQ(ev.events.size(), 1u);

  // Pure translation at speed v along -z: J = (1+e) v / (1/m + (I^-1 (r x n) x r).n).
  const auto& e = ev.events[0].event;
  const Vec3 com = e.pose.apply(body.com);
  const Vec3 r = e.point - com;
  const double ixx = body.inertia(0, 0);  // axis-aligned rod, diagonal inertia
  const double iyy = body.inertia(1, 1);
  const double izz = body.inertia(2, 2);
  const Vec3 rxn = r.cross(Vec3::UnitZ());
  const Vec3 inv(rxn.x() / ixx, rxn.y() / iyy, rxn.z() / izz);
  const double denom = 1.0 / body.mass + inv.cross(r).z();
  const double speed = -e.v.z();
  const double j = (1.0 + body.restitution) * speed / denom;
  const double force = j / 0.005;
  const Vec3 lever = e.point - e.pose.apply(g.origin());
  const Vec3 torque = lever.cross(Vec3(0, 0, force));
  EXPECT_NEAR(ev.events[0].wrench.impulse, j, 1e-9 * j);
  EXPECT_NEAR(ev.breakdown.c_tau, Vec3(torque.x(), 0, torque.z()).norm(), 1e-9);
  // Pads face +-y, the load is along z: all of it is tangential.
  EXPECT_NEAR(ev.breakdown.c_slip, force, 1e-9 * force);
  EXPECT_NEAR(ev.breakdown.c_align, kPi / 2, 1e-9);
  EXPECT_NEAR(ev.breakdown.total, ev.breakdown.c_tau + ev.breakdown.c_slip + ev.breakdown.c_align, 1e-9);
}

TEST(EvaluateCost, ClosureAlongNormalRemovesSlipAndAlignment) {
  const RigidBodyModel body = rod();
  const ContactParams c = tip_strike();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c);
  const CostBreakdown b = analytic_cost(grasp_at(0.1, Vec3::UnitZ()), traj, c, body, {});
  EXPECT_NEAR(b.c_slip, 0.0, 1e-9);
  EXPECT_NEAR(b.c_align, 0.0, 1e-9);
  EXPECT_GT(b.c_tau, 0.0);
}

TEST(EvaluateCost, TorqueGrowsWithLever) {
  const RigidBodyModel body = rod();
  const ContactParams c = tip_strike();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c);
  double prev = 1e300;
  for (double x : {0.02, 0.08, 0.14, 0.2}) {
    const double tau = analytic_cost(grasp_at(x, Vec3::UnitZ()), traj, c, body, {}).c_tau;
    EXPECT_LT(tau, prev);
    prev = tau;
  }
}

TEST(EvaluateCost, WeightsOnlyMoveTheTotal) {
  const RigidBodyModel body = rod();
  const ContactParams c = tip_strike();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c);
  const GraspCandidate g = grasp_at(0.05, Vec3(0, 1, 1));
  const CostBreakdown a = analytic_cost(g, traj, c, body, {});
  const CostWeights w{2.0, 0.5, 3.0};
  const CostBreakdown b = analytic_cost(g, traj, c, body, w);
  EXPECT_DOUBLE_EQ(a.c_tau, b.c_tau);
  EXPECT_DOUBLE_EQ(a.c_slip, b.c_slip);
  EXPECT_DOUBLE_EQ(a.c_align, b.c_align);
  EXPECT_NEAR(b.total, 2.0 * a.c_tau + 0.5 * a.c_slip + 3.0 * a.c_align, 1e-9);
  EXPECT_THROW(analytic_cost(g, traj, c, body, CostWeights{0, 0, 0}), InvalidParameter);
  EXPECT_THROW(analytic_cost(g, traj, c, body, CostWeights{-1, 1, 1}), InvalidParameter);
}

TEST(EvaluateCost, NoContactMeansOnlyAlignment) {
  const RigidBodyModel body = rod();
  const ContactParams c = tip_strike();
  const Trajectory traj = scale_speed(synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c), 0.0);
  const CostEvaluation ev = evaluate_cost(grasp_at(0.05, Vec3::UnitY()), traj, c, body, {});
  EXPECT_TRUE(ev.events.empty());
  EXPECT_EQ(ev.breakdown.c_tau, 0.0);
  EXPECT_EQ(ev.breakdown.c_slip, 0.0);
  EXPECT_NEAR(ev.breakdown.c_align, kPi / 2, 1e-9);
}

TEST(EvaluateCost, InvariantUnderWorldTransform) {
  const RigidBodyModel body = rod();
  const ContactParams c = tip_strike();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c);
  const Pose x(axis_angle(Vec3(0.2, 1, -0.4), 0.7), Vec3(1, 2, -3));
  const GraspCandidate g = grasp_at(0.07, Vec3(0, 1, 0.5));
  const CostBreakdown a = analytic_cost(g, traj, c, body, {});
  // The grasp and body live in the tool frame, so only the world moves.
  const CostBreakdown b = analytic_cost(g, transform(x, traj), transform(x, c), body, {});
  EXPECT_NEAR(a.c_tau, b.c_tau, 1e-7);
  EXPECT_NEAR(a.c_slip, b.c_slip, 1e-6);
  EXPECT_NEAR(a.c_align, b.c_align, 1e-9);
}

TEST(EvaluateCost, SweepTakesTheWorstEvent) {
  const RigidBodyModel body = rod();
  ContactParams c;
  c.c_tool = Vec3(0.29, -0.01, 0);
  c.c_obj = Vec3(0, 0.5, 0);
  c.n = Vec3::UnitY();
  c.d = -Vec3::UnitY();
  const Trajectory traj = synth_trajectory(TaskKind::sweep, MotionParams::defaults(TaskKind::sweep), c);
  const CostEvaluation ev = evaluate_cost(grasp_at(0.05, Vec3::UnitZ()), traj, c, body, {});
  ASSERT_EQ(ev.events.size(), 3u);
  double tau = 0.0;
  double slip = 0.0;
  double peak = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < ev.events.size(); ++i) {
    tau = std::max(tau, ev.events[i].breakdown.c_tau);
    slip = std::max(slip, ev.events[i].breakdown.c_slip);
    if (ev.events[i].wrench.force.norm() > peak) {
      peak = ev.events[i].wrench.force.norm();
      k = i;
    }
  }
  EXPECT_DOUBLE_EQ(ev.breakdown.c_tau, tau);
  EXPECT_DOUBLE_EQ(ev.breakdown.c_slip, slip);
  EXPECT_EQ(*ev.peak_event, k);
}

TEST(Regime, ThresholdsAndClusters) {
  const RigidBodyModel body = rod();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), tip_strike());
  const double inertial = peak_inertial_force(body, traj);
  // Oracle: trapezoid ramp reaches the peak speed over ramp_s.
  const MotionParams p = MotionParams::defaults(TaskKind::knock);
  EXPECT_GT(inertial, 0.5 * body.mass * p.speed_mps / p.ramp_s);
  EXPECT_EQ(classify_regime(body, traj, 1e6, 1), RegimeLabel::quasi_static);
  EXPECT_EQ(classify_regime(body, traj, 1e-3, 1), RegimeLabel::dynamic);
  EXPECT_EQ(classify_regime(body, traj, 1e6, 1, 2e6), RegimeLabel::dynamic);
  EXPECT_EQ(classify_regime(body, traj, 1e6, 3), RegimeLabel::clustered);
  EXPECT_THROW(classify_regime(body, traj, 0.0, 1), InvalidParameter);
}
