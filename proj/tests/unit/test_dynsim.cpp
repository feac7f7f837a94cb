#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "wrenchgrasp/cost.hpp"
#include "wrenchgrasp/dynsim.hpp"
#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/random.hpp"

using namespace wrenchgrasp;

namespace {

ToolModel rod_tool() {
  Primitive p;
  p.shape = Shape::box;
  p.dims = Vec3(0.3, 0.02, 0.02);
  p.density = 2700.0;
  p.pose = Pose::from_translation(Vec3(0.15, 0, 0));
  ToolModel t;
  t.primitives = {p};
  return t;
}

RigidBodyModel rod_body() {
  RigidBodyModel b = compose_inertia(rod_tool());
  b.restitution = 0.3;
  return b;
}

// Closure along z through the rod at x; pads on the top and bottom faces.
GraspCandidate pinch(double x) {
  GraspCandidate g;
  Mat3 r;
  r.col(0) = Vec3::UnitY().cross(Vec3::UnitX());
  r.col(1) = Vec3::UnitZ();
  r.col(2) = Vec3::UnitX();
  r.col(0) = r.col(1).cross(r.col(2));
  g.pose = Pose(r, Vec3(x, 0, 0));
  g.closure_axis = Vec3::UnitZ();
  g.finger_normal = Vec3::UnitZ();
  g.jaw_width = 0.02;
  g.contacts = {Vec3(x, 0, -0.01), Vec3(x, 0, 0.01)};
  g.contact_normals = {-Vec3::UnitZ(), Vec3::UnitZ()};
  return g;
}

Trajectory hold(std::size_t n = 50) {
  Trajectory t;
  t.horizon = 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    TrajectorySample s;
    s.t = 0.5 * static_cast<double>(i) / static_cast<double>(n);
    t.samples.push_back(s);
  }
  return t;
}

ContactParams tip_strike() {
  ContactParams c;
  c.c_tool = Vec3(0.29, 0, -0.01);
  c.c_obj = Vec3(0.4, 0, 0);
  c.n = Vec3::UnitZ();
  c.d = -Vec3::UnitZ();
  return c;
}

}  // namespace

TEST(SlipUpdate, BelowEveryLimitNothingMoves) {
  SimConfig cfg;
  SlipState s;
  s.jaw_width = 0.02;
  s.clamp_force = 40;
  WrenchReport load;
  load.force = Vec3(30, 5, 20);        // |F_t| = 36 < 40
  load.torque = Vec3(0.3, 0.35, 0.2);  // 0.36 < 0.4 and 0.35 < 0.4
  const SlipState n = slip_update(s, load, cfg, 0.001);
  EXPECT_EQ(n.u.norm(), 0.0);
  EXPECT_EQ(n.theta.norm(), 0.0);
}

TEST(SlipUpdate, RatesFollowTheExcess) {
  SimConfig cfg;
  cfg.k_t = 0.01;
  cfg.k_r = 5.0;
  SlipState s;
  s.jaw_width = 0.02;
  s.mu_g = 0.5;
  s.clamp_force = 40;  // cap 20 N
  WrenchReport load;
  load.force = Vec3(0, 100, 30);      // normal part ignored
  load.torque = Vec3(0.5, -0.3, 0);   // caps 0.2 and 0.2
  const SlipState n = slip_update(s, load, cfg, 0.002);
  EXPECT_NEAR(n.u.z(), 0.01 * 10 * 0.002, 1e-15);
  EXPECT_NEAR(n.u.x(), 0.0, 1e-15);
  EXPECT_NEAR(n.theta.y(), -5.0 * 0.1 * 0.002, 1e-15);
  EXPECT_NEAR(n.theta.x(), 5.0 * 0.3 * 0.002, 1e-15);
  EXPECT_NEAR(n.slip_distance(0.01), n.u.norm() + 0.01 * std::abs(n.theta.y()) + 0.01 * std::abs(n.theta.x()), 1e-15);
}

TEST(SlipUpdate, InfiniteClampNeverSlips) {
  SimConfig cfg;
  SlipState s;
  s.jaw_width = 0.02;
  s.clamp_force = std::numeric_limits<double>::infinity();
  WrenchReport load;
  load.force = Vec3(1e6, 0, 1e6);
  load.torque = Vec3(1e5, 1e5, 1e5);
  const SlipState n = slip_update(s, load, cfg, 0.001);
  EXPECT_EQ(n.u.norm() + n.theta.norm(), 0.0);
}

TEST(FailureClassify, StrictThresholds) {
  SimConfig cfg;
  SimMetrics m;
  m.s_max = cfg.slip_limit;
  m.alpha_max = cfg.rotation_limit;
  EXPECT_FALSE(failure_classify(m, cfg));
  m.s_max = std::nextafter(cfg.slip_limit, 1.0);
  EXPECT_TRUE(failure_classify(m, cfg));
  m.s_max = 0.0;
  m.alpha_max = std::nextafter(cfg.rotation_limit, 1.0);
  EXPECT_TRUE(failure_classify(m, cfg));
}

TEST(Rollout, StaticHoldAtTheComCarriesOnlyWeight) {
  const ToolModel tool = rod_tool();
  const RigidBodyModel body = rod_body();
  SimConfig cfg;
  cfg.record_series = true;
  const SimMetrics m = rollout(tool, body, pinch(body.com.x()), hold(), tip_strike(), cfg);
  EXPECT_EQ(m.events, 0u);
  EXPECT_LT(m.tau_max, 1e-9);
  ASSERT_FALSE(m.time_series.empty());
  for (const auto& s : m.time_series) {
    EXPECT_LT((s.wrist_force - Vec3(0, 0, body.mass * 9.81)).norm(), 1e-9);
  }
  EXPECT_FALSE(m.failed);
}

TEST(Rollout, StaticHoldOffComMatchesLeverTimesWeight) {
  const ToolModel tool = rod_tool();
  const RigidBodyModel body = rod_body();
  SimConfig cfg;
  const double x = 0.02;
  const SimMetrics m = rollout(tool, body, pinch(x), hold(), tip_strike(), cfg);
  EXPECT_NEAR(m.tau_max, (body.com.x() - x) * body.mass * 9.81, 1e-9);
}

TEST(Rollout, WeakClampDropsAHeavyLoad) {
  const ToolModel tool = rod_tool();
  const RigidBodyModel body = rod_body();
  SimConfig cfg;
  cfg.clamp_force = 0.5;
  const SimMetrics m = rollout(tool, body, pinch(0.005), hold(200), tip_strike(), cfg);
  EXPECT_TRUE(m.failed);
  cfg.clamp_force = std::numeric_limits<double>::infinity();
  const SimMetrics held = rollout(tool, body, pinch(0.005), hold(200), tip_strike(), cfg);
  EXPECT_FALSE(held.failed);
  EXPECT_EQ(held.s_max, 0.0);
}

TEST(Rollout, ImpactTorqueMatchesTheImpulseModel) {
  const ToolModel tool = rod_tool();
  const RigidBodyModel body = rod_body();
  const ContactParams c = tip_strike();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c);
  const GraspCandidate g = pinch(0.03);
  SimConfig cfg;
  cfg.gravity = Vec3::Zero();
  const SimMetrics m = rollout(tool, body, g, traj, c, cfg);
  const CostEvaluation ev = evaluate_cost(g, traj, c, body, {}, CostOptions{cfg.impulse_dt, {}});
  ASSERT_EQ(m.events, 1u);
  ASSERT_EQ(ev.events.size(), 1u);
  const double analytic = ev.events[0].wrench.torque.norm();
  EXPECT_NEAR(m.tau_max, analytic, 0.1 * analytic);
  ASSERT_EQ(m.restitution_residuals.size(), 1u);
  EXPECT_NEAR(m.restitution_residuals[0], 0.0, 1e-9);
}

TEST(Rollout, RestitutionHoldsOverRandomBodies) {
  Rng rng(21);
  const ContactParams c = tip_strike();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c);
  for (int i = 0; i < 100; ++i) {
    RigidBodyModel body = rod_body();
    body.mass *= rng.uniform(0.5, 2.0);
    body.inertia *= rng.uniform(0.5, 2.0);
    body.restitution = rng.uniform(0.0, 1.0);
    const SimMetrics m = rollout(ToolModel{}, body, pinch(0.05), traj, c, SimConfig{});
    for (double r : m.restitution_residuals) EXPECT_NEAR(r, 0.0, 1e-9);
  }
}

TEST(Rollout, DeterministicAndSeedSensitiveUnderJitter) {
  const ToolModel tool = rod_tool();
  const RigidBodyModel body = rod_body();
  const ContactParams c = tip_strike();
  const Trajectory traj = synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c);
  SimConfig cfg;
  cfg.clamp_force = 5.0;
  cfg.mu_sigma = 0.2;
  cfg.seed = 4;
  const SimMetrics a = rollout(tool, body, pinch(0.02), traj, c, cfg);
  const SimMetrics b = rollout(tool, body, pinch(0.02), traj, c, cfg);
  EXPECT_EQ(a.s_max, b.s_max);
  EXPECT_EQ(a.alpha_max, b.alpha_max);
  cfg.seed = 5;
  const SimMetrics d = rollout(tool, body, pinch(0.02), traj, c, cfg);
  EXPECT_NE(a.s_max, d.s_max);
}

TEST(Rollout, RejectsBadInputs) {
  const ToolModel tool = rod_tool();
  const RigidBodyModel body = rod_body();
  GraspCandidate off = pinch(0.05);
  off.contacts[0].z() = -0.02;  // floating below the rod
  EXPECT_THROW(rollout(tool, body, off, hold(), tip_strike(), SimConfig{}), InvalidInput);
  SimConfig bad;
  bad.dt_sim = 0.0;
  EXPECT_THROW(rollout(tool, body, pinch(0.05), hold(), tip_strike(), bad), InvalidParameter);
}
