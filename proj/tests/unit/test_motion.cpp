#include <gtest/gtest.h>

#include <cmath>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/motion.hpp"

using namespace wrenchgrasp;

namespace {

ContactParams strike() {
  ContactParams c;
  c.c_tool = Vec3(0.2, 0.0, -0.03);
  c.c_obj = Vec3(0.4, 0.1, 0.0);
  c.n = Vec3::UnitZ();
  c.d = -Vec3::UnitZ();
  return c;
}

ContactParams push() {
  ContactParams c;
  c.c_tool = Vec3(0.3, -0.01, 0.0);
  c.c_obj = Vec3(0.0, 0.5, 0.1);
  c.n = Vec3::UnitY();
  c.d = -Vec3::UnitY();
  return c;
}

}  // namespace

TEST(TaskKind, NamesRoundTrip) {
  for (auto k : {TaskKind::hammer, TaskKind::sweep, TaskKind::knock, TaskKind::reach}) {
    EXPECT_EQ(task_from_string(to_string(k)), k);
  }
  EXPECT_THROW(task_from_string("saw"), Error);
}

TEST(Synth, EveryKindProducesAConsistentTrajectory) {
  for (auto k : {TaskKind::hammer, TaskKind::knock, TaskKind::reach}) {
    const ContactParams c = k == TaskKind::reach ? push() : strike();
    const Trajectory t = synth_trajectory(k, MotionParams::defaults(k), c);
    t.validate();
    EXPECT_EQ(t.samples.size(), 200u);
  }
  const Trajectory s = synth_trajectory(TaskKind::sweep, MotionParams::defaults(TaskKind::sweep), push());
  s.validate();
  EXPECT_EQ(s.targets.size(), 3u);
}

TEST(Synth, ToolPointMeetsObjectAtEventTime) {
  for (auto k : {TaskKind::hammer, TaskKind::knock}) {
    const MotionParams p = MotionParams::defaults(k);
    const ContactParams c = strike();
    const Trajectory t = synth_trajectory(k, p, c);
    const auto& s = t.samples[t.nominal_index];
    EXPECT_NEAR(s.t, p.event_time_s, t.sample_dt());
    // Within one sample step of the designed contact.
    EXPECT_LT((s.pose.apply(c.c_tool) - c.c_obj).norm(), 1.5 * p.speed_mps * t.sample_dt());
  }
}

TEST(Synth, HammerApproachesAlongMinusNormal) {
  const MotionParams p = MotionParams::defaults(TaskKind::hammer);
  const ContactParams c = strike();
  const auto events = contact_events(synth_trajectory(TaskKind::hammer, p, c), c);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_GT(events[0].approach_speed, 0.9 * p.speed_mps);
  const Vec3 vc = events[0].contact_velocity.normalized();
  EXPECT_GT(-vc.dot(c.n), 0.99);
}

TEST(Synth, RejectsDirectionsThatDoNotApproach) {
  ContactParams c = strike();
  c.d = Vec3::UnitX();
  EXPECT_THROW(synth_trajectory(TaskKind::knock, MotionParams::defaults(TaskKind::knock), c), SynthesisError);
  MotionParams p = MotionParams::defaults(TaskKind::hammer);
  p.event_time_s = 0.1;  // the ramp no longer fits before the event
  EXPECT_THROW(synth_trajectory(TaskKind::hammer, p, strike()), SynthesisError);
}

TEST(ContactEvents, SweepHitsEachTargetInOrder) {
  const MotionParams p = MotionParams::defaults(TaskKind::sweep);
  const ContactParams c = push();
  const auto events = contact_events(synth_trajectory(TaskKind::sweep, p, c), c);
  ASSERT_EQ(events.size(), p.sweep_count);
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(events[i].target, i);
    EXPECT_GT(events[i].object_inverse_mass, 0.0);
    if (i > 0) {
      EXPECT_GT(events[i].t, events[i - 1].t);
    }
  }
}

TEST(ScaleSpeed, ZeroFactorFreezesTheTool) {
  const ContactParams c = strike();
  const Trajectory t = synth_trajectory(TaskKind::hammer, MotionParams::defaults(TaskKind::hammer), c);
  const Trajectory z = scale_speed(t, 0.0);
  for (const auto& s : z.samples) {
    EXPECT_LT((s.pose.translation() - t.samples[0].pose.translation()).norm(), 1e-12);
    EXPECT_EQ(s.v.norm() + s.omega.norm(), 0.0);
  }
  EXPECT_TRUE(contact_events(z, c).empty());
  scale_speed(t, 0.5).validate();
}

TEST(ScaleSpeed, SlowMotionStopsShortOfTheObject) {
  const ContactParams c = strike();
  const Trajectory t = synth_trajectory(TaskKind::hammer, MotionParams::defaults(TaskKind::hammer), c);
  EXPECT_EQ(contact_events(t, c).size(), 1u);
  EXPECT_TRUE(contact_events(scale_speed(t, 0.1), c).empty());
}

TEST(Transform, EventsAreCovariant) {
  const ContactParams c = strike();
  const Trajectory t = synth_trajectory(TaskKind::hammer, MotionParams::defaults(TaskKind::hammer), c);
  const Pose x(axis_angle(Vec3(0.3, -1, 2), 1.1), Vec3(0.5, -2, 1));
  const auto a = contact_events(t, c);
  const auto b = contact_events(transform(x, t), transform(x, c));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sample, b[i].sample);
    EXPECT_NEAR(a[i].approach_speed, b[i].approach_speed, 1e-9);
    EXPECT_LT((x.apply(a[i].point) - b[i].point).norm(), 1e-9);
  }
}

TEST(PointVelocity, RigidBodyField) {
  TrajectorySample s;
  s.pose = Pose::from_translation(Vec3(1, 0, 0));
  s.v = Vec3(0, 1, 0);
  s.omega = Vec3(0, 0, 2);
  EXPECT_LT((point_velocity(s, Vec3(2, 0, 0)) - Vec3(0, 3, 0)).norm(), 1e-12);
}
