#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/random.hpp"
#include "wrenchgrasp/spatial.hpp"

using namespace wrenchgrasp;

namespace {

Mat3 random_rotation(Rng& rng) {
  const Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  return axis_angle(axis, rng.uniform(-3.0, 3.0));
}

}  // namespace

TEST(Pose, RejectsNonOrthonormalRotation) {
  Mat3 r = Mat3::Identity();
  r(0, 1) = 1e-6;
  EXPECT_THROW(Pose(r, Vec3::Zero()), InvalidTransform);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  EXPECT_THROW(Pose(reflection, Vec3::Zero()), InvalidTransform);
}

TEST(Pose, InverseComposesToIdentity) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Pose p(random_rotation(rng), Vec3(rng.normal(), rng.normal(), rng.normal()));
    const Pose id = p * p.inverse();
    EXPECT_LT((id.rotation() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(id.translation().norm(), 1e-12);
  }
}

TEST(Pose, AboutPivotFixesThePivot) {
  const Vec3 pivot(0.3, -0.2, 1.0);
  const Pose p = Pose::about_pivot(Vec3(1, 2, 3), 0.7, pivot);
  EXPECT_LT((p.apply(pivot) - pivot).norm(), 1e-12);
}

TEST(Rotation, LogExpRoundTrip) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = random_rotation(rng);
    EXPECT_LT((rotation_exp(rotation_log(r)) - r).cwiseAbs().maxCoeff(), 1e-9);
  }
  const Mat3 half_turn = axis_angle(Vec3::UnitX(), std::numbers::pi);
  EXPECT_NEAR(rotation_log(half_turn).norm(), std::numbers::pi, 1e-9);
}

TEST(Transform, PointsAreAffineDirectionsAreNot) {
  const Pose t(axis_angle(Vec3::UnitZ(), std::numbers::pi / 2), Vec3(1, 0, 0));
  EXPECT_LT((transform_point(t, Vec3(1, 0, 0)) - Vec3(1, 1, 0)).norm(), 1e-12);
  EXPECT_LT((transform_direction(t, Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm(), 1e-12);
}

TEST(RigidBodyModel, ValidationCatchesBadInertia) {
  RigidBodyModel b;
  b.validate();
  b.inertia = Vec3(1.0, 1.0, 3.0).asDiagonal();  // violates the triangle inequality
  EXPECT_THROW(b.validate(), InvalidModel);
  b = RigidBodyModel{};
  b.mass = 0.0;
  EXPECT_THROW(b.validate(), InvalidModel);
  b = RigidBodyModel{};
  b.restitution = 1.5;
  EXPECT_THROW(b.validate(), InvalidModel);
}

TEST(Primitive, BoxInertiaMatchesClosedForm) {
  Primitive p;
  p.shape = Shape::box;
  p.dims = Vec3(0.2, 0.04, 0.02);
  p.density = 1000.0;
  const double m = 1000.0 * 0.2 * 0.04 * 0.02;
  const Mat3 i = p.local_inertia();
  EXPECT_NEAR(i(0, 0), m / 12.0 * (0.04 * 0.04 + 0.02 * 0.02), 1e-15);
  EXPECT_NEAR(i(1, 1), m / 12.0 * (0.2 * 0.2 + 0.02 * 0.02), 1e-15);
  EXPECT_NEAR(i(2, 2), m / 12.0 * (0.2 * 0.2 + 0.04 * 0.04), 1e-15);
}

// Monte Carlo oracle: inertia and COM of a two-primitive tool by uniform
// sampling inside the union, independent of the closed forms.
TEST(ComposeInertia, MatchesMonteCarloIntegration) {
  ToolModel tool;
  Primitive handle;
  handle.shape = Shape::box;
  handle.dims = Vec3(0.2, 0.03, 0.02);
  handle.density = 700.0;
  handle.pose = Pose::from_translation(Vec3(0.1, 0, 0));
  Primitive head;
  head.shape = Shape::cylinder;
  head.dims = Vec3(0.02, 0.06, 0.0);
  head.density = 2700.0;
  head.pose = Pose(axis_angle(Vec3::UnitX(), 0.3), Vec3(0.23, 0.0, 0.0));
  tool.primitives = {handle, head};
  const RigidBodyModel b = compose_inertia(tool);

  Rng rng(11);
  const Vec3 lo(-0.01, -0.05, -0.05), hi(0.26, 0.05, 0.05);
  const double box_volume = (hi - lo).prod();
  const int n = 400000;
  double mass = 0.0;
  Vec3 first = Vec3::Zero();
  Mat3 second = Mat3::Zero();
  for (int k = 0; k < n; ++k) {
    const Vec3 p(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), rng.uniform(lo.z(), hi.z()));
    double rho = 0.0;
    const Vec3 ph = p - handle.pose.translation();
    if (std::abs(ph.x()) <= 0.1 && std::abs(ph.y()) <= 0.015 && std::abs(ph.z()) <= 0.01) rho = 700.0;
    const Vec3 q = head.pose.rotation().transpose() * (p - head.pose.translation());
    if (std::hypot(q.x(), q.y()) <= 0.02 && std::abs(q.z()) <= 0.03) rho = 2700.0;
    if (rho == 0.0) continue;
    const double dm = rho * box_volume / n;
    mass += dm;
    first += dm * p;
    second += dm * p * p.transpose();
  }
  const Vec3 com = first / mass;
  const Mat3 cov = second - mass * com * com.transpose();
  const Mat3 inertia = cov.trace() * Mat3::Identity() - cov;
  EXPECT_NEAR(b.mass, mass, 0.01 * mass);
  EXPECT_LT((b.com - com).norm(), 1e-3);
  EXPECT_LT((b.inertia - inertia).cwiseAbs().maxCoeff(), 0.02 * inertia.cwiseAbs().maxCoeff());
  b.validate();
}

TEST(SampleSurface, PointsLieOnTheUnionSurface) {
  ToolModel tool;
  Primitive a;
  a.shape = Shape::box;
  a.dims = Vec3(0.1, 0.02, 0.02);
  a.pose = Pose::from_translation(Vec3(0.05, 0, 0));
  Primitive s;
  s.shape = Shape::sphere;
  s.dims = Vec3(0.02, 0, 0);
  s.pose = Pose::from_translation(Vec3(0.1, 0, 0));
  tool.primitives = {a, s};
  const PointCloud c = sample_surface(tool, 2000, 4);
  ASSERT_EQ(c.size(), 2000u);
  c.validate();
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (const auto& p : tool.primitives) EXPECT_FALSE(p.contains(c.points[i], 1e-6));
    // Stepping outward along the normal leaves the solid.
    const Vec3 out = c.points[i] + 1e-5 * c.normals[i];
    EXPECT_FALSE(a.contains(out, 0.0) || s.contains(out, 0.0));
  }
  const PointCloud again = sample_surface(tool, 2000, 4);
  EXPECT_EQ(again.points, c.points);
}

TEST(SampleSurface, CloudTransformsRigidly) {
  ToolModel tool;
  Primitive a;
  a.dims = Vec3(0.1, 0.02, 0.02);
  tool.primitives = {a};
  const PointCloud c = sample_surface(tool, 100, 1);
  const Pose t(axis_angle(Vec3(1, 1, 0), 0.4), Vec3(1, 2, 3));
  const PointCloud w = transform(t, c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_LT((w.points[i] - t.apply(c.points[i])).norm(), 1e-12);
    EXPECT_NEAR(w.normals[i].norm(), 1.0, 1e-12);
  }
}

TEST(ReadObjCloud, PairsVerticesWithNormals) {
  std::istringstream in("# cloud\nv 0 0 0\nvn 0 0 2\nv 1 0 0\nvn 1 0 0\n");
  const PointCloud c = read_obj_cloud(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_LT((c.normals[0] - Vec3::UnitZ()).norm(), 1e-12);
  std::istringstream bad("v 0 0 0\n");
  EXPECT_THROW(read_obj_cloud(bad), Error);
}

TEST(AngleBetween, ClampsNearParallel) {
  const Vec3 a(1, 0, 0);
  EXPECT_EQ(angle_between(a, a * (1 + 1e-16)), 0.0);
  EXPECT_NEAR(angle_between(a, -a), std::numbers::pi, 1e-12);
}
