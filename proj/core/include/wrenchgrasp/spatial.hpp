#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wrenchgrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform: x_world = R * x_local + t.
class Pose {
 public:
  static constexpr double kTolerance = 1e-9;

  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  /// Throws InvalidTransform unless R^T R = I and det R = +1 within kTolerance.
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t);
  static Pose from_axis_angle(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero());
  /// Rotation by `angle` about the line through `pivot` along `axis`.
  static Pose about_pivot(const Vec3& axis, double angle, const Vec3& pivot);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& point) const { return rotation_ * point + translation_; }
  Vec3 rotate(const Vec3& direction) const { return rotation_ * direction; }

  Pose operator*(const Pose& rhs) const;
  Pose inverse() const;

  /// Projects the rotation back onto SO(3) (polar decomposition).
  Pose orthonormalized() const;

  /// Largest entry of |R^T R - I|.
  double orthonormality_error() const;

 private:
  struct Unchecked {};
  Pose(const Mat3& r, const Vec3& t, Unchecked) : rotation_(r), translation_(t) {}

  Mat3 rotation_;
  Vec3 translation_;
};

void validate_rotation(const Mat3& r);

/// Axis-angle rotation matrix, axis need not be normalised.
Mat3 axis_angle(const Vec3& axis, double angle);

/// Matrix logarithm on SO(3), returned as a rotation vector.
Vec3 rotation_log(const Mat3& r);
Mat3 rotation_exp(const Vec3& rotation_vector);

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Throws InvalidInput when sizes differ or a normal is not unit length.
  void validate() const;
};

// Frame changes. Points transform affinely, directions by rotation only.
Vec3 transform_point(const Pose& t, const Vec3& point);
Vec3 transform_direction(const Pose& t, const Vec3& direction);
Pose transform(const Pose& t, const Pose& pose);
PointCloud transform(const Pose& t, const PointCloud& cloud);

/// Inertial and contact properties of a rigid tool.
/// `inertia` is about the COM, in the body frame.
struct RigidBodyModel {
  double mass = 1.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Identity();
  double restitution = 0.0;
  double friction = 0.5;

  /// Throws InvalidModel if any invariant fails.
  void validate() const;

  /// Same body with com and inertia expressed in the frame reached by `pose`.
  RigidBodyModel expressed_in(const Pose& pose) const;
};

enum class Shape { box, cylinder, sphere };

/// One solid primitive of a tool, placed in the tool body frame.
///   box:      dims = full extents (x, y, z)
///   cylinder: dims = (radius, height, -), axis along local z
///   sphere:   dims = (radius, -, -)
struct Primitive {
  Shape shape = Shape::box;
  Vec3 dims = Vec3::Ones();
  double density = 1.0;  // kg/m^3
  Pose pose;

  double volume() const;
  double mass() const { return density * volume(); }
  double area() const;
  /// Inertia about the primitive's own centre, in its local frame.
  Mat3 local_inertia() const;
  /// True if the point (tool frame) lies strictly inside, by at least `margin`.
  bool contains(const Vec3& point, double margin) const;
  void validate() const;
};

struct ToolModel {
  std::vector<Primitive> primitives;
  std::string category;

  void validate() const;
};

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);

/// Sums primitive masses, places the COM at the mass-weighted centroid and
/// transports every primitive inertia to it (parallel-axis theorem).
/// Primitives are assumed not to overlap. Restitution and friction are left
/// at their defaults; callers apply category priors.
RigidBodyModel compose_inertia(const ToolModel& tool);

/// Area-weighted uniform sampling of the union surface. Points that fall
/// inside another primitive are rejected. Deterministic for a given seed.
PointCloud sample_surface(const ToolModel& tool, std::size_t count, std::uint64_t seed);

/// Reads `v x y z` / `vn x y z` records, paired 1:1 in file order.
PointCloud read_obj_cloud(std::istream& in);
PointCloud read_obj_cloud(const std::string& path);

/// Orthogonal projection of v onto the plane normal to unit `axis`.
inline Vec3 reject(const Vec3& v, const Vec3& axis) { return v - v.dot(axis) * axis; }

/// Angle between two vectors in [0, pi]; arccos argument clamped to [-1, 1].
double angle_between(const Vec3& a, const Vec3& b);

bool is_unit(const Vec3& v, double tol);

}  // namespace wrenchgrasp
