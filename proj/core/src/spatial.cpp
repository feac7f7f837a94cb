#include "wrenchgrasp/spatial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/random.hpp"

namespace wrenchgrasp {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

void validate_rotation(const Mat3& r) {
  if (!r.allFinite()) throw InvalidTransform("rotation has non-finite entries");
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > Pose::kTolerance) {
    throw InvalidTransform("rotation is not orthonormal (|R^T R - I| = " + std::to_string(ortho) + ")");
  }
  if (std::abs(r.determinant() - 1.0) > Pose::kTolerance) {
    throw InvalidTransform("rotation determinant is not +1");
  }
}

Pose::Pose(const Mat3& rotation, const Vec3& translation) : rotation_(rotation), translation_(translation) {
  validate_rotation(rotation);
  if (!finite(translation)) throw InvalidTransform("translation has non-finite entries");
}

Pose Pose::from_translation(const Vec3& t) { return Pose(Mat3::Identity(), t, Unchecked{}); }

Pose Pose::from_axis_angle(const Vec3& axis, double angle, const Vec3& t) {
  return Pose(axis_angle(axis, angle), t, Unchecked{});
}

Pose Pose::about_pivot(const Vec3& axis, double angle, const Vec3& pivot) {
  const Mat3 r = axis_angle(axis, angle);
  return Pose(r, pivot - r * pivot, Unchecked{});
}

Pose Pose::operator*(const Pose& rhs) const {
  return Pose(rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_, Unchecked{});
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return Pose(rt, -(rt * translation_), Unchecked{});
}

Pose Pose::orthonormalized() const {
  Eigen::JacobiSVD<Mat3> svd(rotation_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return Pose(r, translation_, Unchecked{});
}

double Pose::orthonormality_error() const {
  return (rotation_.transpose() * rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Mat3 axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0 || angle == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis / n).toRotationMatrix();
}

Vec3 rotation_log(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.axis() * aa.angle();
}

Mat3 rotation_exp(const Vec3& w) { return axis_angle(w, w.norm()); }

bool is_unit(const Vec3& v, double tol) { return v.allFinite() && std::abs(v.norm() - 1.0) <= tol; }

double angle_between(const Vec3& a, const Vec3& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

void PointCloud::validate() const {
  if (points.size() != normals.size()) throw InvalidInput("point cloud has mismatched points/normals");
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!finite(points[i])) throw InvalidInput("point cloud has a non-finite point");
    if (!is_unit(normals[i], 1e-6)) throw InvalidInput("point cloud normal " + std::to_string(i) + " is not unit length");
  }
}

Vec3 transform_point(const Pose& t, const Vec3& point) { return t.apply(point); }
Vec3 transform_direction(const Pose& t, const Vec3& direction) { return t.rotate(direction); }
Pose transform(const Pose& t, const Pose& pose) { return t * pose; }

PointCloud transform(const Pose& t, const PointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.size());
  out.normals.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
  for (const auto& n : cloud.normals) out.normals.push_back(t.rotate(n));
  return out;
}

void RigidBodyModel::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidModel("mass must be positive");
  if (!com.allFinite() || !inertia.allFinite()) throw InvalidModel("non-finite inertial parameters");
  const double scale = std::max(1e-300, inertia.cwiseAbs().maxCoeff());
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, scale)) {
    throw InvalidModel("inertia is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  const Vec3 moments = eig.eigenvalues();
  if (moments.minCoeff() <= 0.0) throw InvalidModel("inertia is not positive definite");
  const double slack = 1e-9 * moments.maxCoeff();
  if (moments(0) + moments(1) + slack < moments(2)) {
    throw InvalidModel("principal moments violate the triangle inequality");
  }
  if (!(restitution >= 0.0 && restitution <= 1.0)) throw InvalidModel("restitution must lie in [0, 1]");
  if (!(friction >= 0.0) || !std::isfinite(friction)) throw InvalidModel("friction must be non-negative");
}

RigidBodyModel RigidBodyModel::expressed_in(const Pose& pose) const {
  RigidBodyModel out = *this;
  out.com = pose.apply(com);
  out.inertia = pose.rotation() * inertia * pose.rotation().transpose();
  return out;
}

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::box: return "box";
    case Shape::cylinder: return "cylinder";
    case Shape::sphere: return "sphere";
  }
  return "box";
}

Shape shape_from_string(const std::string& name) {
  if (name == "box") return Shape::box;
  if (name == "cylinder") return Shape::cylinder;
  if (name == "sphere") return Shape::sphere;
  throw InvalidModel("unknown primitive shape '" + name + "'");
}

void Primitive::validate() const {
  if (!(density > 0.0) || !std::isfinite(density)) throw InvalidModel("primitive density must be positive");
  const int used = shape == Shape::box ? 3 : (shape == Shape::cylinder ? 2 : 1);
  for (int i = 0; i < used; ++i) {
    if (!(dims(i) > 0.0) || !std::isfinite(dims(i))) throw InvalidModel("primitive dimensions must be positive");
  }
}

double Primitive::volume() const {
  switch (shape) {
    case Shape::box: return dims.x() * dims.y() * dims.z();
    case Shape::cylinder: return kPi * dims.x() * dims.x() * dims.y();
    case Shape::sphere: return 4.0 / 3.0 * kPi * std::pow(dims.x(), 3);
  }
  return 0.0;
}

double Primitive::area() const {
  switch (shape) {
    case Shape::box: return 2.0 * (dims.x() * dims.y() + dims.y() * dims.z() + dims.x() * dims.z());
    case Shape::cylinder: return 2.0 * kPi * dims.x() * (dims.x() + dims.y());
    case Shape::sphere: return 4.0 * kPi * dims.x() * dims.x();
  }
  return 0.0;
}

Mat3 Primitive::local_inertia() const {
  const double m = mass();
  switch (shape) {
    case Shape::box: {
      const double a = dims.x() * dims.x();
      const double b = dims.y() * dims.y();
      const double c = dims.z() * dims.z();
      return Vec3(b + c, a + c, a + b).asDiagonal() * (m / 12.0);
    }
    case Shape::cylinder: {
      const double r2 = dims.x() * dims.x();
      const double h2 = dims.y() * dims.y();
      const double side = m * (3.0 * r2 + h2) / 12.0;
      return Vec3(side, side, 0.5 * m * r2).asDiagonal();
    }
    case Shape::sphere: return Mat3::Identity() * (0.4 * m * dims.x() * dims.x());
  }
  return Mat3::Identity();
}

bool Primitive::contains(const Vec3& point, double margin) const {
  const Vec3 p = pose.inverse().apply(point);
  switch (shape) {
    case Shape::box:
      return std::abs(p.x()) < 0.5 * dims.x() - margin && std::abs(p.y()) < 0.5 * dims.y() - margin &&
             std::abs(p.z()) < 0.5 * dims.z() - margin;
    case Shape::cylinder:
      return std::hypot(p.x(), p.y()) < dims.x() - margin && std::abs(p.z()) < 0.5 * dims.y() - margin;
    case Shape::sphere: return p.norm() < dims.x() - margin;
  }
  return false;
}

void ToolModel::validate() const {
  if (primitives.empty()) throw InvalidModel("tool has no primitives");
  for (const auto& p : primitives) p.validate();
}

RigidBodyModel compose_inertia(const ToolModel& tool) {
  tool.validate();
  RigidBodyModel body;
  double mass = 0.0;
  Vec3 weighted = Vec3::Zero();
  for (const auto& p : tool.primitives) {
    mass += p.mass();
    weighted += p.mass() * p.pose.translation();
  }
  body.mass = mass;
  body.com = weighted / mass;
  Mat3 inertia = Mat3::Zero();
  for (const auto& p : tool.primitives) {
    const Mat3& r = p.pose.rotation();
    const Vec3 d = p.pose.translation() - body.com;
    inertia += r * p.local_inertia() * r.transpose() + p.mass() * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
  }
  body.inertia = 0.5 * (inertia + inertia.transpose());
  return body;
}

namespace {

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
};

SurfaceSample sample_primitive(const Primitive& prim, Rng& rng) {
  Vec3 p;
  Vec3 n;
  switch (prim.shape) {
    case Shape::box: {
      const double ax = prim.dims.y() * prim.dims.z();
      const double ay = prim.dims.x() * prim.dims.z();
      const double az = prim.dims.x() * prim.dims.y();
      const double pick = rng.uniform() * (ax + ay + az);
      const int axis = pick < ax ? 0 : (pick < ax + ay ? 1 : 2);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      for (int i = 0; i < 3; ++i) p(i) = (rng.uniform() - 0.5) * prim.dims(i);
      p(axis) = sign * 0.5 * prim.dims(axis);
      n = Vec3::Zero();
      n(axis) = sign;
      break;
    }
    case Shape::cylinder: {
      const double r = prim.dims.x();
      const double h = prim.dims.y();
      const double side = 2.0 * kPi * r * h;
      const double caps = 2.0 * kPi * r * r;
      if (rng.uniform() * (side + caps) < side) {
        const double phi = 2.0 * kPi * rng.uniform();
        n = Vec3(std::cos(phi), std::sin(phi), 0.0);
        p = r * n;
        p.z() = (rng.uniform() - 0.5) * h;
      } else {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double rho = r * std::sqrt(rng.uniform());
        const double phi = 2.0 * kPi * rng.uniform();
        p = Vec3(rho * std::cos(phi), rho * std::sin(phi), sign * 0.5 * h);
        n = Vec3(0.0, 0.0, sign);
      }
      break;
    }
    case Shape::sphere: {
      const double z = 2.0 * rng.uniform() - 1.0;
      const double phi = 2.0 * kPi * rng.uniform();
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      n = Vec3(s * std::cos(phi), s * std::sin(phi), z);
      p = prim.dims.x() * n;
      break;
    }
  }
  return {prim.pose.apply(p), prim.pose.rotate(n).normalized()};
}

}  // namespace

PointCloud sample_surface(const ToolModel& tool, std::size_t count, std::uint64_t seed) {
  tool.validate();
  if (count == 0) throw InvalidParameter("sample_surface: count must be positive");
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& p : tool.primitives) {
    total += p.area();
    cumulative.push_back(total);
  }
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(count);
  cloud.normals.reserve(count);
  constexpr double kInsideMargin = 1e-9;
  const std::size_t max_attempts = 1000 * count;
  for (std::size_t attempt = 0; cloud.size() < count && attempt < max_attempts; ++attempt) {
    const double pick = rng.uniform() * total;
    std::size_t k = 0;
    while (k + 1 < cumulative.size() && pick >= cumulative[k]) ++k;
    const SurfaceSample s = sample_primitive(tool.primitives[k], rng);
    bool buried = false;
    for (std::size_t j = 0; j < tool.primitives.size() && !buried; ++j) {
      if (j != k && tool.primitives[j].contains(s.point, kInsideMargin)) buried = true;
    }
    if (buried) continue;
    cloud.points.push_back(s.point);
    cloud.normals.push_back(s.normal);
  }
  return cloud;
}

PointCloud read_obj_cloud(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag != "v" && tag != "vn") continue;
    Vec3 x;
    if (!(ss >> x.x() >> x.y() >> x.z())) {
      throw InvalidInput("OBJ line " + std::to_string(line_no) + ": expected three coordinates");
    }
    if (tag == "v") {
      cloud.points.push_back(x);
    } else {
      const double n = x.norm();
      if (!(n > 0.0)) throw InvalidInput("OBJ line " + std::to_string(line_no) + ": zero-length normal");
      cloud.normals.push_back(x / n);
    }
  }
  if (cloud.points.size() != cloud.normals.size()) {
    throw InvalidInput("OBJ cloud needs one normal per vertex (" + std::to_string(cloud.points.size()) + " v, " +
                       std::to_string(cloud.normals.size()) + " vn)");
  }
  cloud.validate();
  return cloud;
}

PointCloud read_obj_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open OBJ file '" + path + "'");
  return read_obj_cloud(in);
}

}  // namespace wrenchgrasp
