#include "wrenchgrasp/grasp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/random.hpp"

namespace wrenchgrasp {

void CostWeights::validate() const {
  if (!(w_tau >= 0.0) || !(w_s >= 0.0) || !(w_alpha >= 0.0)) {
    throw InvalidParameter("cost weights must be non-negative");
  }
  if (w_tau + w_s + w_alpha <= 0.0) throw InvalidParameter("at least one cost weight must be positive");
}

double total_cost(double c_tau, double c_slip, double c_align, const CostWeights& w) {
  return w.w_tau * c_tau + w.w_s * c_slip + w.w_alpha * c_align;
}

CostBreakdown weighted(CostBreakdown b, const CostWeights& w) {
  b.total = total_cost(b.c_tau, b.c_slip, b.c_align, w);
  return b;
}

void GraspCandidate::validate(double jaw_max) const {
  if (!is_unit(closure_axis, 1e-6)) throw InvalidInput("closure axis is not unit length");
  if (!is_unit(finger_normal, 1e-6)) throw InvalidInput("finger normal is not unit length");
  // The pad normal of a parallel jaw lies on the closure line.
  if (std::abs(std::abs(closure_axis.dot(finger_normal)) - 1.0) > 1e-6) {
    throw InvalidInput("finger normal must lie along the closure axis");
  }
  if (!(jaw_width > 0.0) || jaw_width > jaw_max + 1e-12) throw InvalidInput("jaw width outside (0, jaw_max]");
  if (!(clamp_force > 0.0)) throw InvalidInput("clamp force must be positive");
  if ((contacts[1] - contacts[0]).norm() > jaw_width + 1e-12) {
    throw InvalidInput("contact separation exceeds jaw width");
  }
}

PointCloud crop(const PointCloud& cloud, const GraspRegion& region) {
  PointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!region.contains(cloud.points[i])) continue;
    out.points.push_back(cloud.points[i]);
    out.normals.push_back(cloud.normals[i]);
  }
  return out;
}

namespace {

// Grasp frame: y along the closure line, z a fixed approach direction
// orthogonal to it, origin at the pair midpoint.
Pose grasp_frame(const Vec3& center, const Vec3& closure) {
  Vec3 ref = Vec3::UnitZ();
  if (std::abs(closure.dot(ref)) > 0.9) ref = Vec3::UnitX();
  const Vec3 z = reject(ref, closure).normalized();
  const Vec3 x = closure.cross(z);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = closure;
  r.col(2) = z;
  return Pose(r, center);
}

}  // namespace

SampleResult sample_antipodal(const PointCloud& cloud, const SamplerConfig& config, std::uint64_t seed) {
  if (cloud.empty()) throw InvalidInput("point cloud is empty");
  if (config.count == 0) throw InvalidParameter("candidate count must be positive");
  if (!(config.jaw_max > 0.0)) throw InvalidParameter("jaw_max must be positive");
  cloud.validate();

  const double cos_tol = std::cos(config.antipodal_deg * std::numbers::pi / 180.0);
  Rng rng(seed);
  SampleResult result;
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::vector<std::size_t> valid;
  const std::size_t max_attempts = config.count * config.attempts_per_candidate;

  for (std::size_t attempt = 0; attempt < max_attempts && result.candidates.size() < config.count; ++attempt) {
    const std::size_t i = rng.index(cloud.size());
    const Vec3& p1 = cloud.points[i];
    const Vec3& n1 = cloud.normals[i];
    valid.clear();
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (j == i) continue;
      const Vec3 d = cloud.points[j] - p1;
      const double sep = d.norm();
      if (sep <= config.min_width || sep > config.jaw_max) continue;
      const Vec3& n2 = cloud.normals[j];
      if (n1.dot(n2) > -cos_tol) continue;
      const Vec3 u = d / sep;
      if (-u.dot(n1) < cos_tol || u.dot(n2) < cos_tol) continue;
      valid.push_back(j);
    }
    if (valid.empty()) continue;
    const std::size_t j = valid[rng.index(valid.size())];
    if (!used.insert({std::min(i, j), std::max(i, j)}).second) continue;

    const Vec3& p2 = cloud.points[j];
    const Vec3 closure = (p2 - p1).normalized();
    GraspCandidate g;
    g.pose = grasp_frame(0.5 * (p1 + p2), closure);
    g.closure_axis = closure;
    g.finger_normal = closure;
    g.jaw_width = (p2 - p1).norm();
    g.clamp_force = config.clamp_force;
    g.contacts = {p1, p2};
    g.contact_normals = {n1, cloud.normals[j]};
    result.candidates.push_back(std::move(g));
  }

  if (result.candidates.empty()) {
    result.ok = false;
    result.status = "no antipodal pair found within jaw_max";
  } else if (result.candidates.size() < config.count) {
    result.status = "found " + std::to_string(result.candidates.size()) + " of " +
                    std::to_string(config.count) + " requested candidates";
  }
  return result;
}

SampleResult sample_antipodal(const PointCloud& cloud, double jaw_max, std::size_t count, std::uint64_t seed) {
  SamplerConfig config;
  config.jaw_max = jaw_max;
  config.count = count;
  return sample_antipodal(cloud, config, seed);
}

namespace {

template <typename F>
double neighbour_mean(const PointCloud& cloud, const Vec3& point, double radius, double empty_value, F term) {
  const double r2 = radius * radius;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if ((cloud.points[i] - point).squaredNorm() > r2) continue;
    sum += term(cloud.normals[i]);
    ++n;
  }
  return n == 0 ? empty_value : sum / static_cast<double>(n);
}

}  // namespace

double patch_flatness(const PointCloud& cloud, const Vec3& point, const Vec3& normal, double radius) {
  return neighbour_mean(cloud, point, radius, 1.0,
                        [&](const Vec3& ni) { return std::max(0.0, ni.dot(normal)); });
}

double curvature_proxy(const PointCloud& cloud, const Vec3& point, const Vec3& normal, double radius) {
  return neighbour_mean(cloud, point, radius, 0.0, [&](const Vec3& ni) { return 1.0 - ni.dot(normal); });
}

double geometry_score(const GraspCandidate& g, const PointCloud& cloud, double patch_radius) {
  const Vec3& n1 = g.contact_normals[0];
  const Vec3& n2 = g.contact_normals[1];
  const double antipodal = std::clamp(0.5 * (1.0 - n1.dot(n2)), 0.0, 1.0);
  const double flat = 0.5 * (patch_flatness(cloud, g.contacts[0], n1, patch_radius) +
                             patch_flatness(cloud, g.contacts[1], n2, patch_radius));
  return std::clamp(antipodal * flat, 0.0, 1.0);
}

std::size_t argmin_cost(std::span<const CostBreakdown> costs) {
  if (costs.empty()) throw NoCandidate("no grasp candidates to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    const auto& c = costs[i];
    const auto& b = costs[best];
    if (c.total < b.total || (c.total == b.total && c.c_tau < b.c_tau)) best = i;
  }
  return best;
}

Selection select_grasp(std::span<const GraspCandidate> candidates, const CandidateScorer& scorer) {
  if (candidates.empty()) throw NoCandidate("no grasp candidates to select from");
  std::vector<CostBreakdown> costs;
  costs.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) costs.push_back(scorer(candidates[i], i));
  const std::size_t best = argmin_cost(costs);
  return {best, candidates[best], costs[best]};
}

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void byte(unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  void word(std::uint64_t w) {
    for (int k = 0; k < 8; ++k) byte(static_cast<unsigned char>(w >> (8 * k)));
  }
  void real(double x) { word(std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x)); }
  void vec(const Vec3& v) {
    for (int k = 0; k < 3; ++k) real(v[k]);
  }
};

}  // namespace

std::uint64_t candidate_set_hash(std::span<const GraspCandidate> candidates) {
  Fnv f;
  f.word(candidates.size());
  for (const auto& g : candidates) {
    const Mat3& r = g.pose.rotation();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f.real(r(i, j));
    f.vec(g.pose.translation());
    f.vec(g.closure_axis);
    f.vec(g.finger_normal);
    f.real(g.jaw_width);
    f.real(g.clamp_force);
    for (int k = 0; k < 2; ++k) {
      f.vec(g.contacts[k]);
      f.vec(g.contact_normals[k]);
    }
  }
  return f.h;
}

}  // namespace wrenchgrasp
