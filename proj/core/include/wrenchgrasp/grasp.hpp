#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wrenchgrasp/breakdown.hpp"
#include "wrenchgrasp/spatial.hpp"

namespace wrenchgrasp {

/// Parallel-jaw grasp in the tool body frame. The grasp frame sits at the
/// contact-pair midpoint with its y axis along the closure line.
struct GraspCandidate {
  Pose pose;
  Vec3 closure_axis = Vec3::UnitY();
  Vec3 finger_normal = Vec3::UnitY();
  double jaw_width = 0.0;
  double clamp_force = 40.0;
  std::array<Vec3, 2> contacts{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> contact_normals{Vec3::UnitY(), -Vec3::UnitY()};

  Vec3 origin() const { return pose.translation(); }

  /// Throws InvalidInput when a candidate invariant fails.
  void validate(double jaw_max) const;
};

struct SamplerConfig {
  double jaw_max = 0.085;          // m
  std::size_t count = 100;
  double clamp_force = 40.0;       // N
  double antipodal_deg = 20.0;     // normal-opposition and line-in-cone tolerance
  double min_width = 0.002;        // m
  std::size_t attempts_per_candidate = 50;
};

struct SampleResult {
  std::vector<GraspCandidate> candidates;
  bool ok = true;
  std::string status;  // warning text when no valid pair was found
};

/// Axis-aligned box in the tool frame used to restrict where fingers may land.
struct GraspRegion {
  Vec3 min = Vec3::Constant(-1e9);
  Vec3 max = Vec3::Constant(1e9);

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

PointCloud crop(const PointCloud& cloud, const GraspRegion& region);

/// Draws antipodal pairs from the cloud: normals opposed within the
/// tolerance, pair line inside both contact cones, separation within
/// (min_width, jaw_max]. Deterministic for a fixed seed.
SampleResult sample_antipodal(const PointCloud& cloud, const SamplerConfig& config, std::uint64_t seed);

/// Convenience overload with default tolerances.
SampleResult sample_antipodal(const PointCloud& cloud, double jaw_max, std::size_t count, std::uint64_t seed);

/// Mean normal agreement max(0, n_i . n) over cloud neighbours within `radius`, in [0, 1].
double patch_flatness(const PointCloud& cloud, const Vec3& point, const Vec3& normal, double radius);

/// Mean 1 - n_i . n over neighbours within `radius`; zero on flat patches.
double curvature_proxy(const PointCloud& cloud, const Vec3& point, const Vec3& normal, double radius);

/// Geometry-only quality in [0, 1]: antipodality (1 - n1.n2) / 2 times the
/// mean flatness of the two contact patches. Independent of any trajectory.
double geometry_score(const GraspCandidate& g, const PointCloud& cloud, double patch_radius = 0.01);

struct Selection {
  std::size_t index = 0;
  GraspCandidate candidate;
  CostBreakdown breakdown;
};

using CandidateScorer = std::function<CostBreakdown(const GraspCandidate&, std::size_t index)>;

/// Argmin of total cost; ties go to lower c_tau, then lower index.
/// Throws NoCandidate for an empty list.
Selection select_grasp(std::span<const GraspCandidate> candidates, const CandidateScorer& scorer);

/// Same rule over precomputed breakdowns.
std::size_t argmin_cost(std::span<const CostBreakdown> costs);

/// FNV-1a digest of every candidate field; equal sets give equal hashes.
std::uint64_t candidate_set_hash(std::span<const GraspCandidate> candidates);

}  // namespace wrenchgrasp
