#pragma once

// LiDAR-only corruptions. Every function is pure: (cloud, severity, seed) -> cloud.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "r3bench/core/rng.hpp"
#include "r3bench/core/types.hpp"

namespace r3bench {

struct FovRange {
  double lo_deg;
  double hi_deg;
};

struct LidarCorruptionParams {
  std::array<double, 3> gaussian_sigma_m{0.02, 0.06, 0.10};
  std::size_t cutout_groups = 50;
  std::array<std::size_t, 3> cutout_drop{2, 5, 10};
  std::array<double, 3> crosstalk_ratio{0.004, 0.012, 0.02};
  double crosstalk_sigma_m = 3.0;
  std::array<double, 3> density_drop_fraction{0.06, 0.18, 0.30};
  // Retained field of view, widest at S1.
  std::array<FovRange, 3> fov_kept_range_deg{{{-105.0, 105.0}, {-75.0, 75.0}, {-45.0, 45.0}}};

  // Recognized override names: "sigma" (lidar_gaussian), "groups", "drop"
  // (cutout), "ratio", "sigma" (crosstalk), "fraction" (density_decrease),
  // "half_range_deg" (fov_loss). Overrides replace the value at spec.severity.
  static LidarCorruptionParams from_spec(const CorruptionSpec& spec) {
    LidarCorruptionParams p;
    const std::size_t i = severity_index(spec.severity);
    switch (spec.kind) {
      case CorruptionKind::LidarGaussian:
        if (auto v = spec.override_for("sigma")) p.gaussian_sigma_m[i] = *v;
        break;
      case CorruptionKind::Cutout:
        if (auto v = spec.override_for("groups")) p.cutout_groups = static_cast<std::size_t>(*v);
        if (auto v = spec.override_for("drop")) p.cutout_drop[i] = static_cast<std::size_t>(*v);
        break;
      case CorruptionKind::Crosstalk:
        if (auto v = spec.override_for("ratio")) p.crosstalk_ratio[i] = *v;
        if (auto v = spec.override_for("sigma")) p.crosstalk_sigma_m = *v;
        break;
      case CorruptionKind::DensityDecrease:
        if (auto v = spec.override_for("fraction")) p.density_drop_fraction[i] = *v;
        break;
      case CorruptionKind::FovLoss:
        if (auto v = spec.override_for("half_range_deg")) p.fov_kept_range_deg[i] = {-*v, *v};
        break;
      default:
        break;
    }
    return p;
  }
};

inline PointCloud lidar_gaussian(const PointCloud& cloud, Severity severity, std::uint64_t seed,
                                 const LidarCorruptionParams& params = {}) {
  const double sigma = params.gaussian_sigma_m[severity_index(severity)];
  Rng rng(seed);
  PointCloud out = cloud;
  for (Point3& p : out.points) {
    p.x += rng.normal(sigma);
    p.y += rng.normal(sigma);
    p.z += rng.normal(sigma);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cutout

// Group layout for one cutout application: which cloud points act as group
// centers, and which groups (indices into `centers`) get removed.
struct CutoutPlan {
  std::vector<std::size_t> centers;
  std::vector<std::size_t> dropped_groups;
};

/// Draws the group centers uniformly from the cloud, then the dropped groups.
/// Clouds smaller than the group count use every point as its own center.
inline CutoutPlan plan_cutout(std::size_t n_points, Severity severity, std::uint64_t seed,
                              const LidarCorruptionParams& params = {}) {
  Rng rng(seed);
  CutoutPlan plan;
  if (n_points < params.cutout_groups) {
    plan.centers.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) plan.centers[i] = i;
  } else {
    plan.centers = sample_without_replacement(rng, n_points, params.cutout_groups);
  }
  const std::size_t drop = params.cutout_drop[severity_index(severity)];
  plan.dropped_groups = sample_without_replacement(rng, plan.centers.size(), drop);
  return plan;
}

/// Nearest-center assignment; ties go to the lower center index.
inline std::vector<std::size_t> assign_groups(const PointCloud& cloud,
                                              std::span<const std::size_t> centers) {
  std::vector<std::size_t> group(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < centers.size(); ++g) {
      const Point3& c = cloud.points[centers[g]];
      const double dx = p.x - c.x, dy = p.y - c.y, dz = p.z - c.z;
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < best) {
        best = d2;
        group[i] = g;
      }
    }
  }
  return group;
}

inline PointCloud apply_cutout_plan(const PointCloud& cloud, const CutoutPlan& plan) {
  const auto group = assign_groups(cloud, plan.centers);
  std::vector<bool> dropped(plan.centers.size(), false);
  for (std::size_t g : plan.dropped_groups) dropped[g] = true;

  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.has_intensity = cloud.has_intensity;
  out.points.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!dropped[group[i]]) out.points.push_back(cloud.points[i]);
  }
  return out;
}

inline PointCloud cutout(const PointCloud& cloud, Severity severity, std::uint64_t seed,
                         const LidarCorruptionParams& params = {}) {
  return apply_cutout_plan(cloud, plan_cutout(cloud.size(), severity, seed, params));
}

// ---------------------------------------------------------------------------

inline PointCloud crosstalk(const PointCloud& cloud, Severity severity, std::uint64_t seed,
                            const LidarCorruptionParams& params = {}) {
  const std::size_t n_noisy =
      round_count(params.crosstalk_ratio[severity_index(severity)], cloud.size());
  Rng rng(seed);
  // Ascending index order so the noise draw sequence does not depend on the
  // shuffle order.
  const auto mask = random_mask(rng, cloud.size(), n_noisy);
  PointCloud out = cloud;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask[i]) continue;
    Point3& p = out.points[i];
    p.x += rng.normal(params.crosstalk_sigma_m);
    p.y += rng.normal(params.crosstalk_sigma_m);
    p.z += rng.normal(params.crosstalk_sigma_m);
  }
  return out;
}

inline PointCloud density_decrease(const PointCloud& cloud, Severity severity, std::uint64_t seed,
                                   const LidarCorruptionParams& params = {}) {
  const std::size_t n_drop =
      round_count(params.density_drop_fraction[severity_index(severity)], cloud.size());
  Rng rng(seed);
  const auto mask = random_mask(rng, cloud.size(), n_drop);
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.has_intensity = cloud.has_intensity;
  out.points.reserve(cloud.size() - n_drop);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!mask[i]) out.points.push_back(cloud.points[i]);
  }
  return out;
}

// Azimuth comparisons absorb this much floating-point slack so that points
// placed exactly on a range boundary are kept.
inline constexpr double kAzimuthToleranceDeg = 1e-9;

inline double azimuth_deg(const Point3& p) {
  return std::atan2(p.y, p.x) * (180.0 / std::numbers::pi);
}

inline bool in_fov(const Point3& p, const FovRange& range) {
  const double az = azimuth_deg(p);
  return az >= range.lo_deg - kAzimuthToleranceDeg && az <= range.hi_deg + kAzimuthToleranceDeg;
}

inline PointCloud fov_loss(const PointCloud& cloud, Severity severity,
                           const LidarCorruptionParams& params = {}) {
  const FovRange range = params.fov_kept_range_deg[severity_index(severity)];
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.has_intensity = cloud.has_intensity;
  for (const Point3& p : cloud.points) {
    if (in_fov(p, range)) out.points.push_back(p);
  }
  return out;
}

}  // namespace r3bench
