#pragma once

// Flat-array entry points for foreign-language bindings.
//
// Layout contract (all row-major, no reordering):
//   points        N x 3 (x, y, z) or N x 4 (x, y, z, intensity), binary32
//   image         H x W x 3, binary32, values in [0, 1]
//   boxes         M x 7 (cx, cy, cz, l, w, h, yaw), binary64
//   scores        M, binary64
//   occlusion     M, int32 Occlusion enumerator values 0..3
//
// Each corruption call takes the kernel seed directly; pass
// derive_frame_seed(policy, frame_id, spec) to reproduce corrupt_frame output.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "r3bench/camera_corrupt.hpp"
#include "r3bench/core/types.hpp"
#include "r3bench/corruption.hpp"
#include "r3bench/evaluation.hpp"
#include "r3bench/lidar_corrupt.hpp"
#include "r3bench/misalign.hpp"

namespace r3bench::array_api {

struct PointArray {
  std::vector<float> data;
  std::size_t columns = 3;

  std::size_t rows() const { return columns == 0 ? 0 : data.size() / columns; }
};

inline PointCloud to_cloud(std::span<const float> data, std::size_t columns) {
  if (columns != 3 && columns != 4) {
    throw std::invalid_argument("point array must have 3 or 4 columns, got " + std::to_string(columns));
  }
  if (data.size() % columns != 0) {
    throw std::invalid_argument("point array length " + std::to_string(data.size()) + " is not a multiple of " +
                                std::to_string(columns));
  }
  PointCloud cloud;
  cloud.has_intensity = columns == 4;
  cloud.points.resize(data.size() / columns);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const float* row = data.data() + i * columns;
    cloud.points[i] = {row[0], row[1], row[2], columns == 4 ? static_cast<double>(row[3]) : 0.0};
  }
  return cloud;
}

inline PointArray from_cloud(const PointCloud& cloud) {
  PointArray out;
  out.columns = cloud.has_intensity ? 4 : 3;
  out.data.reserve(cloud.size() * out.columns);
  for (const Point3& p : cloud.points) {
    out.data.push_back(static_cast<float>(p.x));
    out.data.push_back(static_cast<float>(p.y));
    out.data.push_back(static_cast<float>(p.z));
    if (cloud.has_intensity) out.data.push_back(static_cast<float>(p.intensity));
  }
  return out;
}

/// LiDAR corruptions on an N x 3/4 array.
inline PointArray corrupt_points(std::span<const float> data, std::size_t columns, const CorruptionSpec& spec,
                                 std::uint64_t seed) {
  if (modality(spec.kind) != Modality::Lidar) {
    throw std::invalid_argument(std::string(to_string(spec.kind)) + " is not a point-cloud corruption");
  }
  const PointCloud in = to_cloud(data, columns);
  const auto params = LidarCorruptionParams::from_spec(spec);
  switch (spec.kind) {
    case CorruptionKind::LidarGaussian: return from_cloud(lidar_gaussian(in, spec.severity, seed, params));
    case CorruptionKind::Cutout: return from_cloud(cutout(in, spec.severity, seed, params));
    case CorruptionKind::Crosstalk: return from_cloud(crosstalk(in, spec.severity, seed, params));
    case CorruptionKind::DensityDecrease: return from_cloud(density_decrease(in, spec.severity, seed, params));
    default: return from_cloud(fov_loss(in, spec.severity, params));
  }
}

/// Camera corruptions on an H x W x 3 array.
inline std::vector<float> corrupt_image(std::span<const float> data, int height, int width,
                                        const CorruptionSpec& spec, std::uint64_t seed) {
  if (modality(spec.kind) != Modality::Camera) {
    throw std::invalid_argument(std::string(to_string(spec.kind)) + " is not an image corruption");
  }
  if (height <= 0 || width <= 0 ||
      data.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * 3) {
    throw std::invalid_argument("image array must be H x W x 3 with positive H, W");
  }
  CameraImage img(width, height, "bound");
  for (std::size_t i = 0; i < data.size(); ++i) img.pixels[i] = data[i];
  const auto params = CameraCorruptionParams::from_spec(spec);
  CameraImage out;
  switch (spec.kind) {
    case CorruptionKind::CameraGaussian: out = camera_gaussian(img, spec.severity, seed, params); break;
    case CorruptionKind::Fog: out = fog(img, spec.severity, params); break;
    default: out = sunlight(img, spec.severity, params); break;
  }
  return {out.pixels.begin(), out.pixels.end()};
}

/// Spatial misalignment of a (3x3 rotation, 3-vector translation) pair.
inline Calibration corrupt_calibration(std::span<const double, 9> rotation, std::span<const double, 3> translation,
                                       const CorruptionSpec& spec, std::uint64_t seed) {
  if (spec.kind != CorruptionKind::SpatialMisalign) {
    throw std::invalid_argument(std::string(to_string(spec.kind)) + " is not a calibration corruption");
  }
  Calibration c;
  std::copy(rotation.begin(), rotation.end(), c.rotation.begin());
  std::copy(translation.begin(), translation.end(), c.translation.begin());
  return spatial_misalign(c, spec.severity, seed, MisalignParams::from_spec(spec));
}

/// For temporal misalignment: which frame supplies the delayed modality.
inline std::size_t temporal_source_index(const CorruptionSpec& spec, std::size_t index) {
  if (spec.kind != CorruptionKind::TemporalMisalignCamera && spec.kind != CorruptionKind::TemporalMisalignLidar) {
    throw std::invalid_argument(std::string(to_string(spec.kind)) + " is not a temporal corruption");
  }
  return delayed_index(index, MisalignParams::from_spec(spec).frame_offset[severity_index(spec.severity)]);
}

inline std::vector<Box3D> to_boxes(std::span<const double> data) {
  if (data.size() % 7 != 0) throw std::invalid_argument("box array must be M x 7");
  std::vector<Box3D> out(data.size() / 7);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* r = data.data() + i * 7;
    out[i] = {r[0], r[1], r[2], r[3], r[4], r[5], normalize_yaw(r[6])};
    if (!(out[i].l > 0 && out[i].w > 0 && out[i].h > 0)) {
      throw std::invalid_argument("box " + std::to_string(i) + " has non-positive dimensions");
    }
  }
  return out;
}

struct ArrayFrame {
  std::span<const double> gt_boxes;
  std::span<const std::int32_t> occlusion;
  std::span<const float> cloud;
  std::size_t cloud_columns = 3;
  std::span<const double> det_boxes;
  std::span<const double> scores;
};

inline std::vector<StratumResult> evaluate(std::span<const ArrayFrame> frames, const EvalConfig& cfg,
                                           StrataMode mode) {
  std::vector<FrameSample> samples;
  std::vector<std::vector<Detection>> dets;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const ArrayFrame& a = frames[i];
    FrameSample f;
    f.frame_id = std::to_string(i);
    f.cloud = to_cloud(a.cloud, a.cloud_columns);
    const auto gts = to_boxes(a.gt_boxes);
    if (a.occlusion.size() != gts.size()) throw std::invalid_argument("occlusion labels must match gt boxes");
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (a.occlusion[g] < 0 || a.occlusion[g] > 3) throw std::invalid_argument("occlusion label out of range");
      f.ground_truth.push_back({gts[g], static_cast<Occlusion>(a.occlusion[g]), std::to_string(g)});
    }
    const auto boxes = to_boxes(a.det_boxes);
    if (a.scores.size() != boxes.size()) throw std::invalid_argument("scores must match detection boxes");
    std::vector<Detection> fd;
    for (std::size_t d = 0; d < boxes.size(); ++d) {
      if (!(a.scores[d] >= 0.0 && a.scores[d] <= 1.0)) throw std::invalid_argument("scores must lie in [0,1]");
      fd.push_back({boxes[d], a.scores[d], f.frame_id});
    }
    samples.push_back(std::move(f));
    dets.push_back(std::move(fd));
  }
  return stratify(std::span<const FrameSample>(samples), std::span<const std::vector<Detection>>(dets), cfg, mode);
}

}  // namespace r3bench::array_api
