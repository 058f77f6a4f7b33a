#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace r3bench {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;  // meaningful only when the owning cloud has_intensity

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PointCloud {
  std::vector<Point3> points;
  std::string frame_id;
  bool has_intensity = false;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

// Row-major H x W x 3 raster, intensities normalized to [0,1].
struct CameraImage {
  static constexpr int kChannels = 3;

  int width = 0;
  int height = 0;
  std::vector<double> pixels;
  std::string camera_id;

  CameraImage() = default;
  CameraImage(int w, int h, std::string id, double fill = 0.0)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * kChannels, fill),
        camera_id(std::move(id)) {}

  std::size_t index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(col)) * kChannels + static_cast<std::size_t>(channel);
  }
  double& at(int row, int col, int channel) { return pixels[index(row, col, channel)]; }
  double at(int row, int col, int channel) const { return pixels[index(row, col, channel)]; }

  friend bool operator==(const CameraImage&, const CameraImage&) = default;
};

// Camera-from-LiDAR extrinsics. Rotation is row-major.
struct Calibration {
  std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 3> translation{0, 0, 0};
  std::string camera_id;

  friend bool operator==(const Calibration&, const Calibration&) = default;
};

/// Maps any finite angle into (-pi, pi].
inline double normalize_yaw(double yaw) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (yaw > -kPi && yaw <= kPi) return yaw;
  double r = std::fmod(yaw + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

// Oriented cuboid. Yaw is counter-clockwise from +x; l spans the local x-axis,
// w the local y-axis and h the global z-axis.
struct Box3D {
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double l = 1.0, w = 1.0, h = 1.0;
  double yaw = 0.0;

  double volume() const { return l * w * h; }
  double horizontal_range() const { return std::hypot(cx, cy); }

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

enum class Occlusion { FullyVisible, MostlyVisible, SeverelyOccluded, FullyOccluded };

inline constexpr std::array<Occlusion, 4> kAllOcclusions{
    Occlusion::FullyVisible, Occlusion::MostlyVisible, Occlusion::SeverelyOccluded,
    Occlusion::FullyOccluded};

inline std::string_view to_string(Occlusion o) {
  switch (o) {
    case Occlusion::FullyVisible: return "fully_visible";
    case Occlusion::MostlyVisible: return "mostly_visible";
    case Occlusion::SeverelyOccluded: return "severely_occluded";
    case Occlusion::FullyOccluded: return "fully_occluded";
  }
  return "?";
}

// Strict: exact lower-case spelling only.
inline std::optional<Occlusion> parse_occlusion(std::string_view s) {
  for (Occlusion o : kAllOcclusions) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

struct GroundTruth {
  Box3D box;
  Occlusion occlusion = Occlusion::FullyVisible;
  std::string track_id;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Detection {
  Box3D box;
  double score = 0.0;
  std::string frame_id;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct FrameSample {
  std::string frame_id;
  std::string sequence_id;
  std::int64_t index_in_sequence = 0;
  PointCloud cloud;
  std::vector<CameraImage> images;
  std::vector<Calibration> calibrations;
  std::vector<GroundTruth> ground_truth;

  friend bool operator==(const FrameSample&, const FrameSample&) = default;
};

using Sequence = std::vector<FrameSample>;

enum class Severity : int { S1 = 1, S2 = 2, S3 = 3 };

inline constexpr std::array<Severity, 3> kAllSeverities{Severity::S1, Severity::S2,
                                                        Severity::S3};

inline int level(Severity s) { return static_cast<int>(s); }

/// Zero-based index for per-severity parameter tables.
inline std::size_t severity_index(Severity s) { return static_cast<std::size_t>(level(s) - 1); }

inline std::optional<Severity> severity_from_level(int lvl) {
  if (lvl < 1 || lvl > 3) return std::nullopt;
  return static_cast<Severity>(lvl);
}

enum class CorruptionKind : int {
  LidarGaussian = 0,
  Cutout,
  Crosstalk,
  DensityDecrease,
  FovLoss,
  CameraGaussian,
  Fog,
  Sunlight,
  SpatialMisalign,
  TemporalMisalignCamera,
  TemporalMisalignLidar,
};

inline constexpr std::array<CorruptionKind, 11> kAllCorruptions{
    CorruptionKind::LidarGaussian,          CorruptionKind::Cutout,
    CorruptionKind::Crosstalk,              CorruptionKind::DensityDecrease,
    CorruptionKind::FovLoss,                CorruptionKind::CameraGaussian,
    CorruptionKind::Fog,                    CorruptionKind::Sunlight,
    CorruptionKind::SpatialMisalign,        CorruptionKind::TemporalMisalignCamera,
    CorruptionKind::TemporalMisalignLidar,
};

inline std::string_view to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::LidarGaussian: return "lidar_gaussian";
    case CorruptionKind::Cutout: return "cutout";
    case CorruptionKind::Crosstalk: return "crosstalk";
    case CorruptionKind::DensityDecrease: return "density_decrease";
    case CorruptionKind::FovLoss: return "fov_loss";
    case CorruptionKind::CameraGaussian: return "camera_gaussian";
    case CorruptionKind::Fog: return "fog";
    case CorruptionKind::Sunlight: return "sunlight";
    case CorruptionKind::SpatialMisalign: return "spatial_misalign";
    case CorruptionKind::TemporalMisalignCamera: return "temporal_misalign_camera";
    case CorruptionKind::TemporalMisalignLidar: return "temporal_misalign_lidar";
  }
  return "?";
}

inline std::optional<CorruptionKind> parse_corruption_kind(std::string_view s) {
  for (CorruptionKind k : kAllCorruptions) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

enum class Modality { Lidar, Camera, CrossModal };

inline Modality modality(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::LidarGaussian:
    case CorruptionKind::Cutout:
    case CorruptionKind::Crosstalk:
    case CorruptionKind::DensityDecrease:
    case CorruptionKind::FovLoss: return Modality::Lidar;
    case CorruptionKind::CameraGaussian:
    case CorruptionKind::Fog:
    case CorruptionKind::Sunlight: return Modality::Camera;
    default: return Modality::CrossModal;
  }
}

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::LidarGaussian;
  Severity severity = Severity::S1;
  // Named parameter overrides; absent names resolve to the per-module defaults.
  std::map<std::string, double> overrides;

  std::optional<double> override_for(const std::string& name) const {
    auto it = overrides.find(name);
    if (it == overrides.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const CorruptionSpec&, const CorruptionSpec&) = default;
};

struct SeedPolicy {
  std::uint64_t global_seed = 0;
};

// Round half away from zero; used by every exact-count contract.
inline std::size_t round_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::round(fraction * static_cast<double>(n)));
}

}  // namespace r3bench
