#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "r3bench/camera_corrupt.hpp"
#include "r3bench/core/seed.hpp"
#include "r3bench/core/types.hpp"
#include "r3bench/lidar_corrupt.hpp"
#include "r3bench/misalign.hpp"

namespace r3bench {

/// Seed for one camera (or calibration) within a frame: mix64(frame_seed ^ fnv1a64(camera_id)).
inline std::uint64_t derive_camera_seed(std::uint64_t frame_seed, const std::string& camera_id) {
  return mix64(frame_seed ^ fnv1a64(camera_id));
}

// Applies `spec` to frame `index` of `seq`. The corruption seed comes from
// derive_frame_seed(policy, frame_id, spec); per-camera kernels further mix
// in the camera id.
inline FrameSample corrupt_frame(std::span<const FrameSample> seq, std::int64_t index,
                                 const CorruptionSpec& spec, const SeedPolicy& policy) {
  detail::check_index(seq, index);
  const FrameSample& src = seq[static_cast<std::size_t>(index)];
  const std::uint64_t seed = derive_frame_seed(policy, src.frame_id, spec);

  switch (modality(spec.kind)) {
    case Modality::Lidar: {
      const auto params = LidarCorruptionParams::from_spec(spec);
      FrameSample out = src;
      switch (spec.kind) {
        case CorruptionKind::LidarGaussian:
          out.cloud = lidar_gaussian(src.cloud, spec.severity, seed, params);
          break;
        case CorruptionKind::Cutout: out.cloud = cutout(src.cloud, spec.severity, seed, params); break;
        case CorruptionKind::Crosstalk:
          out.cloud = crosstalk(src.cloud, spec.severity, seed, params);
          break;
        case CorruptionKind::DensityDecrease:
          out.cloud = density_decrease(src.cloud, spec.severity, seed, params);
          break;
        case CorruptionKind::FovLoss: out.cloud = fov_loss(src.cloud, spec.severity, params); break;
        default: break;
      }
      return out;
    }
    case Modality::Camera: {
      const auto params = CameraCorruptionParams::from_spec(spec);
      FrameSample out = src;
      for (CameraImage& img : out.images) {
        switch (spec.kind) {
          case CorruptionKind::CameraGaussian:
            img = camera_gaussian(img, spec.severity, derive_camera_seed(seed, img.camera_id), params);
            break;
          case CorruptionKind::Fog: img = fog(img, spec.severity, params); break;
          case CorruptionKind::Sunlight: img = sunlight(img, spec.severity, params); break;
          default: break;
        }
      }
      return out;
    }
    case Modality::CrossModal: {
      const auto params = MisalignParams::from_spec(spec);
      if (spec.kind == CorruptionKind::TemporalMisalignCamera) {
        return temporal_misalign_camera(seq, index, spec.severity, params);
      }
      if (spec.kind == CorruptionKind::TemporalMisalignLidar) {
        return temporal_misalign_lidar(seq, index, spec.severity, params);
      }
      FrameSample out = src;
      for (Calibration& c : out.calibrations) {
        c = spatial_misalign(c, spec.severity, derive_camera_seed(seed, c.camera_id), params);
      }
      return out;
    }
  }
  return src;
}

inline Sequence corrupt_sequence(std::span<const FrameSample> seq, const CorruptionSpec& spec,
                                 const SeedPolicy& policy) {
  Sequence out;
  out.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.push_back(corrupt_frame(seq, static_cast<std::int64_t>(i), spec, policy));
  }
  return out;
}

/// Every kind at every severity, in enumeration order.
inline std::vector<CorruptionSpec> full_grid() {
  std::vector<CorruptionSpec> grid;
  for (CorruptionKind k : kAllCorruptions) {
    for (Severity s : kAllSeverities) grid.push_back({k, s, {}});
  }
  return grid;
}

inline std::vector<CorruptionSpec> grid_for(Modality m) {
  std::vector<CorruptionSpec> grid;
  for (const auto& spec : full_grid()) {
    if (modality(spec.kind) == m) grid.push_back(spec);
  }
  return grid;
}

}  // namespace r3bench
