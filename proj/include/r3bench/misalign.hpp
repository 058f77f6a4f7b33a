#pragma once

// Cross-sensor corruptions: noisy extrinsics and stale-modality frames.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "r3bench/core/rng.hpp"
#include "r3bench/core/types.hpp"

namespace r3bench {

struct MisalignParams {
  std::array<double, 3> rotation_sigma{0.02, 0.06, 0.10};
  std::array<double, 3> translation_sigma_m{0.002, 0.006, 0.010};
  std::array<std::int64_t, 3> frame_offset{2, 6, 10};

  // Override names: "rotation_sigma", "translation_sigma" (spatial),
  // "offset" (both temporal variants).
  static MisalignParams from_spec(const CorruptionSpec& spec) {
    MisalignParams p;
    const std::size_t i = severity_index(spec.severity);
    if (auto v = spec.override_for("rotation_sigma")) p.rotation_sigma[i] = *v;
    if (auto v = spec.override_for("translation_sigma")) p.translation_sigma_m[i] = *v;
    if (auto v = spec.override_for("offset")) p.frame_offset[i] = static_cast<std::int64_t>(*v);
    return p;
  }
};

class InvalidFrameReference : public std::out_of_range {
 public:
  InvalidFrameReference(std::int64_t index, std::size_t length)
      : std::out_of_range("frame index " + std::to_string(index) +
                          " outside sequence of length " + std::to_string(length)) {}
};

// Entry-wise additive noise on R (row-major, 9 draws) then t (3 draws).
// The rotation is intentionally left non-orthonormal.
inline Calibration spatial_misalign(const Calibration& calib, Severity severity, std::uint64_t seed,
                                    const MisalignParams& params = {}) {
  const std::size_t i = severity_index(severity);
  Rng rng(seed);
  Calibration out = calib;
  for (double& r : out.rotation) r += rng.normal(params.rotation_sigma[i]);
  for (double& t : out.translation) t += rng.normal(params.translation_sigma_m[i]);
  return out;
}

/// Index of the stale frame paired with frame `index`: max(0, index - offset).
inline std::size_t delayed_index(std::size_t index, std::int64_t offset) {
  const auto delayed = static_cast<std::int64_t>(index) - offset;
  return static_cast<std::size_t>(std::max<std::int64_t>(0, delayed));
}

namespace detail {
inline void check_index(std::span<const FrameSample> seq, std::int64_t index) {
  if (index < 0 || static_cast<std::size_t>(index) >= seq.size()) {
    throw InvalidFrameReference(index, seq.size());
  }
}
}  // namespace detail

/// Current frame with its images and their calibrations taken from the stale frame.
inline FrameSample temporal_misalign_camera(std::span<const FrameSample> seq, std::int64_t index,
                                            Severity severity, const MisalignParams& params = {}) {
  detail::check_index(seq, index);
  const auto src = delayed_index(static_cast<std::size_t>(index),
                                 params.frame_offset[severity_index(severity)]);
  FrameSample out = seq[static_cast<std::size_t>(index)];
  out.images = seq[src].images;
  out.calibrations = seq[src].calibrations;
  return out;
}

/// Current frame with its point cloud taken from the stale frame. The cloud keeps
/// its original frame_id so the provenance stays visible.
inline FrameSample temporal_misalign_lidar(std::span<const FrameSample> seq, std::int64_t index,
                                           Severity severity, const MisalignParams& params = {}) {
  detail::check_index(seq, index);
  const auto src = delayed_index(static_cast<std::size_t>(index),
                                 params.frame_offset[severity_index(severity)]);
  FrameSample out = seq[static_cast<std::size_t>(index)];
  out.cloud = seq[src].cloud;
  return out;
}

}  // namespace r3bench
