#pragma once

// Camera corruptions in normalized [0,1] intensity space. Outputs are clamped
// once, after the full transform.

#include <algorithm>
#include <array>
#include <cstdint>

#include "r3bench/core/rng.hpp"
#include "r3bench/core/types.hpp"

namespace r3bench {

struct CameraCorruptionParams {
  std::array<double, 3> gaussian_sigma{0.08, 0.18, 0.38};
  std::array<double, 3> fog_opacity{0.10, 0.30, 0.50};
  double fog_gray = 0.5;
  std::array<double, 3> sunlight_brightness_delta{0.10, 0.20, 0.30};
  std::array<double, 3> sunlight_contrast_factor{1.1, 1.3, 1.5};

  // Override names: "sigma" (camera_gaussian), "opacity", "gray" (fog),
  // "brightness", "contrast" (sunlight).
  static CameraCorruptionParams from_spec(const CorruptionSpec& spec) {
    CameraCorruptionParams p;
    const std::size_t i = severity_index(spec.severity);
    switch (spec.kind) {
      case CorruptionKind::CameraGaussian:
        if (auto v = spec.override_for("sigma")) p.gaussian_sigma[i] = *v;
        break;
      case CorruptionKind::Fog:
        if (auto v = spec.override_for("opacity")) p.fog_opacity[i] = *v;
        if (auto v = spec.override_for("gray")) p.fog_gray = *v;
        break;
      case CorruptionKind::Sunlight:
        if (auto v = spec.override_for("brightness")) p.sunlight_brightness_delta[i] = *v;
        if (auto v = spec.override_for("contrast")) p.sunlight_contrast_factor[i] = *v;
        break;
      default:
        break;
    }
    return p;
  }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline CameraImage camera_gaussian(const CameraImage& img, Severity severity, std::uint64_t seed,
                                   const CameraCorruptionParams& params = {}) {
  const double sigma = params.gaussian_sigma[severity_index(severity)];
  Rng rng(seed);
  CameraImage out = img;
  for (double& v : out.pixels) v = clamp01(v + rng.normal(sigma));
  return out;
}

inline CameraImage fog(const CameraImage& img, Severity severity,
                       const CameraCorruptionParams& params = {}) {
  const double alpha = params.fog_opacity[severity_index(severity)];
  CameraImage out = img;
  for (double& v : out.pixels) v = clamp01(v + alpha * (params.fog_gray - v));
  return out;
}

// Global brightness/contrast shift about mid-gray; no local glare.
inline CameraImage sunlight(const CameraImage& img, Severity severity,
                            const CameraCorruptionParams& params = {}) {
  const std::size_t i = severity_index(severity);
  const double contrast = params.sunlight_contrast_factor[i];
  const double brightness = params.sunlight_brightness_delta[i];
  CameraImage out = img;
  for (double& v : out.pixels) v = clamp01((v - 0.5) * contrast + 0.5 + brightness);
  return out;
}

}  // namespace r3bench
