#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "r3bench/core/types.hpp"

namespace r3bench {

struct Violation {
  std::string field;
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline void check_box(const Box3D& b, const std::string& where, std::vector<Violation>& out) {
  for (double v : {b.cx, b.cy, b.cz, b.l, b.w, b.h, b.yaw}) {
    if (!std::isfinite(v)) {
      out.push_back({where, "box values must be finite"});
      return;
    }
  }
  if (!(b.l > 0.0 && b.w > 0.0 && b.h > 0.0)) {
    out.push_back({where + ".dimensions", "l, w, h must be > 0"});
  }
  if (!(b.yaw > -std::numbers::pi && b.yaw <= std::numbers::pi)) {
    out.push_back({where + ".yaw", "yaw must lie in (-pi, pi]"});
  }
}

}  // namespace detail

inline bool is_orthonormal(const Calibration& c, double tol = 1e-6) {
  const auto& r = c.rotation;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[k * 3 + i] * r[k * 3 + j];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) >= tol) return false;
    }
  }
  return true;
}

// Checks every data-model invariant. Calibration orthonormality is only
// enforced when `require_orthonormal` is set, since spatially misaligned
// calibrations are deliberately non-orthonormal.
inline std::vector<Violation> validate_frame(const FrameSample& frame,
                                             bool require_orthonormal = false) {
  std::vector<Violation> out;

  if (frame.index_in_sequence < 0) {
    out.push_back({"index_in_sequence", "must be non-negative"});
  }

  for (std::size_t i = 0; i < frame.cloud.points.size(); ++i) {
    const Point3& p = frame.cloud.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      out.push_back({"cloud.points[" + std::to_string(i) + "]", "coordinates must be finite"});
    }
  }

  std::set<std::string> image_ids;
  for (const CameraImage& img : frame.images) {
    const std::string where = "images[" + img.camera_id + "]";
    const auto expected = static_cast<std::size_t>(std::max(img.width, 0)) *
                          static_cast<std::size_t>(std::max(img.height, 0)) *
                          CameraImage::kChannels;
    if (img.width <= 0 || img.height <= 0 || img.pixels.size() != expected) {
      out.push_back({where + ".pixels", "pixel count must equal width x height x 3"});
    }
    for (double v : img.pixels) {
      if (!(v >= 0.0 && v <= 1.0)) {
        out.push_back({where + ".pixels", "pixel values must lie in [0,1]"});
        break;
      }
    }
    if (!image_ids.insert(img.camera_id).second) {
      out.push_back({where, "duplicate camera_id"});
    }
  }

  std::set<std::string> calib_ids;
  for (const Calibration& c : frame.calibrations) {
    const std::string where = "calibrations[" + c.camera_id + "]";
    if (!calib_ids.insert(c.camera_id).second) {
      out.push_back({where, "duplicate camera_id"});
    }
    if (require_orthonormal && !is_orthonormal(c)) {
      out.push_back({where + ".rotation", "rotation must be orthonormal"});
    }
  }
  if (image_ids != calib_ids) {
    out.push_back({"calibrations", "images and calibrations must correspond by camera_id"});
  }

  for (std::size_t i = 0; i < frame.ground_truth.size(); ++i) {
    detail::check_box(frame.ground_truth[i].box, "ground_truth[" + std::to_string(i) + "].box",
                      out);
  }
  return out;
}

inline std::vector<Violation> validate_detection(const Detection& d) {
  std::vector<Violation> out;
  detail::check_box(d.box, "detection.box", out);
  if (!(d.score >= 0.0 && d.score <= 1.0)) out.push_back({"detection.score", "must lie in [0,1]"});
  return out;
}

}  // namespace r3bench
