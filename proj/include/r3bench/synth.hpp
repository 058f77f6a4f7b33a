#pragma once

// Synthetic scenes and a parametric pseudo-detector: a model-free test bed
// for the corruption -> detection -> evaluation pipeline.
//
// Persons are upright cuboids standing on a ground plane. LiDAR returns are
// sampled on their faces with an expected count of points_scale / d^2 (d the
// horizontal range, at least 1 m). Vertical, axis-aligned occluder panels
// delete the returns they shadow from the sensor origin; the visible fraction
// of a fixed set of surface probes sets the occlusion label:
//   > 0.9 fully visible, > 0.5 mostly visible, > 0.1 severely occluded,
//   otherwise fully occluded.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "r3bench/core/rng.hpp"
#include "r3bench/core/seed.hpp"
#include "r3bench/core/types.hpp"
#include "r3bench/geometry.hpp"

namespace r3bench {

struct SceneParams {
  std::size_t persons_min = 4;
  std::size_t persons_max = 12;
  double area_half_extent_m = 25.0;  // positions uniform over [-a, a]^2
  double min_range_m = 1.0;
  double min_separation_m = 0.8;
  std::array<double, 3> person_dims{0.6, 0.6, 1.7};
  double dims_jitter = 0.1;  // uniform relative jitter on each dimension
  double points_scale = 4000.0;
  double ground_z = -0.8;  // sensor height above the floor
  std::size_t clutter_points = 800;
  std::size_t occluders = 3;
  double occluder_extent_m = 12.0;  // occluder centers uniform over [-e, e]^2
  std::array<double, 2> occluder_width_m{1.0, 4.0};
  double occluder_height_m = 2.0;
  std::size_t occluder_points = 60;
  std::size_t visibility_probes = 64;
  double max_speed_mps = 1.5;
  double fps = 10.0;
  std::size_t cameras = 5;
  int image_width = 16;
  int image_height = 12;
  // Fixed starting positions; when non-empty they replace the random draw and
  // the person count.
  std::vector<Vec2> fixed_positions;
  // Fixed velocity applied to every person, replacing the random draw.
  std::optional<Vec2> fixed_velocity;

  void validate() const {
    if (area_half_extent_m <= 0.0) throw std::invalid_argument("scene area must be positive");
    if (persons_min > persons_max) throw std::invalid_argument("persons_min exceeds persons_max");
    if (!(person_dims[0] > 0 && person_dims[1] > 0 && person_dims[2] > 0)) {
      throw std::invalid_argument("person dimensions must be positive");
    }
    if (dims_jitter < 0.0 || dims_jitter >= 1.0) throw std::invalid_argument("dims_jitter must be in [0,1)");
    if (points_scale < 0.0 || fps <= 0.0 || max_speed_mps < 0.0) {
      throw std::invalid_argument("points_scale, fps and max_speed must be non-negative (fps positive)");
    }
    if (min_range_m >= area_half_extent_m) throw std::invalid_argument("min_range leaves no feasible area");
    if (cameras > 0 && (image_width <= 0 || image_height <= 0)) {
      throw std::invalid_argument("image dimensions must be positive");
    }
  }
};

// Vertical panel on the plane {axis = offset}, spanning [lo, hi] along the
// other horizontal axis and [z_lo, z_hi] vertically.
struct Occluder {
  bool x_plane = true;  // plane x = offset when true, y = offset otherwise
  double offset = 0.0;
  double lo = 0.0, hi = 0.0;
  double z_lo = 0.0, z_hi = 0.0;

  /// True when the segment from the sensor origin to p crosses the panel.
  bool shadows(const Point3& p) const {
    const double along = x_plane ? p.x : p.y;
    if (along == 0.0) return false;
    const double t = offset / along;
    if (t <= 0.0 || t >= 1.0) return false;
    const double other = t * (x_plane ? p.y : p.x);
    const double z = t * p.z;
    return other >= lo && other <= hi && z >= z_lo && z <= z_hi;
  }
};

inline Occlusion occlusion_from_visibility(double visible_fraction) {
  if (visible_fraction > 0.9) return Occlusion::FullyVisible;
  if (visible_fraction > 0.5) return Occlusion::MostlyVisible;
  if (visible_fraction > 0.1) return Occlusion::SeverelyOccluded;
  return Occlusion::FullyOccluded;
}

namespace detail {

struct Track {
  Box3D box;  // pose at frame 0
  Vec2 velocity;
  std::string id;
};

// Surface samples sit this fraction of each dimension inside the hull, so a
// float32 round trip never pushes them out of the box.
inline constexpr double kSurfaceInset = 0.01;

/// Uniform sample on the (slightly inset) cuboid surface, faces weighted by area.
inline Point3 sample_box_surface(const Box3D& b, Rng& rng) {
  const double a_lw = b.l * b.w, a_lh = b.l * b.h, a_wh = b.w * b.h;
  const double total = 2.0 * (a_lw + a_lh + a_wh);
  const double pick = rng.uniform01() * total;
  const double half = 0.5 - kSurfaceInset;
  const double u = rng.uniform(-half, half);
  const double v = rng.uniform(-half, half);
  const double sign = rng.uniform01() < 0.5 ? -half : half;
  double lx, ly, lz;
  if (pick < 2.0 * a_lw) {
    lx = u * b.l; ly = v * b.w; lz = sign * b.h;
  } else if (pick < 2.0 * (a_lw + a_lh)) {
    lx = u * b.l; ly = sign * b.w; lz = v * b.h;
  } else {
    lx = sign * b.l; ly = u * b.w; lz = v * b.h;
  }
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  return {b.cx + c * lx - s * ly, b.cy + s * lx + c * ly, b.cz + lz, 0.0};
}

inline bool shadowed(const Point3& p, const std::vector<Occluder>& occluders) {
  return std::any_of(occluders.begin(), occluders.end(), [&](const Occluder& o) { return o.shadows(p); });
}

inline std::string frame_name(const std::string& sequence_id, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return sequence_id + "/" + buf;
}

inline CameraImage render_image(std::size_t camera, std::int64_t frame_index, const SceneParams& p) {
  CameraImage img(p.image_width, p.image_height, "cam" + std::to_string(camera));
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      for (int ch = 0; ch < CameraImage::kChannels; ++ch) {
        const double phase = 0.3 * c + 0.2 * r + 0.7 * static_cast<double>(frame_index) +
                             static_cast<double>(camera) + 0.5 * ch;
        img.at(r, c, ch) = 0.5 + 0.35 * std::sin(phase);
      }
    }
  }
  return img;
}

// Camera i looks along azimuth i * 360 / n; camera-from-LiDAR rotation is R_z(-azimuth).
inline Calibration camera_calibration(std::size_t camera, std::size_t n_cameras) {
  const double az = 2.0 * std::numbers::pi * static_cast<double>(camera) / static_cast<double>(n_cameras);
  const double c = std::cos(az), s = std::sin(az);
  Calibration cal;
  cal.rotation = {c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0};
  cal.translation = {0.0, 0.0, -0.1};
  cal.camera_id = "cam" + std::to_string(camera);
  return cal;
}

}  // namespace detail

class SceneGenerator {
 public:
  SceneGenerator(SceneParams params, std::uint64_t seed) : params_(std::move(params)), seed_(seed) {
    params_.validate();
    Rng rng(derive_stream_seed(seed_, "scene-layout"));
    place_occluders(rng);
    place_persons(rng);
  }

  FrameSample render(std::int64_t index, const std::string& sequence_id) const {
    const SceneParams& p = params_;
    FrameSample f;
    f.sequence_id = sequence_id;
    f.index_in_sequence = index;
    f.frame_id = detail::frame_name(sequence_id, static_cast<std::size_t>(index));
    f.cloud.frame_id = f.frame_id;
    Rng rng(derive_stream_seed(seed_, f.frame_id));

    const double t = static_cast<double>(index) / p.fps;
    for (const detail::Track& track : tracks_) {
      GroundTruth gt;
      gt.box = track.box;
      gt.box.cx += track.velocity.x * t;
      gt.box.cy += track.velocity.y * t;
      gt.track_id = track.id;

      std::size_t visible = 0;
      for (std::size_t k = 0; k < p.visibility_probes; ++k) {
        if (!detail::shadowed(detail::sample_box_surface(gt.box, rng), occluders_)) ++visible;
      }
      const double fraction = p.visibility_probes == 0
                                  ? 1.0
                                  : static_cast<double>(visible) / static_cast<double>(p.visibility_probes);
      gt.occlusion = occlusion_from_visibility(fraction);

      const double d = std::max(1.0, gt.box.horizontal_range());
      const double expected = p.points_scale / (d * d);
      const auto n = static_cast<std::size_t>(std::floor(expected + rng.uniform01()));
      for (std::size_t k = 0; k < n; ++k) {
        const Point3 q = detail::sample_box_surface(gt.box, rng);
        if (!detail::shadowed(q, occluders_)) f.cloud.points.push_back(q);
      }
      f.ground_truth.push_back(std::move(gt));
    }

    for (const Occluder& o : occluders_) {
      for (std::size_t k = 0; k < p.occluder_points; ++k) {
        const double along = rng.uniform(o.lo, o.hi);
        const double z = rng.uniform(o.z_lo, o.z_hi);
        f.cloud.points.push_back(o.x_plane ? Point3{o.offset, along, z, 0.0} : Point3{along, o.offset, z, 0.0});
      }
    }
    // Floor returns sit just below the floor so they never fall inside a person box.
    for (std::size_t k = 0; k < p.clutter_points; ++k) {
      const double a = p.area_half_extent_m;
      f.cloud.points.push_back({rng.uniform(-a, a), rng.uniform(-a, a), p.ground_z - 0.05, 0.0});
    }

    for (std::size_t c = 0; c < p.cameras; ++c) {
      f.images.push_back(detail::render_image(c, index, p));
      f.calibrations.push_back(detail::camera_calibration(c, p.cameras));
    }
    return f;
  }

 private:
  void place_occluders(Rng& rng) {
    const SceneParams& p = params_;
    for (std::size_t i = 0; i < p.occluders; ++i) {
      Occluder o;
      o.x_plane = rng.uniform01() < 0.5;
      o.offset = rng.uniform(-p.occluder_extent_m, p.occluder_extent_m);
      const double center = rng.uniform(-p.occluder_extent_m, p.occluder_extent_m);
      const double width = rng.uniform(p.occluder_width_m[0], p.occluder_width_m[1]);
      o.lo = center - 0.5 * width;
      o.hi = center + 0.5 * width;
      o.z_lo = p.ground_z;
      o.z_hi = p.ground_z + p.occluder_height_m;
      occluders_.push_back(o);
    }
  }

  void place_persons(Rng& rng) {
    const SceneParams& p = params_;
    std::vector<Vec2> positions = p.fixed_positions;
    if (positions.empty()) {
      const std::size_t count =
          p.persons_min + static_cast<std::size_t>(rng.below(p.persons_max - p.persons_min + 1));
      const double a = p.area_half_extent_m;
      for (std::size_t attempts = 0; positions.size() < count && attempts < 100 * count; ++attempts) {
        const Vec2 c{rng.uniform(-a, a), rng.uniform(-a, a)};
        if (std::hypot(c.x, c.y) < p.min_range_m) continue;
        const bool crowded = std::any_of(positions.begin(), positions.end(), [&](const Vec2& q) {
          return std::hypot(q.x - c.x, q.y - c.y) < p.min_separation_m;
        });
        if (!crowded) positions.push_back(c);
      }
    }

    for (std::size_t i = 0; i < positions.size(); ++i) {
      detail::Track t;
      auto jitter = [&] { return 1.0 + p.dims_jitter * rng.uniform(-1.0, 1.0); };
      t.box.l = p.person_dims[0] * jitter();
      t.box.w = p.person_dims[1] * jitter();
      t.box.h = p.person_dims[2] * jitter();
      t.box.cx = positions[i].x;
      t.box.cy = positions[i].y;
      t.box.cz = p.ground_z + 0.5 * t.box.h;
      t.box.yaw = normalize_yaw(rng.uniform(-std::numbers::pi, std::numbers::pi));
      if (p.fixed_velocity) {
        t.velocity = *p.fixed_velocity;
      } else {
        const double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const double speed = rng.uniform(0.0, p.max_speed_mps);
        t.velocity = {speed * std::cos(heading), speed * std::sin(heading)};
      }
      t.id = "p" + std::to_string(i);
      tracks_.push_back(std::move(t));
    }
  }

  SceneParams params_;
  std::uint64_t seed_;
  std::vector<Occluder> occluders_;
  std::vector<detail::Track> tracks_;
};

/// Constant-velocity sequence of `frames` frames.
inline Sequence generate_sequence(const SceneParams& params, std::size_t frames, std::uint64_t seed,
                                  const std::string& sequence_id = "seq000") {
  if (frames == 0) throw std::invalid_argument("a sequence needs at least one frame");
  SceneGenerator gen(params, seed);
  Sequence seq;
  seq.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) seq.push_back(gen.render(static_cast<std::int64_t>(i), sequence_id));
  return seq;
}

inline FrameSample generate_scene(const SceneParams& params, std::uint64_t seed,
                                  const std::string& sequence_id = "seq000") {
  return generate_sequence(params, 1, seed, sequence_id).front();
}

// ---------------------------------------------------------------------------
// Pseudo-detector

struct PseudoDetectorParams {
  std::size_t min_points = 5;
  double jitter_sigma_m = 0.05;
  // score = n / (n + score_half_points), monotone in the in-box point count n.
  double score_half_points = 20.0;
  double miss_probability = 0.0;

  void validate() const {
    if (min_points < 1) throw std::invalid_argument("min_points must be >= 1");
    if (jitter_sigma_m < 0.0) throw std::invalid_argument("jitter sigma must be >= 0");
    if (score_half_points <= 0.0) throw std::invalid_argument("score_half_points must be > 0");
    if (miss_probability < 0.0 || miss_probability > 1.0) throw std::invalid_argument("miss_probability must be in [0,1]");
  }
};

// One detection per ground-truth box with at least min_points in-box points.
// Every box consumes the same random draws whether or not it is detected, so
// two clouds of the same frame share jitter and miss decisions.
inline std::vector<Detection> pseudo_detect(const FrameSample& frame, const PseudoDetectorParams& params,
                                            std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  std::vector<Detection> out;
  for (const GroundTruth& gt : frame.ground_truth) {
    const double jx = rng.normal(params.jitter_sigma_m);
    const double jy = rng.normal(params.jitter_sigma_m);
    const double jz = rng.normal(params.jitter_sigma_m);
    const double u = rng.uniform01();
    const std::size_t n = points_in_box(frame.cloud, gt.box);
    if (n < params.min_points || u < params.miss_probability) continue;
    Detection d;
    d.box = gt.box;
    d.box.cx += jx;
    d.box.cy += jy;
    d.box.cz += jz;
    d.score = static_cast<double>(n) / (static_cast<double>(n) + params.score_half_points);
    d.frame_id = frame.frame_id;
    out.push_back(d);
  }
  return out;
}

}  // namespace r3bench
