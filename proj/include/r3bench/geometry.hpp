#pragma once

// Rotated-cuboid geometry: corners, bird's-eye-view convex clipping, IoU and
// point containment. Boxes rotate about the vertical axis only.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "r3bench/core/types.hpp"

namespace r3bench {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// Counter-clockwise convex polygon. Empty means "no area".
struct ConvexPolygon2 {
  std::vector<Vec2> vertices;

  bool empty() const { return vertices.empty(); }
};

namespace geom {
// Vertices closer than this are merged after clipping.
inline constexpr double kMergeDistance = 1e-9;
// Intersections with less area than this are reported as empty.
inline constexpr double kMinArea = 1e-12;
// Slack for the half-plane test and for boundary-inclusive containment.
inline constexpr double kSideTolerance = 1e-12;
inline constexpr double kContainTolerance = 1e-9;

inline double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}
}  // namespace geom

// Corner order: 0..3 bottom face, 4..7 top face; within a face the local
// (x, y) signs run (+,+), (-,+), (-,-), (+,-), i.e. counter-clockwise seen
// from above.
inline std::array<Vec3, 8> box_corners(const Box3D& b) {
  static constexpr std::array<std::array<double, 2>, 4> kSigns{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  std::array<Vec3, 8> out{};
  for (std::size_t face = 0; face < 2; ++face) {
    const double z = b.cz + (face == 0 ? -0.5 : 0.5) * b.h;
    for (std::size_t k = 0; k < 4; ++k) {
      const double lx = kSigns[k][0] * 0.5 * b.l;
      const double ly = kSigns[k][1] * 0.5 * b.w;
      out[face * 4 + k] = {b.cx + c * lx - s * ly, b.cy + s * lx + c * ly, z};
    }
  }
  return out;
}

inline ConvexPolygon2 bev_polygon(const Box3D& b) {
  const auto corners = box_corners(b);
  ConvexPolygon2 poly;
  poly.vertices.reserve(4);
  for (std::size_t k = 0; k < 4; ++k) poly.vertices.push_back({corners[k].x, corners[k].y});
  return poly;
}

/// Shoelace area; positive for counter-clockwise input.
inline double polygon_area(const ConvexPolygon2& p) {
  const auto& v = p.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - a.y * b.x;
  }
  return 0.5 * twice;
}

namespace detail {

inline std::vector<Vec2> merge_close_vertices(const std::vector<Vec2>& in) {
  std::vector<Vec2> out;
  out.reserve(in.size());
  for (const Vec2& v : in) {
    if (!out.empty() && std::hypot(v.x - out.back().x, v.y - out.back().y) < geom::kMergeDistance) {
      continue;
    }
    out.push_back(v);
  }
  while (out.size() > 1 &&
         std::hypot(out.front().x - out.back().x, out.front().y - out.back().y) <
             geom::kMergeDistance) {
    out.pop_back();
  }
  return out;
}

}  // namespace detail

// Sutherland-Hodgman: clip `a` successively by each edge of `b`.
inline ConvexPolygon2 polygon_intersection(const ConvexPolygon2& a, const ConvexPolygon2& b) {
  if (a.vertices.size() < 3 || b.vertices.size() < 3) return {};
  std::vector<Vec2> output = a.vertices;

  for (std::size_t e = 0; e < b.vertices.size() && !output.empty(); ++e) {
    const Vec2& p = b.vertices[e];
    const Vec2& q = b.vertices[(e + 1) % b.vertices.size()];
    const double edge_len = std::hypot(q.x - p.x, q.y - p.y);
    if (edge_len == 0.0) continue;
    auto side = [&](const Vec2& v) { return geom::cross(p, q, v) / edge_len; };

    std::vector<Vec2> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2& cur = input[i];
      const Vec2& prev = input[(i + input.size() - 1) % input.size()];
      const double sc = side(cur);
      const double sp = side(prev);
      const bool cur_in = sc >= -geom::kSideTolerance;
      const bool prev_in = sp >= -geom::kSideTolerance;
      if (cur_in != prev_in) {
        const double t = sp / (sp - sc);
        output.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
      if (cur_in) output.push_back(cur);
    }
  }

  ConvexPolygon2 result{detail::merge_close_vertices(output)};
  if (result.vertices.size() < 3 || polygon_area(result) < geom::kMinArea) return {};
  return result;
}

inline double bev_intersection_area(const Box3D& a, const Box3D& b) {
  return polygon_area(polygon_intersection(bev_polygon(a), bev_polygon(b)));
}

inline double iou_bev(const Box3D& a, const Box3D& b) {
  const auto pa = bev_polygon(a);
  const auto pb = bev_polygon(b);
  const double inter = polygon_area(polygon_intersection(pa, pb));
  if (inter <= 0.0) return 0.0;
  const double uni = polygon_area(pa) + polygon_area(pb) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline double vertical_overlap(const Box3D& a, const Box3D& b) {
  const double top = std::min(a.cz + 0.5 * a.h, b.cz + 0.5 * b.h);
  const double bottom = std::max(a.cz - 0.5 * a.h, b.cz - 0.5 * b.h);
  return std::max(0.0, top - bottom);
}

inline double iou_3d(const Box3D& a, const Box3D& b) {
  const double dz = vertical_overlap(a, b);
  if (dz <= 0.0) return 0.0;
  const auto pa = bev_polygon(a);
  const auto pb = bev_polygon(b);
  const double inter_area = polygon_area(polygon_intersection(pa, pb));
  if (inter_area <= 0.0) return 0.0;
  const double inter = inter_area * dz;
  // Volumes use the same area and height arithmetic as the intersection so
  // that iou_3d(a, a) == 1 exactly.
  const double vol_a = polygon_area(pa) * ((a.cz + 0.5 * a.h) - (a.cz - 0.5 * a.h));
  const double vol_b = polygon_area(pb) * ((b.cz + 0.5 * b.h) - (b.cz - 0.5 * b.h));
  return std::clamp(inter / (vol_a + vol_b - inter), 0.0, 1.0);
}

/// Boundary-inclusive containment in the box frame.
inline bool point_in_box(const Point3& p, const Box3D& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double dx = p.x - b.cx;
  const double dy = p.y - b.cy;
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  const double lz = p.z - b.cz;
  return std::abs(lx) <= 0.5 * b.l + geom::kContainTolerance &&
         std::abs(ly) <= 0.5 * b.w + geom::kContainTolerance &&
         std::abs(lz) <= 0.5 * b.h + geom::kContainTolerance;
}

inline std::size_t points_in_box(const PointCloud& cloud, const Box3D& box) {
  // Cheap bounding-circle rejection before the exact test.
  const double radius = 0.5 * std::hypot(box.l, box.w) + geom::kContainTolerance;
  const double r2 = radius * radius;
  std::size_t n = 0;
  for (const Point3& p : cloud.points) {
    const double dx = p.x - box.cx;
    const double dy = p.y - box.cy;
    if (dx * dx + dy * dy > r2) continue;
    if (point_in_box(p, box)) ++n;
  }
  return n;
}

}  // namespace r3bench
