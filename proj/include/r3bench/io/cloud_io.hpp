#pragma once

// Binary point-cloud file (.r3pc), little-endian throughout:
//
//   offset  size  field
//   0       4     magic "R3PC"
//   4       2     version (u16, currently 1)
//   6       4     point count N (u32)
//   10      2     flags (u16); bit 0 set = points carry intensity
//   12      ...   N records of 3 (x, y, z) or 4 (x, y, z, intensity) binary32 floats
//
// Storage is binary32 while computation is binary64, so a round trip is
// bit-exact only for float-representable coordinates. The frame id is not
// stored; readers assign it from context.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "r3bench/core/types.hpp"
#include "r3bench/io/errors.hpp"
#include "r3bench/io/file.hpp"

namespace r3bench::io {

inline constexpr std::array<char, 4> kCloudMagic{'R', '3', 'P', 'C'};
inline constexpr std::uint16_t kCloudVersion = 1;
inline constexpr std::size_t kCloudHeaderSize = 12;
inline constexpr std::uint16_t kFlagIntensity = 0x1;

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in[offset + i]) << (8 * i));
  return v;
}

inline void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

inline double get_f32(std::span<const std::uint8_t> in, std::size_t offset) {
  return static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, offset)));
}

}  // namespace detail

/// Rounds every coordinate to binary32, i.e. what a write/read cycle yields.
inline PointCloud quantize(const PointCloud& cloud) {
  PointCloud out = cloud;
  for (Point3& p : out.points) {
    p.x = static_cast<float>(p.x);
    p.y = static_cast<float>(p.y);
    p.z = static_cast<float>(p.z);
    p.intensity = cloud.has_intensity ? static_cast<double>(static_cast<float>(p.intensity)) : 0.0;
  }
  return out;
}

inline std::vector<std::uint8_t> encode_cloud(const PointCloud& cloud) {
  if (cloud.size() > UINT32_MAX) throw IoError("cloud too large for the r3pc format");
  const std::size_t stride = cloud.has_intensity ? 4 : 3;
  std::vector<std::uint8_t> out;
  out.reserve(kCloudHeaderSize + cloud.size() * stride * 4);
  for (auto b : kCloudMagic) out.push_back(static_cast<std::uint8_t>(b));
  detail::put_le<std::uint16_t>(out, kCloudVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cloud.size()));
  detail::put_le<std::uint16_t>(out, cloud.has_intensity ? kFlagIntensity : 0);
  for (const Point3& p : cloud.points) {
    detail::put_f32(out, p.x);
    detail::put_f32(out, p.y);
    detail::put_f32(out, p.z);
    if (cloud.has_intensity) detail::put_f32(out, p.intensity);
  }
  return out;
}

inline PointCloud decode_cloud(std::span<const std::uint8_t> bytes, const std::string& source = {}) {
  auto fail = [&](ParseErrorKind k, std::size_t off, const std::string& msg) {
    return ParseError(k, LocationKind::ByteOffset, off, msg, source);
  };
  if (bytes.size() < 4) throw fail(ParseErrorKind::Truncated, bytes.size(), "header needs 12 bytes");
  if (std::memcmp(bytes.data(), kCloudMagic.data(), 4) != 0) {
    throw fail(ParseErrorKind::BadMagic, 0, "expected \"R3PC\"");
  }
  if (bytes.size() < kCloudHeaderSize) throw fail(ParseErrorKind::Truncated, bytes.size(), "header needs 12 bytes");
  const auto version = detail::get_le<std::uint16_t>(bytes, 4);
  if (version != kCloudVersion) {
    throw fail(ParseErrorKind::VersionMismatch, 4, "version " + std::to_string(version) + ", expected 1");
  }
  const auto count = detail::get_le<std::uint32_t>(bytes, 6);
  const auto flags = detail::get_le<std::uint16_t>(bytes, 10);
  if ((flags & ~kFlagIntensity) != 0) throw fail(ParseErrorKind::UnknownFlags, 10, "flags " + std::to_string(flags));

  PointCloud cloud;
  cloud.has_intensity = (flags & kFlagIntensity) != 0;
  const std::size_t record = (cloud.has_intensity ? 4 : 3) * 4;
  const std::size_t expected = kCloudHeaderSize + static_cast<std::size_t>(count) * record;
  if (bytes.size() < expected) {
    throw fail(ParseErrorKind::Truncated, bytes.size(),
               "payload for " + std::to_string(count) + " points needs " + std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) throw fail(ParseErrorKind::TrailingBytes, expected, "data after last point");

  cloud.points.resize(count);
  std::size_t off = kCloudHeaderSize;
  for (Point3& p : cloud.points) {
    p.x = detail::get_f32(bytes, off);
    p.y = detail::get_f32(bytes, off + 4);
    p.z = detail::get_f32(bytes, off + 8);
    if (cloud.has_intensity) p.intensity = detail::get_f32(bytes, off + 12);
    off += record;
  }
  return cloud;
}

inline void write_cloud(const PointCloud& cloud, const fs::path& path) { write_bytes(path, encode_cloud(cloud)); }

inline PointCloud read_cloud(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return decode_cloud(bytes, path.string());
}

}  // namespace r3bench::io
