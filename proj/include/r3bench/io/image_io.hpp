#pragma once

// Images are stored as binary PPM (P6) with maxval 65535: big-endian 16-bit
// samples, value = round(v * 65535).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "r3bench/core/types.hpp"
#include "r3bench/io/errors.hpp"
#include "r3bench/io/file.hpp"

namespace r3bench::io {

inline std::vector<std::uint8_t> encode_image(const CameraImage& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.pixels.size() * 2);
  for (double v : img.pixels) {
    const auto s = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
    out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xFF));
  }
  return out;
}

inline CameraImage decode_image(std::span<const std::uint8_t> bytes, const std::string& camera_id,
                                const std::string& source = {}) {
  std::size_t pos = 0;
  auto fail = [&](ParseErrorKind k, const std::string& msg) {
    return ParseError(k, LocationKind::ByteOffset, pos, msg, source);
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space();
    long v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && pos - start < 9) v = v * 10 + (bytes[pos++] - '0');
    if (pos == start) throw fail(ParseErrorKind::Malformed, "expected integer");
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw fail(ParseErrorKind::BadMagic, "expected P6");
  pos = 2;
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (w <= 0 || h <= 0) throw fail(ParseErrorKind::InvalidValue, "non-positive dimensions");
  if (maxval != 65535) throw fail(ParseErrorKind::InvalidValue, "maxval must be 65535");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw fail(ParseErrorKind::Malformed, "missing separator");
  ++pos;

  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * CameraImage::kChannels;
  if (bytes.size() - pos < n * 2) {
    pos = bytes.size();
    throw fail(ParseErrorKind::Truncated, "pixel payload too short");
  }
  if (bytes.size() - pos > n * 2) {
    pos += n * 2;
    throw fail(ParseErrorKind::TrailingBytes, "data after last pixel");
  }
  CameraImage img(static_cast<int>(w), static_cast<int>(h), camera_id);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned s = (static_cast<unsigned>(bytes[pos]) << 8) | bytes[pos + 1];
    img.pixels[i] = static_cast<double>(s) / 65535.0;
    pos += 2;
  }
  return img;
}

inline void write_image(const CameraImage& img, const fs::path& path) { write_bytes(path, encode_image(img)); }

inline CameraImage read_image(const fs::path& path, const std::string& camera_id) {
  const auto bytes = read_bytes(path);
  return decode_image(bytes, camera_id, path.string());
}

/// Value grid a write/read cycle produces.
inline CameraImage quantize(const CameraImage& img) {
  CameraImage out = img;
  for (double& v : out.pixels) v = static_cast<double>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0)) / 65535.0;
  return out;
}

}  // namespace r3bench::io
