#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace r3bench::io {

enum class ParseErrorKind {
  BadMagic,
  VersionMismatch,
  UnknownFlags,
  Truncated,
  TrailingBytes,
  Malformed,
  InvalidValue,
  Duplicate,
};

inline std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::BadMagic: return "bad magic";
    case ParseErrorKind::VersionMismatch: return "version mismatch";
    case ParseErrorKind::UnknownFlags: return "unknown flags";
    case ParseErrorKind::Truncated: return "truncated";
    case ParseErrorKind::TrailingBytes: return "trailing bytes";
    case ParseErrorKind::Malformed: return "malformed";
    case ParseErrorKind::InvalidValue: return "invalid value";
    case ParseErrorKind::Duplicate: return "duplicate";
  }
  return "?";
}

enum class LocationKind { ByteOffset, Line };

// Structured parse failure. `location` is a byte offset for binary formats
// and a 1-based line number for text formats.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, LocationKind loc_kind, std::size_t location, const std::string& detail,
             std::string source = {})
      : std::runtime_error(format(kind, loc_kind, location, detail, source)),
        kind_(kind), location_kind_(loc_kind), location_(location), source_(std::move(source)) {}

  ParseErrorKind kind() const { return kind_; }
  LocationKind location_kind() const { return location_kind_; }
  std::size_t location() const { return location_; }
  const std::string& source() const { return source_; }

 private:
  static std::string format(ParseErrorKind kind, LocationKind loc_kind, std::size_t location,
                            const std::string& detail, const std::string& source) {
    std::string s = source.empty() ? std::string() : source + ": ";
    s += std::string(to_string(kind));
    s += loc_kind == LocationKind::ByteOffset ? " at byte offset " : " at line ";
    s += std::to_string(location);
    if (!detail.empty()) s += ": " + detail;
    return s;
  }

  ParseErrorKind kind_;
  LocationKind location_kind_;
  std::size_t location_;
  std::string source_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset-level failure (missing modality, invalid frame) naming the frame.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace r3bench::io
