#pragma once

// Line-oriented JSON records.
//
// Annotations (.jsonl), one frame per line:
//   {"frame_id": "...", "sequence_id": "...", "index": 0,
//    "boxes": [{"cx":..,"cy":..,"cz":..,"l":..,"w":..,"h":..,"yaw":..,
//               "occlusion": "fully_visible" | "mostly_visible" |
//                            "severely_occluded" | "fully_occluded",
//               "track_id": "..."}]}
//   "index" is optional. Unknown keys, on the record or on a box, survive a
//   read/write cycle.
//
// Detections (.jsonl), one detection per line:
//   {"frame_id": "...", "cx":..,"cy":..,"cz":..,"l":..,"w":..,"h":..,"yaw":..,"score":..}
//
// Calibrations (.json), one file per frame:
//   {"calibrations": [{"camera_id": "...", "rotation": [9 row-major], "translation": [3]}]}

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "r3bench/core/types.hpp"
#include "r3bench/io/errors.hpp"
#include "r3bench/io/file.hpp"

namespace r3bench::io {

using json = nlohmann::json;

struct BoxRecord {
  GroundTruth gt;
  json extra = json::object();
};

struct AnnotationRecord {
  std::string frame_id;
  std::string sequence_id;
  std::optional<std::int64_t> index;
  std::vector<BoxRecord> boxes;
  json extra = json::object();
};

namespace detail {

class LineContext {
 public:
  LineContext(std::size_t line, const std::string& source) : line_(line), source_(source) {}

  [[nodiscard]] ParseError error(ParseErrorKind k, const std::string& msg) const {
    return ParseError(k, LocationKind::Line, line_, msg, source_);
  }

  double number(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) throw error(ParseErrorKind::Malformed, std::string("missing field \"") + key + "\"");
    if (!it->is_number()) throw error(ParseErrorKind::Malformed, std::string("field \"") + key + "\" must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw error(ParseErrorKind::InvalidValue, std::string("field \"") + key + "\" must be finite");
    return v;
  }

  std::string string(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) throw error(ParseErrorKind::Malformed, std::string("missing field \"") + key + "\"");
    if (!it->is_string()) throw error(ParseErrorKind::Malformed, std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
  }

  Box3D box(const json& obj) const {
    Box3D b{number(obj, "cx"), number(obj, "cy"), number(obj, "cz"),
            number(obj, "l"),  number(obj, "w"),  number(obj, "h"),
            number(obj, "yaw")};
    if (!(b.l > 0.0 && b.w > 0.0 && b.h > 0.0)) throw error(ParseErrorKind::InvalidValue, "box dimensions must be > 0");
    return b;
  }

  json parse(std::string_view text) const {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw error(ParseErrorKind::Malformed, "invalid JSON");
    if (!j.is_object()) throw error(ParseErrorKind::Malformed, "expected a JSON object");
    return j;
  }

 private:
  std::size_t line_;
  const std::string& source_;
};

/// Calls fn(line_number, line) for each non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line_no, line);
    if (end == text.size()) break;
    start = end + 1;
  }
}

inline json box_json(const Box3D& b) {
  return json{{"cx", b.cx}, {"cy", b.cy}, {"cz", b.cz}, {"l", b.l}, {"w", b.w}, {"h", b.h}, {"yaw", b.yaw}};
}

inline json without(json obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) obj.erase(k);
  return obj;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Annotations

inline std::vector<AnnotationRecord> parse_annotations(std::string_view text, const std::string& source = {}) {
  std::vector<AnnotationRecord> out;
  std::set<std::pair<std::string, std::string>> seen_tracks;
  std::set<std::string> seen_frames;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const detail::LineContext ctx(line_no, source);
    const json j = ctx.parse(line);
    AnnotationRecord rec;
    rec.frame_id = ctx.string(j, "frame_id");
    rec.sequence_id = ctx.string(j, "sequence_id");
    if (auto it = j.find("index"); it != j.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw ctx.error(ParseErrorKind::InvalidValue, "\"index\" must be a non-negative integer");
      }
      rec.index = it->get<std::int64_t>();
    }
    if (!seen_frames.insert(rec.frame_id).second) {
      throw ctx.error(ParseErrorKind::Duplicate, "frame \"" + rec.frame_id + "\" appears twice");
    }
    auto boxes = j.find("boxes");
    if (boxes == j.end() || !boxes->is_array()) throw ctx.error(ParseErrorKind::Malformed, "\"boxes\" must be an array");
    for (const json& b : *boxes) {
      if (!b.is_object()) throw ctx.error(ParseErrorKind::Malformed, "box entries must be objects");
      BoxRecord br;
      br.gt.box = ctx.box(b);
      const std::string occ = ctx.string(b, "occlusion");
      const auto parsed = parse_occlusion(occ);
      if (!parsed) throw ctx.error(ParseErrorKind::InvalidValue, "unknown occlusion \"" + occ + "\"");
      br.gt.occlusion = *parsed;
      br.gt.track_id = ctx.string(b, "track_id");
      if (!seen_tracks.insert({rec.frame_id, br.gt.track_id}).second) {
        throw ctx.error(ParseErrorKind::Duplicate,
                        "track \"" + br.gt.track_id + "\" repeated in frame \"" + rec.frame_id + "\"");
      }
      br.extra = detail::without(b, {"cx", "cy", "cz", "l", "w", "h", "yaw", "occlusion", "track_id"});
      rec.boxes.push_back(std::move(br));
    }
    rec.extra = detail::without(j, {"frame_id", "sequence_id", "index", "boxes"});
    out.push_back(std::move(rec));
  });
  return out;
}

inline std::string format_annotation(const AnnotationRecord& rec) {
  json j = rec.extra.is_object() ? rec.extra : json::object();
  j["frame_id"] = rec.frame_id;
  j["sequence_id"] = rec.sequence_id;
  if (rec.index) j["index"] = *rec.index;
  json boxes = json::array();
  for (const BoxRecord& br : rec.boxes) {
    json b = br.extra.is_object() ? br.extra : json::object();
    b.update(detail::box_json(br.gt.box));
    b["occlusion"] = std::string(to_string(br.gt.occlusion));
    b["track_id"] = br.gt.track_id;
    boxes.push_back(std::move(b));
  }
  j["boxes"] = std::move(boxes);
  return j.dump();
}

inline std::string format_annotations(std::span<const AnnotationRecord> records) {
  std::string out;
  for (const auto& r : records) out += format_annotation(r) + "\n";
  return out;
}

inline std::vector<AnnotationRecord> read_annotations(const fs::path& path) {
  return parse_annotations(read_text(path), path.string());
}

inline void write_annotations(const fs::path& path, std::span<const AnnotationRecord> records) {
  write_text(path, format_annotations(records));
}

inline AnnotationRecord annotation_from_frame(const FrameSample& f) {
  AnnotationRecord rec;
  rec.frame_id = f.frame_id;
  rec.sequence_id = f.sequence_id;
  rec.index = f.index_in_sequence;
  for (const GroundTruth& gt : f.ground_truth) rec.boxes.push_back({gt, json::object()});
  return rec;
}

// ---------------------------------------------------------------------------
// Detections

using DetectionMap = std::map<std::string, std::vector<Detection>>;

inline DetectionMap parse_detections(std::string_view text, const std::string& source = {}) {
  DetectionMap out;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const detail::LineContext ctx(line_no, source);
    const json j = ctx.parse(line);
    Detection d;
    d.frame_id = ctx.string(j, "frame_id");
    d.box = ctx.box(j);
    d.score = ctx.number(j, "score");
    if (d.score < 0.0 || d.score > 1.0) throw ctx.error(ParseErrorKind::InvalidValue, "score must lie in [0,1]");
    out[d.frame_id].push_back(std::move(d));
  });
  return out;
}

inline std::string format_detection(const Detection& d) {
  json j = detail::box_json(d.box);
  j["frame_id"] = d.frame_id;
  j["score"] = d.score;
  return j.dump();
}

inline std::string format_detections(const DetectionMap& dets) {
  std::string out;
  for (const auto& [frame, list] : dets) {
    for (const Detection& d : list) out += format_detection(d) + "\n";
  }
  return out;
}

inline DetectionMap read_detections(const fs::path& path) { return parse_detections(read_text(path), path.string()); }

inline void write_detections(const fs::path& path, const DetectionMap& dets) {
  write_text(path, format_detections(dets));
}

// ---------------------------------------------------------------------------
// Calibrations

inline std::string format_calibrations(std::span<const Calibration> calibs) {
  json arr = json::array();
  for (const Calibration& c : calibs) {
    arr.push_back({{"camera_id", c.camera_id}, {"rotation", c.rotation}, {"translation", c.translation}});
  }
  return json{{"calibrations", arr}}.dump(2) + "\n";
}

inline std::vector<Calibration> parse_calibrations(std::string_view text, const std::string& source = {}) {
  const detail::LineContext ctx(1, source);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ctx.error(ParseErrorKind::Malformed, "invalid calibration JSON");
  auto arr = j.find("calibrations");
  if (arr == j.end() || !arr->is_array()) throw ctx.error(ParseErrorKind::Malformed, "\"calibrations\" must be an array");
  std::vector<Calibration> out;
  for (const json& c : *arr) {
    if (!c.is_object()) throw ctx.error(ParseErrorKind::Malformed, "calibration entries must be objects");
    Calibration cal;
    cal.camera_id = ctx.string(c, "camera_id");
    auto r = c.find("rotation");
    auto t = c.find("translation");
    if (r == c.end() || !r->is_array() || r->size() != 9) throw ctx.error(ParseErrorKind::Malformed, "rotation needs 9 numbers");
    if (t == c.end() || !t->is_array() || t->size() != 3) throw ctx.error(ParseErrorKind::Malformed, "translation needs 3 numbers");
    for (std::size_t i = 0; i < 9; ++i) {
      if (!(*r)[i].is_number()) throw ctx.error(ParseErrorKind::Malformed, "rotation entries must be numbers");
      cal.rotation[i] = (*r)[i].get<double>();
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(*t)[i].is_number()) throw ctx.error(ParseErrorKind::Malformed, "translation entries must be numbers");
      cal.translation[i] = (*t)[i].get<double>();
    }
    out.push_back(std::move(cal));
  }
  return out;
}

inline std::vector<Calibration> read_calibrations(const fs::path& path) {
  return parse_calibrations(read_text(path), path.string());
}

inline void write_calibrations(const fs::path& path, std::span<const Calibration> calibs) {
  write_text(path, format_calibrations(calibs));
}

}  // namespace r3bench::io
