#pragma once

// JRDB-style dataset directory adapter.
//
// A dataset root holds one directory tree per split. The path of every file is
// produced from a pattern in the layout config (layout.json at the root, all
// keys optional):
//
//   {
//     "labels_dir": "{split}/labels",                       // <sequence>.jsonl per sequence
//     "cloud":      "{split}/pointclouds/{sequence}/{index}.r3pc",
//     "image":      "{split}/images/{camera}/{sequence}/{index}.ppm",
//     "calib":      "{split}/calib/{sequence}/{index}.json",
//     "cameras":    ["cam0", "cam1", "cam2", "cam3", "cam4"],
//     "index_width": 6,                                     // zero padding of {index}
//     "yaw_sign": 1.0, "yaw_offset_rad": 0.0,               // yaw = sign * yaw_file + offset
//     "strict": true                                        // missing modality: error vs. skip
//   }
//
// Sequences are visited in lexicographic order of their label file names and
// frames in ascending index ("index" field, else line order).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "r3bench/core/types.hpp"
#include "r3bench/core/validate.hpp"
#include "r3bench/io/cloud_io.hpp"
#include "r3bench/io/errors.hpp"
#include "r3bench/io/file.hpp"
#include "r3bench/io/image_io.hpp"
#include "r3bench/io/records.hpp"

namespace r3bench::io {

inline constexpr const char* kLayoutFile = "layout.json";

struct LayoutConfig {
  std::string labels_dir = "{split}/labels";
  std::string cloud = "{split}/pointclouds/{sequence}/{index}.r3pc";
  std::string image = "{split}/images/{camera}/{sequence}/{index}.ppm";
  std::string calib = "{split}/calib/{sequence}/{index}.json";
  std::vector<std::string> cameras{"cam0", "cam1", "cam2", "cam3", "cam4"};
  int index_width = 6;
  double yaw_sign = 1.0;
  double yaw_offset_rad = 0.0;
  bool strict = true;

  json to_json() const {
    return json{{"labels_dir", labels_dir}, {"cloud", cloud},       {"image", image},
                {"calib", calib},           {"cameras", cameras},   {"index_width", index_width},
                {"yaw_sign", yaw_sign},     {"yaw_offset_rad", yaw_offset_rad}, {"strict", strict}};
  }

  static LayoutConfig from_json(const json& j, const std::string& source = {}) {
    LayoutConfig c;
    try {
      if (!j.is_object()) throw json::type_error::create(302, "layout must be an object", nullptr);
      c.labels_dir = j.value("labels_dir", c.labels_dir);
      c.cloud = j.value("cloud", c.cloud);
      c.image = j.value("image", c.image);
      c.calib = j.value("calib", c.calib);
      c.cameras = j.value("cameras", c.cameras);
      c.index_width = j.value("index_width", c.index_width);
      c.yaw_sign = j.value("yaw_sign", c.yaw_sign);
      c.yaw_offset_rad = j.value("yaw_offset_rad", c.yaw_offset_rad);
      c.strict = j.value("strict", c.strict);
    } catch (const json::exception& e) {
      throw ParseError(ParseErrorKind::Malformed, LocationKind::Line, 1, e.what(), source);
    }
    return c;
  }

  /// layout.json under root if present, defaults otherwise.
  static LayoutConfig load(const fs::path& root) {
    const fs::path p = root / kLayoutFile;
    if (!fs::exists(p)) return {};
    const json j = json::parse(read_text(p), nullptr, false);
    if (j.is_discarded()) throw ParseError(ParseErrorKind::Malformed, LocationKind::Line, 1, "invalid JSON", p.string());
    return from_json(j, p.string());
  }

  std::string format_index(std::int64_t index) const {
    std::string s = std::to_string(index);
    if (static_cast<int>(s.size()) < index_width) s.insert(0, static_cast<std::size_t>(index_width) - s.size(), '0');
    return s;
  }

  /// Substitutes {split}, {sequence}, {index} and {camera}.
  std::string expand(std::string pattern, const std::string& split, const std::string& sequence = {},
                     std::optional<std::int64_t> index = std::nullopt, const std::string& camera = {}) const {
    auto replace_all = [&](const std::string& key, const std::string& value) {
      for (std::size_t pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos + value.size())) {
        pattern.replace(pos, key.size(), value);
      }
    };
    replace_all("{split}", split);
    replace_all("{sequence}", sequence);
    if (index) replace_all("{index}", format_index(*index));
    replace_all("{camera}", camera);
    return pattern;
  }

  double to_internal_yaw(double file_yaw) const { return normalize_yaw(yaw_sign * file_yaw + yaw_offset_rad); }
};

using WarningSink = std::function<void(const std::string&)>;

inline void warn_to_stderr(const std::string& msg) { std::fprintf(stderr, "warning: %s\n", msg.c_str()); }

// Lazily yields the frames of one split, sequence by sequence.
class JrdbReader {
 public:
  JrdbReader(fs::path root, std::string split, std::optional<LayoutConfig> config = std::nullopt,
             WarningSink warn = warn_to_stderr)
      : root_(std::move(root)), split_(std::move(split)),
        config_(config ? *config : LayoutConfig::load(root_)), warn_(std::move(warn)) {
    const fs::path labels = root_ / config_.expand(config_.labels_dir, split_);
    if (fs::is_directory(labels)) {
      for (const auto& entry : fs::directory_iterator(labels)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") label_files_.push_back(entry.path());
      }
      std::sort(label_files_.begin(), label_files_.end());
    }
  }

  const LayoutConfig& config() const { return config_; }

  /// Next valid frame, or nullopt at the end of the split.
  std::optional<FrameSample> next() {
    while (true) {
      while (cursor_ >= pending_.size()) {
        if (next_file_ >= label_files_.size()) return std::nullopt;
        load_sequence(label_files_[next_file_++]);
      }
      const AnnotationRecord& rec = pending_[cursor_++];
      if (auto frame = load_frame(rec)) return frame;
    }
  }

  std::vector<FrameSample> read_all() {
    std::vector<FrameSample> out;
    while (auto f = next()) out.push_back(std::move(*f));
    return out;
  }

  /// Frames grouped into sequences, each in index order.
  std::vector<Sequence> read_sequences() {
    std::vector<Sequence> out;
    while (auto f = next()) {
      if (out.empty() || out.back().front().sequence_id != f->sequence_id) out.emplace_back();
      out.back().push_back(std::move(*f));
    }
    return out;
  }

 private:
  void load_sequence(const fs::path& file) {
    pending_ = read_annotations(file);
    cursor_ = 0;
    const std::string sequence = file.stem().string();
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      if (!pending_[i].index) pending_[i].index = static_cast<std::int64_t>(i);
      if (pending_[i].sequence_id != sequence) {
        throw DatasetError("frame " + pending_[i].frame_id + ": sequence_id \"" + pending_[i].sequence_id +
                           "\" does not match label file " + file.string());
      }
    }
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const AnnotationRecord& a, const AnnotationRecord& b) { return *a.index < *b.index; });
  }

  std::optional<FrameSample> missing(const AnnotationRecord& rec, const std::string& what, const fs::path& path) {
    const std::string msg = "frame " + rec.frame_id + ": missing " + what + " (" + path.string() + ")";
    if (config_.strict) throw DatasetError(msg);
    warn_(msg + ", skipped");
    return std::nullopt;
  }

  std::optional<FrameSample> load_frame(const AnnotationRecord& rec) {
    const std::string& seq = rec.sequence_id;
    const std::int64_t index = *rec.index;

    FrameSample f;
    f.frame_id = rec.frame_id;
    f.sequence_id = seq;
    f.index_in_sequence = index;

    const fs::path cloud_path = root_ / config_.expand(config_.cloud, split_, seq, index);
    if (!fs::is_regular_file(cloud_path)) return missing(rec, "point cloud", cloud_path);
    f.cloud = read_cloud(cloud_path);
    f.cloud.frame_id = rec.frame_id;

    if (!config_.cameras.empty()) {
      const fs::path calib_path = root_ / config_.expand(config_.calib, split_, seq, index);
      if (!fs::is_regular_file(calib_path)) return missing(rec, "calibration", calib_path);
      const auto calibs = read_calibrations(calib_path);
      for (const std::string& cam : config_.cameras) {
        const fs::path image_path = root_ / config_.expand(config_.image, split_, seq, index, cam);
        if (!fs::is_regular_file(image_path)) return missing(rec, "image " + cam, image_path);
        f.images.push_back(read_image(image_path, cam));
        auto it = std::find_if(calibs.begin(), calibs.end(), [&](const Calibration& c) { return c.camera_id == cam; });
        if (it == calibs.end()) return missing(rec, "calibration for " + cam, calib_path);
        f.calibrations.push_back(*it);
      }
    }

    for (const BoxRecord& br : rec.boxes) {
      GroundTruth gt = br.gt;
      gt.box.yaw = config_.to_internal_yaw(gt.box.yaw);
      f.ground_truth.push_back(std::move(gt));
    }

    const auto violations = validate_frame(f);
    if (!violations.empty()) {
      const std::string msg =
          "frame " + f.frame_id + ": " + violations.front().field + " violates \"" + violations.front().rule + "\"";
      if (config_.strict) throw DatasetError(msg);
      warn_(msg + ", skipped");
      return std::nullopt;
    }
    return f;
  }

  fs::path root_;
  std::string split_;
  LayoutConfig config_;
  WarningSink warn_;
  std::vector<fs::path> label_files_;
  std::size_t next_file_ = 0;
  std::vector<AnnotationRecord> pending_;
  std::size_t cursor_ = 0;
};

// ---------------------------------------------------------------------------
// Writing

/// Sensor files of one frame (cloud, images, calibration); labels are separate.
inline void write_frame_sensors(const fs::path& root, const std::string& split, const LayoutConfig& cfg,
                                const FrameSample& f) {
  const auto index = f.index_in_sequence;
  write_cloud(f.cloud, root / cfg.expand(cfg.cloud, split, f.sequence_id, index));
  if (cfg.cameras.empty()) return;
  write_calibrations(root / cfg.expand(cfg.calib, split, f.sequence_id, index), f.calibrations);
  for (const CameraImage& img : f.images) {
    write_image(img, root / cfg.expand(cfg.image, split, f.sequence_id, index, img.camera_id));
  }
}

// Writes sequences in the given layout (identity yaw convention assumed) plus
// layout.json. Image camera ids must match cfg.cameras.
inline void write_dataset(const fs::path& root, const std::string& split, std::span<const Sequence> sequences,
                          const LayoutConfig& cfg = {}) {
  fs::create_directories(root);
  write_text(root / kLayoutFile, cfg.to_json().dump(2) + "\n");
  for (const Sequence& seq : sequences) {
    if (seq.empty()) continue;
    std::vector<AnnotationRecord> records;
    for (const FrameSample& f : seq) {
      write_frame_sensors(root, split, cfg, f);
      records.push_back(annotation_from_frame(f));
    }
    write_annotations(root / cfg.expand(cfg.labels_dir, split) / (seq.front().sequence_id + ".jsonl"), records);
  }
}

}  // namespace r3bench::io
