// r3bench command-line tool.
//
//   r3bench [--seed N] [--threads N] [--config file.toml] <command> [options]
//
// Commands: corrupt, eval, sweep, synth, detect, plot. Exit status: 0 success,
// 1 I/O or data error, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "r3bench/r3bench.hpp"

namespace {

using namespace r3bench;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
};

struct DetectorFlags {
  std::string kind = "pseudo";
  std::size_t min_points = PseudoDetectorParams{}.min_points;
  double jitter = PseudoDetectorParams{}.jitter_sigma_m;
  double score_half = PseudoDetectorParams{}.score_half_points;
  double miss = PseudoDetectorParams{}.miss_probability;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--detector", kind, "Detector (only the point-threshold pseudo-detector is built in)")
        ->check(CLI::IsMember({"pseudo"}))
        ->capture_default_str();
    cmd->add_option("--min-points", min_points, "Pseudo-detector: in-box points needed to fire")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--jitter", jitter, "Pseudo-detector: center jitter sigma (m)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--score-half", score_half, "Pseudo-detector: point count giving score 0.5")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--miss", miss, "Pseudo-detector: miss probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }

  PseudoDetectorParams params() const { return {min_points, jitter, score_half, miss}; }
};

std::vector<std::string> corruption_names() {
  std::vector<std::string> names;
  for (CorruptionKind k : kAllCorruptions) names.emplace_back(to_string(k));
  return names;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    double v = 0.0;
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got \"" + item + "\"");
    const std::string value = item.substr(eq + 1);
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      throw UsageError("--param value must be a number, got \"" + item + "\"");
    }
    out[item.substr(0, eq)] = v;
  }
  return out;
}

StrataMode parse_strata(const std::string& s) {
  if (s == "none") return StrataMode::None;
  if (s == "distance") return StrataMode::Distance;
  if (s == "occlusion") return StrataMode::Occlusion;
  if (s == "combined") return StrataMode::Combined;
  return StrataMode::All;
}

Interpolation parse_interpolation(const std::string& s) {
  if (s == "11") return Interpolation::Points11;
  if (s == "40") return Interpolation::Points40;
  return Interpolation::AllPoint;
}

EvalConfig eval_config(const std::vector<double>& iou, const std::string& interpolation) {
  EvalConfig cfg;
  if (iou.size() != 2) throw UsageError("--iou expects exactly two thresholds, e.g. 0.3,0.5");
  for (double t : iou) {
    if (!(t > 0.0 && t < 1.0)) throw UsageError("IoU thresholds must lie in (0,1)");
  }
  cfg.iou_thresholds = {iou[0], iou[1]};
  cfg.interpolation = parse_interpolation(interpolation);
  return cfg;
}

// "all", a modality ("lidar", "camera", "cross"), or a comma list of
// kind[:level] items.
std::vector<CorruptionSpec> parse_grid(const std::string& grid) {
  if (grid == "all") return full_grid();
  if (grid == "lidar") return grid_for(Modality::Lidar);
  if (grid == "camera") return grid_for(Modality::Camera);
  if (grid == "cross") return grid_for(Modality::CrossModal);
  if (grid == "none") return {};
  std::vector<CorruptionSpec> out;
  std::stringstream ss(grid);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    const std::string name = item.substr(0, colon);
    const auto kind = parse_corruption_kind(name);
    if (!kind) {
      std::string valid;
      for (const auto& n : corruption_names()) valid += (valid.empty() ? "" : ", ") + n;
      throw UsageError("unknown corruption \"" + name + "\"; valid: " + valid);
    }
    if (colon == std::string::npos) {
      for (Severity s : kAllSeverities) out.push_back({*kind, s, {}});
      continue;
    }
    const std::string lvl = item.substr(colon + 1);
    const auto sev = lvl.size() == 1 ? severity_from_level(lvl[0] - '0') : std::nullopt;
    if (!sev) throw UsageError("severity in \"" + item + "\" must be 1, 2 or 3");
    out.push_back({*kind, *sev, {}});
  }
  return out;
}

std::vector<Sequence> load_dataset(const fs::path& root, const std::string& split) {
  if (!fs::is_directory(root)) throw io::IoError("dataset root " + root.string() + " is not a directory");
  io::JrdbReader reader(root, split);
  return reader.read_sequences();
}

std::size_t frame_count(const std::vector<Sequence>& data) {
  std::size_t n = 0;
  for (const auto& s : data) n += s.size();
  return n;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text(path, text);
  }
}

// ---------------------------------------------------------------------------
// corrupt

struct CorruptCmd {
  std::string input, output, split = "train", corruption;
  int severity = 1;
  std::vector<std::string> params;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--input", input, "Input dataset root")->required();
    cmd->add_option("--output", output, "Output dataset root")->required();
    cmd->add_option("--split", split, "Split to corrupt")->capture_default_str();
    cmd->add_option("--corruption", corruption, "Corruption kind")
        ->required()
        ->check(CLI::IsMember(corruption_names()));
    cmd->add_option("--severity", severity, "Severity level")->required()->check(CLI::Range(1, 3));
    cmd->add_option("--param", params, "Parameter override key=value (repeatable)");
  }

  int run(const Globals& g) const {
    const CorruptionSpec spec{*parse_corruption_kind(corruption), *severity_from_level(severity), parse_params(params)};
    const fs::path in(input), out(output);
    if (fs::exists(out) && fs::equivalent(in, out)) throw UsageError("--output must differ from --input");
    const auto data = load_dataset(in, split);
    const auto layout = io::LayoutConfig::load(in);

    struct Ref {
      std::size_t seq, index;
    };
    std::vector<Ref> refs;
    for (std::size_t s = 0; s < data.size(); ++s) {
      for (std::size_t i = 0; i < data[s].size(); ++i) refs.push_back({s, i});
    }
    const SeedPolicy policy{g.seed};
    parallel_for(refs.size(), g.threads, [&](std::size_t k) {
      const auto& seq = data[refs[k].seq];
      const auto frame = corrupt_frame(seq, static_cast<std::int64_t>(refs[k].index), spec, policy);
      io::write_frame_sensors(out, split, layout, frame);
    });

    // Labels and layout are copied verbatim.
    const fs::path layout_file = in / io::kLayoutFile;
    if (fs::exists(layout_file)) {
      io::write_bytes(out / io::kLayoutFile, io::read_bytes(layout_file));
    } else {
      io::write_text(out / io::kLayoutFile, layout.to_json().dump(2) + "\n");
    }
    const fs::path labels = in / layout.expand(layout.labels_dir, split);
    if (fs::is_directory(labels)) {
      for (const auto& e : fs::directory_iterator(labels)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") {
          io::write_bytes(out / layout.expand(layout.labels_dir, split) / e.path().filename(),
                          io::read_bytes(e.path()));
        }
      }
    }

    json overrides = json::object();
    for (const auto& [k, v] : spec.overrides) overrides[k] = v;
    const json manifest{{"corruption", corruption}, {"severity", severity},  {"seed", g.seed},
                        {"split", split},           {"frames", refs.size()}, {"overrides", overrides},
                        {"tool_version", kVersion}};
    io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "corrupted " << refs.size() << " frames (" << corruption << ", severity " << severity << ") -> "
              << output << "\n";
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// eval

struct EvalCmd {
  std::string gt, detections, split = "train", strata = "none", out, format = "csv", interpolation = "all";
  std::string label = std::string(kBaselineName);
  int level = 0;
  std::vector<double> iou{0.3, 0.5};

  void add_to(CLI::App* cmd) {
    cmd->add_option("--gt", gt, "Ground-truth dataset root")->required();
    cmd->add_option("--detections", detections, "Detections file (.jsonl)")->required();
    cmd->add_option("--split", split, "Split to evaluate")->capture_default_str();
    cmd->add_option("--iou", iou, "Two IoU thresholds, primary first")->delimiter(',')->capture_default_str();
    cmd->add_option("--strata", strata, "Stratification")
        ->check(CLI::IsMember({"none", "distance", "occlusion", "combined", "all"}))
        ->capture_default_str();
    cmd->add_option("--interpolation", interpolation, "PR interpolation: all (all-point), 11 or 40")
        ->check(CLI::IsMember({"all", "11", "40"}))
        ->capture_default_str();
    cmd->add_option("--label", label, "Corruption name written to the report rows")->capture_default_str();
    cmd->add_option("--level", level, "Level written to the report rows")->capture_default_str();
    cmd->add_option("--out", out, "Report path (stdout when omitted)");
    cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }

  int run(const Globals&) const {
    const EvalConfig cfg = eval_config(iou, interpolation);
    const auto data = load_dataset(gt, split);
    const auto dets = io::read_detections(detections);
    std::vector<FrameSample> frames;
    std::vector<std::vector<Detection>> per_frame;
    std::set<std::string> known;
    for (const auto& seq : data) {
      for (const auto& f : seq) {
        known.insert(f.frame_id);
        auto it = dets.find(f.frame_id);
        per_frame.push_back(it == dets.end() ? std::vector<Detection>{} : it->second);
        frames.push_back(f);
      }
    }
    for (const auto& [frame, list] : dets) {
      if (!known.count(frame)) {
        std::cerr << "warning: " << list.size() << " detections for unknown frame " << frame << " ignored\n";
      }
    }
    EvalReport report;
    report.iou_thresholds = cfg.iou_thresholds;
    report.rows = to_rows(label, level,
                          stratify(std::span<const FrameSample>(frames), per_frame, cfg, parse_strata(strata)));
    write_output(out, io::format_report(report, format == "csv" ? io::ReportFormat::Csv : io::ReportFormat::Json));
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// sweep

struct SweepCmd {
  std::string input, split = "train", grid = "all", strata = "none", out, format = "csv", interpolation = "all";
  std::vector<double> iou{0.3, 0.5};
  DetectorFlags detector;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--input", input, "Dataset root")->required();
    cmd->add_option("--split", split, "Split")->capture_default_str();
    cmd->add_option("--grid", grid, "all | lidar | camera | cross | none | kind[:level],...")->capture_default_str();
    cmd->add_option("--iou", iou, "Two IoU thresholds, primary first")->delimiter(',')->capture_default_str();
    cmd->add_option("--strata", strata, "Stratification")
        ->check(CLI::IsMember({"none", "distance", "occlusion", "combined", "all"}))
        ->capture_default_str();
    cmd->add_option("--interpolation", interpolation, "PR interpolation: all, 11 or 40")
        ->check(CLI::IsMember({"all", "11", "40"}))
        ->capture_default_str();
    cmd->add_option("--out", out, "Report path (stdout when omitted)");
    cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    detector.add_to(cmd);
  }

  int run(const Globals& g) const {
    const EvalConfig cfg = eval_config(iou, interpolation);
    const auto specs = parse_grid(grid);
    const auto data = load_dataset(input, split);
    const auto report = run_degradation_experiment(data, specs, detector.params(), cfg, g.seed,
                                                   {g.threads, parse_strata(strata)});
    write_output(out, io::format_report(report, format == "csv" ? io::ReportFormat::Csv : io::ReportFormat::Json));
    if (!out.empty()) {
      std::cout << "swept " << specs.size() << " cells over " << frame_count(data) << " frames -> " << out << "\n";
    }
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// synth

struct SynthCmd {
  std::size_t frames = 10, sequences = 1, cameras = 5, occluders = SceneParams{}.occluders;
  std::string persons = "4..12", out, split = "train";
  double points_scale = SceneParams{}.points_scale;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--frames", frames, "Frames per sequence")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--sequences", sequences, "Number of sequences")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--persons", persons, "Person count range a..b")->capture_default_str();
    cmd->add_option("--cameras", cameras, "Cameras per frame")->capture_default_str();
    cmd->add_option("--occluders", occluders, "Occluder panels per sequence")->capture_default_str();
    cmd->add_option("--points-scale", points_scale, "Expected points on a person at 1 m")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--out", out, "Output dataset root")->required();
    cmd->add_option("--split", split, "Split name")->capture_default_str();
  }

  int run(const Globals& g) const {
    SceneParams p;
    const auto dots = persons.find("..");
    try {
      if (dots == std::string::npos) throw std::invalid_argument("");
      p.persons_min = std::stoul(persons.substr(0, dots));
      p.persons_max = std::stoul(persons.substr(dots + 2));
    } catch (const std::exception&) {
      throw UsageError("--persons expects a range like 4..12, got \"" + persons + "\"");
    }
    p.cameras = cameras;
    p.occluders = occluders;
    p.points_scale = points_scale;
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    std::vector<Sequence> data(sequences);
    parallel_for(sequences, g.threads, [&](std::size_t s) {
      char id[32];
      std::snprintf(id, sizeof id, "seq%03zu", s);
      data[s] = generate_sequence(p, frames, derive_stream_seed(g.seed, id), id);
    });
    io::LayoutConfig layout;
    layout.cameras.clear();
    for (std::size_t c = 0; c < cameras; ++c) layout.cameras.push_back("cam" + std::to_string(c));
    io::write_dataset(out, split, data, layout);
    std::cout << "wrote " << frame_count(data) << " frames in " << sequences << " sequence(s) -> " << out << "\n";
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// detect

struct DetectCmd {
  std::string input, split = "train", out;
  DetectorFlags detector;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--input", input, "Dataset root")->required();
    cmd->add_option("--split", split, "Split")->capture_default_str();
    cmd->add_option("--out", out, "Detections file (.jsonl; stdout when omitted)");
    detector.add_to(cmd);
  }

  int run(const Globals& g) const {
    const auto data = load_dataset(input, split);
    std::vector<const FrameSample*> frames;
    for (const auto& seq : data) {
      for (const auto& f : seq) frames.push_back(&f);
    }
    std::vector<std::vector<Detection>> dets(frames.size());
    const auto params = detector.params();
    parallel_for(frames.size(), g.threads, [&](std::size_t i) {
      dets[i] = pseudo_detect(*frames[i], params, detector_seed(g.seed, frames[i]->frame_id));
    });
    std::string text;
    for (const auto& list : dets) {
      for (const auto& d : list) text += io::format_detection(d) + "\n";
    }
    write_output(out, text);
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// plot

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

constexpr double kW = 720, kH = 420, kL = 60, kR = 180, kT = 40, kB = 50;

std::string svg_frame(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW) + "\" height=\"" + fmt(kH) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kW / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(title) +
       "</text>\n";
  const double x0 = kL, x1 = kW - kR, y0 = kH - kB, y1 = kT;
  s += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x1) + "\" y2=\"" + fmt(y0) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x0) + "\" y2=\"" + fmt(y1) +
       "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = y0 - (y0 - y1) * k / 4.0;
    s += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" + std::to_string(25 * k) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(kH - 12) + "\" text-anchor=\"middle\">" +
       xml_escape(xlabel) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt((y0 + y1) / 2) + "\" transform=\"rotate(-90 16 " + fmt((y0 + y1) / 2) +
       ")\" text-anchor=\"middle\">" + xml_escape(ylabel) + "</text>\n";
  return s;
}

double plot_y(double ap) { return (kH - kB) - (kH - kB - kT) * std::clamp(ap, 0.0, 100.0) / 100.0; }

// AP against severity, one series per corruption; the baseline sits at level 0.
std::string severity_chart(const EvalReport& r, bool primary, const std::string& metric) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReportRow*>> series;
  for (const ReportRow& row : r.rows) {
    if (row.stratum != "all") continue;
    if (!series.count(row.corruption)) order.push_back(row.corruption);
    series[row.corruption].push_back(&row);
  }
  std::string s = svg_frame(metric + " vs severity", "severity level", metric);
  const double x0 = kL, x1 = kW - kR;
  auto px = [&](int level) { return x0 + (x1 - x0) * (0.05 + 0.9 * level / 3.0); };
  for (int level = 0; level <= 3; ++level) {
    s += "<text x=\"" + fmt(px(level)) + "\" y=\"" + fmt(kH - kB + 16) + "\" text-anchor=\"middle\">" +
         (level == 0 ? std::string("none") : std::to_string(level)) + "</text>\n";
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    auto rows = series[order[i]];
    std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->level < b->level; });
    std::string points;
    for (const ReportRow* row : rows) {
      points += (points.empty() ? "" : " ") + fmt(px(row->level)) + "," +
                fmt(plot_y(primary ? row->ap_primary : row->ap_strict));
    }
    if (rows.size() > 1) {
      s += "<polyline class=\"series\" fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"" + points +
           "\"/>\n";
    }
    for (const ReportRow* row : rows) {
      const double ap = primary ? row->ap_primary : row->ap_strict;
      s += "<circle class=\"point\" cx=\"" + fmt(px(row->level)) + "\" cy=\"" + fmt(plot_y(ap)) +
           "\" r=\"4\" fill=\"" + color + "\"><title>" + xml_escape(row->corruption) + " level " +
           std::to_string(row->level) + ": " + fmt(ap) + "</title></circle>\n";
    }
    const double ly = kT + 16.0 * static_cast<double>(i);
    s += "<rect x=\"" + fmt(kW - kR + 12) + "\" y=\"" + fmt(ly) + "\" width=\"10\" height=\"10\" fill=\"" + color +
         "\"/><text x=\"" + fmt(kW - kR + 28) + "\" y=\"" + fmt(ly + 9) + "\">" + xml_escape(order[i]) + "</text>\n";
  }
  return s + "</svg>\n";
}

// AP per stratum for one report cell (the baseline when present).
std::string strata_chart(const EvalReport& r, bool primary, const std::string& metric) {
  const ReportRow& first = r.rows.front();
  std::string corruption = first.corruption;
  int level = first.level;
  for (const ReportRow& row : r.rows) {
    if (row.corruption == kBaselineName) {
      corruption = row.corruption;
      level = row.level;
      break;
    }
  }
  std::vector<const ReportRow*> rows;
  for (const ReportRow& row : r.rows) {
    if (row.corruption == corruption && row.level == level) rows.push_back(&row);
  }
  const std::string cell = corruption == kBaselineName ? "clean" : corruption + " level " + std::to_string(level);
  std::string s = svg_frame(metric + " by stratum (" + cell + ")", "stratum", metric);
  const double x0 = kL, x1 = kW - kR;
  const double slot = (x1 - x0) / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double ap = primary ? rows[i]->ap_primary : rows[i]->ap_strict;
    const double x = x0 + slot * (static_cast<double>(i) + 0.15);
    const double y = plot_y(ap);
    s += "<rect class=\"bar\" x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(slot * 0.7) +
         "\" height=\"" + fmt(kH - kB - y) + "\" fill=\"" + kPalette[i % std::size(kPalette)] + "\"><title>" +
         xml_escape(rows[i]->stratum) + ": " + fmt(ap) + (rows[i]->n_gt == 0 ? " (empty)" : "") +
         "</title></rect>\n";
    s += "<text x=\"" + fmt(x + slot * 0.35) + "\" y=\"" + fmt(kH - kB + 16) +
         "\" text-anchor=\"middle\" font-size=\"10\">" + xml_escape(rows[i]->stratum) + "</text>\n";
  }
  return s + "</svg>\n";
}

struct PlotCmd {
  std::string report, out;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--report", report, "Report CSV")->required();
    cmd->add_option("--out", out, "Output directory for the SVG files")->required();
  }

  int run(const Globals&) const {
    const auto r = io::read_report_csv(report);
    if (r.rows.empty()) throw io::IoError("report " + report + " has no rows; nothing to plot");
    const bool has_all = std::any_of(r.rows.begin(), r.rows.end(), [](const ReportRow& x) { return x.stratum == "all"; });
    if (!has_all) throw io::IoError("report " + report + " has no \"all\" stratum rows");
    for (std::size_t t = 0; t < 2; ++t) {
      const std::string metric = io::ap_column(r.iou_thresholds[t]);
      io::write_text(fs::path(out) / ("severity_" + metric + ".svg"), severity_chart(r, t == 0, metric));
      io::write_text(fs::path(out) / ("strata_" + metric + ".svg"), strata_chart(r, t == 0, metric));
    }
    std::cout << "wrote 4 plots -> " << out << "\n";
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"r3bench: corruption robustness benchmark for 3D person detection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags override it");
  app.set_version_flag("--version", std::string(r3bench::kVersion));

  Globals g;
  app.add_option("--seed", g.seed, "Global seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (never changes output)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CorruptCmd corrupt;
  EvalCmd eval;
  SweepCmd sweep;
  SynthCmd synth;
  DetectCmd detect;
  PlotCmd plot;
  corrupt.add_to(app.add_subcommand("corrupt", "Write a corrupted copy of a dataset"));
  eval.add_to(app.add_subcommand("eval", "Evaluate detections against a dataset"));
  sweep.add_to(app.add_subcommand("sweep", "Run the pseudo-detector over a corruption grid"));
  synth.add_to(app.add_subcommand("synth", "Generate a synthetic dataset"));
  detect.add_to(app.add_subcommand("detect", "Run the pseudo-detector and write detections"));
  plot.add_to(app.add_subcommand("plot", "Render SVG charts from a report CSV"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  // Globals plus the chosen command's options.
  std::istringstream all(app.config_to_str(true, false));
  std::cerr << "# resolved configuration\n";
  for (std::string line; std::getline(all, line);) {
    const auto dot = line.find('.'), eq = line.find('=');
    if (dot > eq || line.compare(0, name.size() + 1, name + ".") == 0) std::cerr << line << "\n";
  }
  std::cerr << "# end configuration\n";

  try {
    if (name == "corrupt") return corrupt.run(g);
    if (name == "eval") return eval.run(g);
    if (name == "sweep") return sweep.run(g);
    if (name == "synth") return synth.run(g);
    if (name == "detect") return detect.run(g);
    return plot.run(g);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
}
