#pragma once

// Stratified average-precision protocol for 3D person detection.
//
// Ground truth is eligible when its box holds more than 10 cloud points and its
// center lies within 25 m (horizontal) of the sensor; everything else is
// "ignored": detections landing on it count neither as TP nor FP. Detections
// are matched greedily by descending score to the unmatched eligible box of
// highest 3D IoU. AP is the exact area under the all-point interpolated
// precision/recall step curve.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "r3bench/core/types.hpp"
#include "r3bench/geometry.hpp"

namespace r3bench {

enum class DistanceBin { Near, Mid, Far, OutOfRange };
enum class OcclusionBin { None, Partial, Heavy };
enum class Interpolation { AllPoint, Points11, Points40 };

inline std::string_view to_string(DistanceBin b) {
  switch (b) {
    case DistanceBin::Near: return "near";
    case DistanceBin::Mid: return "mid";
    case DistanceBin::Far: return "far";
    case DistanceBin::OutOfRange: return "out_of_range";
  }
  return "?";
}

inline std::string_view to_string(OcclusionBin b) {
  switch (b) {
    case OcclusionBin::None: return "none";
    case OcclusionBin::Partial: return "partial";
    case OcclusionBin::Heavy: return "heavy";
  }
  return "?";
}

struct EvalConfig {
  // First entry is the primary threshold; report TP/FP counts refer to it.
  std::array<double, 2> iou_thresholds{0.3, 0.5};
  // "More than 10 points".
  std::size_t min_points = 11;
  double max_range_m = 25.0;
  // Bin edges: near [e0, e1), mid [e1, e2), far [e2, e3].
  std::array<double, 4> distance_edges{0.0, 3.0, 7.0, 25.0};
  // Indexed by Occlusion enumerator.
  std::array<OcclusionBin, 4> occlusion_map{OcclusionBin::None, OcclusionBin::Partial,
                                            OcclusionBin::Heavy, OcclusionBin::Heavy};
  Interpolation interpolation = Interpolation::AllPoint;
  // An unmatched detection borrows the occlusion bin of the eligible box it
  // overlaps most, provided IoU >= factor * threshold.
  double fp_attribution_iou_factor = 0.5;
};

inline DistanceBin distance_bin(const Box3D& box, const EvalConfig& cfg = {}) {
  const double d = box.horizontal_range();
  const auto& e = cfg.distance_edges;
  if (d < e[0]) return DistanceBin::OutOfRange;
  if (d < e[1]) return DistanceBin::Near;
  if (d < e[2]) return DistanceBin::Mid;
  if (d <= e[3]) return DistanceBin::Far;
  return DistanceBin::OutOfRange;
}

inline OcclusionBin occlusion_bin(const GroundTruth& gt, const EvalConfig& cfg = {}) {
  return cfg.occlusion_map[static_cast<std::size_t>(gt.occlusion)];
}

// ---------------------------------------------------------------------------
// Ground-truth filtering

struct GroundTruthSplit {
  std::vector<std::size_t> eligible;  // indices into frame.ground_truth
  std::vector<std::size_t> ignored;
};

inline bool is_eligible(std::size_t n_points, const Box3D& box, const EvalConfig& cfg) {
  return n_points >= cfg.min_points && box.horizontal_range() <= cfg.max_range_m;
}

// Occlusion does not affect eligibility, only stratification.
inline GroundTruthSplit filter_ground_truth(const FrameSample& frame, const EvalConfig& cfg = {}) {
  GroundTruthSplit split;
  for (std::size_t i = 0; i < frame.ground_truth.size(); ++i) {
    const Box3D& box = frame.ground_truth[i].box;
    if (box.horizontal_range() <= cfg.max_range_m && is_eligible(points_in_box(frame.cloud, box), box, cfg)) {
      split.eligible.push_back(i);
    } else {
      split.ignored.push_back(i);
    }
  }
  return split;
}

// ---------------------------------------------------------------------------
// Matching

enum class Outcome { TruePositive, FalsePositive, Ignored };

struct DetectionMatch {
  Outcome outcome = Outcome::FalsePositive;
  double score = 0.0;
  std::optional<std::size_t> gt;            // matched eligible box (TP only)
  std::optional<std::size_t> nearest_gt;    // FP attribution candidate
};

struct MatchResult {
  std::vector<DetectionMatch> detections;   // parallel to the input detections
  std::vector<bool> gt_matched;             // parallel to frame.ground_truth
  std::size_t n_eligible = 0;

  std::size_t count(Outcome o) const {
    return static_cast<std::size_t>(std::count_if(
        detections.begin(), detections.end(), [o](const DetectionMatch& m) { return m.outcome == o; }));
  }
};

/// Dense IoU table, row per detection, column per ground-truth box.
struct IouTable {
  std::size_t n_gt = 0;
  std::vector<double> values;

  double at(std::size_t det, std::size_t gt) const { return values[det * n_gt + gt]; }
};

inline IouTable compute_iou_table(std::span<const Detection> dets, std::span<const GroundTruth> gts) {
  IouTable t;
  t.n_gt = gts.size();
  t.values.resize(dets.size() * gts.size());
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t g = 0; g < gts.size(); ++g) t.values[d * gts.size() + g] = iou_3d(dets[d].box, gts[g].box);
  }
  return t;
}

/// Processing order: descending score, ties by input position.
inline std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

inline MatchResult match_detections(std::span<const Detection> dets, const IouTable& iou,
                                    const GroundTruthSplit& split, double iou_threshold,
                                    double attribution_factor = 0.5) {
  MatchResult r;
  r.detections.resize(dets.size());
  r.gt_matched.assign(iou.n_gt, false);
  r.n_eligible = split.eligible.size();

  for (std::size_t d : score_order(dets)) {
    DetectionMatch& m = r.detections[d];
    m.score = dets[d].score;

    std::optional<std::size_t> best;
    double best_iou = -1.0;
    std::optional<std::size_t> nearest;
    double nearest_iou = -1.0;
    for (std::size_t g : split.eligible) {
      const double v = iou.at(d, g);
      if (v > nearest_iou) {
        nearest_iou = v;
        nearest = g;
      }
      if (r.gt_matched[g] || v < iou_threshold) continue;
      if (v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (best) {
      m.outcome = Outcome::TruePositive;
      m.gt = best;
      r.gt_matched[*best] = true;
      continue;
    }

    double ignored_iou = 0.0;
    for (std::size_t g : split.ignored) ignored_iou = std::max(ignored_iou, iou.at(d, g));
    if (ignored_iou >= iou_threshold) {
      m.outcome = Outcome::Ignored;
      continue;
    }

    m.outcome = Outcome::FalsePositive;
    if (nearest && nearest_iou > 0.0 && nearest_iou >= attribution_factor * iou_threshold) {
      m.nearest_gt = nearest;
    }
  }
  return r;
}

inline MatchResult match_detections(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                                    const GroundTruthSplit& split, double iou_threshold,
                                    double attribution_factor = 0.5) {
  return match_detections(dets, compute_iou_table(dets, gts), split, iou_threshold,
                          attribution_factor);
}

// ---------------------------------------------------------------------------
// Average precision

struct ScoredOutcome {
  double score = 0.0;
  bool true_positive = false;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double score_threshold = 0.0;
  std::size_t tp = 0;
  std::size_t detections = 0;
  std::size_t n_gt = 0;
};

/// Raw PR curve; one point per distinct score (tied scores enter together).
inline std::vector<PrPoint> pr_curve(std::vector<ScoredOutcome> outcomes, std::size_t n_gt) {
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const ScoredOutcome& a, const ScoredOutcome& b) { return a.score > b.score; });
  std::vector<PrPoint> curve;
  if (n_gt == 0) return curve;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].true_positive) ++tp;
    const bool group_end = i + 1 == outcomes.size() || outcomes[i + 1].score != outcomes[i].score;
    if (!group_end) continue;
    curve.push_back({static_cast<double>(tp) / static_cast<double>(n_gt),
                     static_cast<double>(tp) / static_cast<double>(i + 1), outcomes[i].score, tp, i + 1, n_gt});
  }
  return curve;
}

struct ApResult {
  double ap = 0.0;  // in [0, 1]
  std::size_t n_gt = 0;
  std::size_t n_tp = 0;
  std::size_t n_fp = 0;
  bool empty = false;  // no eligible ground truth; ap reported as 0
};

inline double integrate_pr(const std::vector<PrPoint>& curve, Interpolation mode) {
  if (curve.empty()) return 0.0;
  // Interpolated precision: running maximum from the high-recall end.
  std::vector<double> interp(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    interp[i] = running;
  }
  if (mode == Interpolation::AllPoint) {
    // Sum of (TP gained) x (interpolated precision) over n_gt, accumulated in
    // extended precision from the integer counts and rounded once.
    long double sum = 0.0L;
    long double best = 0.0L;
    std::vector<long double> exact(curve.size());
    for (std::size_t i = curve.size(); i-- > 0;) {
      best = std::max(best, static_cast<long double>(curve[i].tp) / static_cast<long double>(curve[i].detections));
      exact[i] = best;
    }
    std::size_t prev_tp = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      sum += static_cast<long double>(curve[i].tp - prev_tp) * exact[i];
      prev_tp = curve[i].tp;
    }
    return static_cast<double>(sum / static_cast<long double>(curve.front().n_gt));
  }
  // Sampled recall positions: 11-point {0, 0.1, ..., 1}; 40-point {1/40, ..., 1}.
  const int n = mode == Interpolation::Points11 ? 11 : 40;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = mode == Interpolation::Points11 ? k / 10.0 : (k + 1) / 40.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].recall >= r) {
        sum += interp[i];
        break;
      }
    }
  }
  return sum / n;
}

inline ApResult average_precision(std::vector<ScoredOutcome> outcomes, std::size_t n_gt,
                                  Interpolation mode = Interpolation::AllPoint) {
  ApResult r;
  r.n_gt = n_gt;
  for (const auto& o : outcomes) (o.true_positive ? r.n_tp : r.n_fp)++;
  if (n_gt == 0) {
    r.empty = true;
    return r;
  }
  r.ap = integrate_pr(pr_curve(std::move(outcomes), n_gt), mode);
  return r;
}

inline ApResult average_precision(std::span<const MatchResult> frames,
                                  Interpolation mode = Interpolation::AllPoint) {
  std::vector<ScoredOutcome> outcomes;
  std::size_t n_gt = 0;
  for (const MatchResult& f : frames) {
    n_gt += f.n_eligible;
    for (const DetectionMatch& m : f.detections) {
      if (m.outcome == Outcome::Ignored) continue;
      outcomes.push_back({m.score, m.outcome == Outcome::TruePositive});
    }
  }
  return average_precision(std::move(outcomes), n_gt, mode);
}

// ---------------------------------------------------------------------------
// Stratification

enum class StrataMode { None, Distance, Occlusion, Combined, All };

struct Stratum {
  std::optional<DistanceBin> distance;
  std::optional<OcclusionBin> occlusion;

  std::string name() const {
    if (!distance && !occlusion) return "all";
    if (!occlusion) return std::string(to_string(*distance));
    if (!distance) return std::string(to_string(*occlusion));
    return std::string(to_string(*distance)) + "/" + std::string(to_string(*occlusion));
  }

  friend bool operator==(const Stratum&, const Stratum&) = default;
};

/// Strata in report order: all, distance rows, occlusion rows, combined rows.
inline std::vector<Stratum> strata_for(StrataMode mode) {
  static constexpr std::array<DistanceBin, 3> kDist{DistanceBin::Near, DistanceBin::Mid, DistanceBin::Far};
  static constexpr std::array<OcclusionBin, 3> kOcc{OcclusionBin::None, OcclusionBin::Partial,
                                                    OcclusionBin::Heavy};
  std::vector<Stratum> out{Stratum{}};
  const bool dist = mode == StrataMode::Distance || mode == StrataMode::All;
  const bool occ = mode == StrataMode::Occlusion || mode == StrataMode::All;
  const bool comb = mode == StrataMode::Combined || mode == StrataMode::All;
  if (dist) for (auto d : kDist) out.push_back({d, std::nullopt});
  if (occ) for (auto o : kOcc) out.push_back({std::nullopt, o});
  if (comb) {
    for (auto d : kDist) {
      for (auto o : kOcc) out.push_back({d, o});
    }
  }
  return out;
}

// Ground truth of one frame, filtered and binned once, reusable across many
// detection sets (e.g. one per corruption cell).
struct PreparedFrame {
  std::string frame_id;
  std::vector<GroundTruth> ground_truth;
  GroundTruthSplit split;
  std::vector<DistanceBin> gt_distance;
  std::vector<OcclusionBin> gt_occlusion;
};

inline PreparedFrame prepare_frame(const FrameSample& frame, const EvalConfig& cfg = {}) {
  PreparedFrame p;
  p.frame_id = frame.frame_id;
  p.ground_truth = frame.ground_truth;
  p.split = filter_ground_truth(frame, cfg);
  for (const GroundTruth& gt : frame.ground_truth) {
    p.gt_distance.push_back(distance_bin(gt.box, cfg));
    p.gt_occlusion.push_back(occlusion_bin(gt, cfg));
  }
  return p;
}

struct StratumResult {
  Stratum stratum;
  std::array<ApResult, 2> ap;  // parallel to EvalConfig::iou_thresholds
};

namespace detail {

inline bool gt_in_stratum(const PreparedFrame& f, std::size_t g, const Stratum& s) {
  if (s.distance && f.gt_distance[g] != *s.distance) return false;
  if (s.occlusion && f.gt_occlusion[g] != *s.occlusion) return false;
  return true;
}

// Globally unmatched detections: the distance criterion uses the detection's
// own box; the occlusion criterion uses the attributed nearest eligible box and
// excludes the detection when there is none.
inline bool fp_in_stratum(const PreparedFrame& f, const Detection& det, const DetectionMatch& m,
                          const Stratum& s, const EvalConfig& cfg) {
  if (s.distance && distance_bin(det.box, cfg) != *s.distance) return false;
  if (s.occlusion) {
    if (!m.nearest_gt) return false;
    if (f.gt_occlusion[*m.nearest_gt] != *s.occlusion) return false;
  }
  return true;
}

}  // namespace detail

struct FrameMatches {
  std::array<MatchResult, 2> by_threshold;
};

inline FrameMatches match_frame(const PreparedFrame& f, std::span<const Detection> dets,
                                const EvalConfig& cfg) {
  const IouTable iou = compute_iou_table(dets, f.ground_truth);
  FrameMatches m;
  for (std::size_t t = 0; t < 2; ++t) {
    m.by_threshold[t] = match_detections(dets, iou, f.split, cfg.iou_thresholds[t],
                                         cfg.fp_attribution_iou_factor);
  }
  return m;
}

inline std::vector<StratumResult> stratify(std::span<const PreparedFrame> frames,
                                           std::span<const std::vector<Detection>> dets_per_frame,
                                           const EvalConfig& cfg, StrataMode mode) {
  std::vector<FrameMatches> matches;
  matches.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    matches.push_back(match_frame(frames[i], dets_per_frame[i], cfg));
  }

  std::vector<StratumResult> out;
  for (const Stratum& s : strata_for(mode)) {
    StratumResult res{s, {}};
    for (std::size_t t = 0; t < 2; ++t) {
      std::vector<ScoredOutcome> outcomes;
      std::size_t n_gt = 0;
      for (std::size_t i = 0; i < frames.size(); ++i) {
        const PreparedFrame& f = frames[i];
        for (std::size_t g : f.split.eligible) {
          if (detail::gt_in_stratum(f, g, s)) ++n_gt;
        }
        const MatchResult& mr = matches[i].by_threshold[t];
        for (std::size_t d = 0; d < mr.detections.size(); ++d) {
          const DetectionMatch& m = mr.detections[d];
          switch (m.outcome) {
            case Outcome::TruePositive:
              if (detail::gt_in_stratum(f, *m.gt, s)) outcomes.push_back({m.score, true});
              break;
            case Outcome::FalsePositive:
              if (detail::fp_in_stratum(f, dets_per_frame[i][d], m, s, cfg)) {
                outcomes.push_back({m.score, false});
              }
              break;
            case Outcome::Ignored: break;
          }
        }
      }
      res.ap[t] = average_precision(std::move(outcomes), n_gt, cfg.interpolation);
    }
    out.push_back(std::move(res));
  }
  return out;
}

inline std::vector<StratumResult> stratify(std::span<const FrameSample> frames,
                                           std::span<const std::vector<Detection>> dets_per_frame,
                                           const EvalConfig& cfg, StrataMode mode) {
  std::vector<PreparedFrame> prepared;
  prepared.reserve(frames.size());
  for (const FrameSample& f : frames) prepared.push_back(prepare_frame(f, cfg));
  return stratify(std::span<const PreparedFrame>(prepared), dets_per_frame, cfg, mode);
}

// ---------------------------------------------------------------------------
// Report

struct ReportRow {
  std::string corruption;  // corruption kind name, or "none" for the baseline
  int level = 0;           // 1..3; 0 for the baseline
  std::string stratum;
  double ap_primary = 0.0;  // percent, at iou_thresholds[0]
  double ap_strict = 0.0;   // percent, at iou_thresholds[1]
  std::size_t n_gt = 0;
  std::size_t n_tp = 0;
  std::size_t n_fp = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct EvalReport {
  std::array<double, 2> iou_thresholds{0.3, 0.5};
  std::vector<ReportRow> rows;
};

inline constexpr std::string_view kBaselineName = "none";

inline std::vector<ReportRow> to_rows(std::string_view corruption, int level,
                                      const std::vector<StratumResult>& results) {
  std::vector<ReportRow> rows;
  for (const StratumResult& r : results) {
    rows.push_back({std::string(corruption), level, r.stratum.name(), 100.0 * r.ap[0].ap,
                    100.0 * r.ap[1].ap, r.ap[0].n_gt, r.ap[0].n_tp, r.ap[0].n_fp});
  }
  return rows;
}

}  // namespace r3bench
