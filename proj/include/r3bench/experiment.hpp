#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "r3bench/core/parallel.hpp"
#include "r3bench/core/seed.hpp"
#include "r3bench/corruption.hpp"
#include "r3bench/evaluation.hpp"
#include "r3bench/synth.hpp"

namespace r3bench {

struct ExperimentOptions {
  std::size_t threads = 1;
  StrataMode strata = StrataMode::None;
};

/// Detector seed for a frame; independent of any corruption so that every grid
/// cell sees the same jitter and miss draws.
inline std::uint64_t detector_seed(std::uint64_t global_seed, const std::string& frame_id) {
  return derive_stream_seed(global_seed, "detect:" + frame_id);
}

// Runs the pseudo-detector on the clean dataset and on a corrupted copy per
// grid cell, and evaluates each against the clean ground truth. Eligibility
// (the in-box point count) is always taken from the clean cloud.
// Rows: baseline first, then cells in grid order, strata in strata_for order.
inline EvalReport run_degradation_experiment(std::span<const Sequence> dataset,
                                             std::span<const CorruptionSpec> grid,
                                             const PseudoDetectorParams& detector, const EvalConfig& cfg,
                                             std::uint64_t seed, const ExperimentOptions& opts = {}) {
  struct FrameRef {
    std::size_t seq;
    std::size_t index;
  };
  std::vector<FrameRef> refs;
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    for (std::size_t i = 0; i < dataset[s].size(); ++i) refs.push_back({s, i});
  }

  std::vector<PreparedFrame> prepared(refs.size());
  parallel_for(refs.size(), opts.threads, [&](std::size_t k) {
    prepared[k] = prepare_frame(dataset[refs[k].seq][refs[k].index], cfg);
  });

  const std::size_t n_cells = grid.size() + 1;  // cell 0 is the baseline
  std::vector<std::vector<std::vector<Detection>>> dets(n_cells,
                                                        std::vector<std::vector<Detection>>(refs.size()));
  const SeedPolicy policy{seed};
  parallel_for(n_cells * refs.size(), opts.threads, [&](std::size_t item) {
    const std::size_t cell = item / refs.size();
    const std::size_t k = item % refs.size();
    const Sequence& seq = dataset[refs[k].seq];
    const FrameSample& clean = seq[refs[k].index];
    const std::uint64_t dseed = detector_seed(seed, clean.frame_id);
    if (cell == 0) {
      dets[cell][k] = pseudo_detect(clean, detector, dseed);
    } else {
      const FrameSample corrupted =
          corrupt_frame(seq, static_cast<std::int64_t>(refs[k].index), grid[cell - 1], policy);
      dets[cell][k] = pseudo_detect(corrupted, detector, dseed);
    }
  });

  std::vector<std::vector<ReportRow>> rows(n_cells);
  parallel_for(n_cells, opts.threads, [&](std::size_t cell) {
    const auto results = stratify(std::span<const PreparedFrame>(prepared),
                                  std::span<const std::vector<Detection>>(dets[cell]), cfg, opts.strata);
    if (cell == 0) {
      rows[cell] = to_rows(kBaselineName, 0, results);
    } else {
      const CorruptionSpec& spec = grid[cell - 1];
      rows[cell] = to_rows(to_string(spec.kind), level(spec.severity), results);
    }
  });

  EvalReport report;
  report.iou_thresholds = cfg.iou_thresholds;
  for (auto& r : rows) report.rows.insert(report.rows.end(), r.begin(), r.end());
  return report;
}

}  // namespace r3bench
