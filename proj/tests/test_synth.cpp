#include <gtest/gtest.h>

#include <set>

#include "r3bench/core/validate.hpp"
#include "r3bench/corruption.hpp"
#include "r3bench/experiment.hpp"
#include "r3bench/synth.hpp"

using namespace r3bench;

namespace {

SceneParams single_person_at(double x) {
  SceneParams p;
  p.fixed_positions = {{x, 0.0}};
  p.occluders = 0;
  p.dims_jitter = 0.0;
  p.clutter_points = 0;
  p.cameras = 0;
  return p;
}

std::vector<StratumResult> evaluate(const std::vector<FrameSample>& frames,
                                    const std::vector<std::vector<Detection>>& dets, StrataMode mode) {
  return stratify(std::span<const FrameSample>(frames), std::span<const std::vector<Detection>>(dets),
                  EvalConfig{}, mode);
}

}  // namespace

TEST(Synth, PersonCountAndDeterminism) {
  SceneParams p;
  p.persons_min = p.persons_max = 5;
  const auto a = generate_scene(p, 7);
  EXPECT_EQ(a.ground_truth.size(), 5u);
  EXPECT_EQ(a, generate_scene(p, 7));
  EXPECT_NE(a.cloud, generate_scene(p, 8).cloud);
  EXPECT_TRUE(validate_frame(a).empty());
}

TEST(Synth, InvalidParamsThrow) {
  SceneParams p;
  p.area_half_extent_m = 0.0;
  EXPECT_THROW(generate_scene(p, 1), std::invalid_argument);
  EXPECT_THROW(generate_sequence(SceneParams{}, 0, 1), std::invalid_argument);
}

TEST(Synth, PointDensityFallsWithSquaredRange) {
  double near_sum = 0, far_sum = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto n = generate_scene(single_person_at(5.0), seed);
    const auto f = generate_scene(single_person_at(20.0), seed);
    near_sum += static_cast<double>(points_in_box(n.cloud, n.ground_truth[0].box));
    far_sum += static_cast<double>(points_in_box(f.cloud, f.ground_truth[0].box));
  }
  EXPECT_NEAR(far_sum / near_sum, 1.0 / 16.0, 0.15 / 16.0);
}

TEST(Synth, SequenceKinematics) {
  EXPECT_EQ(generate_sequence(SceneParams{}, 1, 3).size(), 1u);

  SceneParams still;
  still.fixed_velocity = Vec2{0, 0};
  const auto s = generate_sequence(still, 5, 4);
  for (const auto& f : s) {
    for (std::size_t g = 0; g < f.ground_truth.size(); ++g) EXPECT_EQ(f.ground_truth[g].box, s[0].ground_truth[g].box);
  }

  SceneParams moving;
  moving.fixed_velocity = Vec2{1.0, 0.0};
  moving.fps = 10.0;
  const auto m = generate_sequence(moving, 4, 4, "walk");
  for (std::size_t i = 1; i < m.size(); ++i) {
    EXPECT_EQ(m[i].index_in_sequence, static_cast<std::int64_t>(i));
    EXPECT_EQ(m[i].sequence_id, "walk");
    for (std::size_t g = 0; g < m[i].ground_truth.size(); ++g) {
      EXPECT_NEAR(m[i].ground_truth[g].box.cx - m[i - 1].ground_truth[g].box.cx, 0.1, 1e-12);
      EXPECT_EQ(m[i].ground_truth[g].track_id, m[0].ground_truth[g].track_id);
    }
  }
}

TEST(Synth, OcclusionLabelsCoverAllCategories) {
  std::set<Occlusion> seen;
  for (std::uint64_t seed = 0; seed < 1000 && seen.size() < 4; ++seed) {
    for (const auto& gt : generate_scene(SceneParams{}, seed).ground_truth) seen.insert(gt.occlusion);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Synth, OcclusionThresholds) {
  EXPECT_EQ(occlusion_from_visibility(1.0), Occlusion::FullyVisible);
  EXPECT_EQ(occlusion_from_visibility(0.9), Occlusion::MostlyVisible);
  EXPECT_EQ(occlusion_from_visibility(0.5), Occlusion::SeverelyOccluded);
  EXPECT_EQ(occlusion_from_visibility(0.1), Occlusion::FullyOccluded);
}

TEST(PseudoDetector, PerfectDetectorGivesApOne) {
  PseudoDetectorParams d;
  d.min_points = 1;
  d.jitter_sigma_m = 0.0;
  std::vector<FrameSample> frames;
  std::vector<std::vector<Detection>> dets;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    frames.push_back(generate_scene(SceneParams{}, seed, "s" + std::to_string(seed)));
    dets.push_back(pseudo_detect(frames.back(), d, seed));
  }
  const auto r = evaluate(frames, dets, StrataMode::None);
  EXPECT_EQ(r[0].ap[0].ap, 1.0);
  EXPECT_EQ(r[0].ap[1].ap, 1.0);
  EXPECT_GT(r[0].ap[0].n_gt, 50u);
}

TEST(PseudoDetector, ThresholdAndScoreModel) {
  FrameSample f;
  f.frame_id = "x";
  const Box3D box{3, 0, 0, 0.6, 0.6, 1.7, 0};
  f.ground_truth.push_back({box, Occlusion::FullyVisible, "a"});
  f.cloud.points = {{3, 0, 0, 0}, {3.1, 0, 0, 0}, {3, 0.1, 0, 0}};
  EXPECT_TRUE(pseudo_detect(f, {}, 1).empty());
  PseudoDetectorParams k3;
  k3.min_points = 3;
  const auto d = pseudo_detect(f, k3, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].score, 3.0 / 23.0);
  EXPECT_EQ(d, pseudo_detect(f, k3, 1));
}

TEST(PseudoDetector, DensityDecreaseNeverAddsDetectionsOnAverage) {
  double clean = 0, dropped = 0;
  const SeedPolicy policy{5};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Sequence seq{generate_scene(SceneParams{}, seed)};
    const auto corrupted = corrupt_frame(seq, 0, {CorruptionKind::DensityDecrease, Severity::S3, {}}, policy);
    clean += static_cast<double>(pseudo_detect(seq[0], {}, seed).size());
    dropped += static_cast<double>(pseudo_detect(corrupted, {}, seed).size());
  }
  EXPECT_LE(dropped, clean);
}

TEST(Experiment, RowCountsAndBaselineConsistency) {
  const std::vector<Sequence> data{generate_sequence(SceneParams{}, 6, 1, "a"),
                                   generate_sequence(SceneParams{}, 4, 2, "b")};
  const PseudoDetectorParams det;
  const EvalConfig cfg;

  const auto empty = run_degradation_experiment(data, {}, det, cfg, 9);
  ASSERT_EQ(empty.rows.size(), 1u);
  EXPECT_EQ(empty.rows[0].corruption, "none");
  EXPECT_EQ(empty.rows[0].level, 0);

  const auto grid = grid_for(Modality::Lidar);
  const auto report = run_degradation_experiment(data, grid, det, cfg, 9);
  ASSERT_EQ(report.rows.size(), 16u);
  EXPECT_EQ(report.rows[1].corruption, "lidar_gaussian");
  EXPECT_EQ(report.rows[1].level, 1);
  EXPECT_EQ(report.rows[0], empty.rows[0]);

  std::vector<FrameSample> frames;
  std::vector<std::vector<Detection>> dets;
  for (const auto& seq : data) {
    for (const auto& f : seq) {
      frames.push_back(f);
      dets.push_back(pseudo_detect(f, det, detector_seed(9, f.frame_id)));
    }
  }
  const auto direct = to_rows("none", 0, evaluate(frames, dets, StrataMode::None));
  EXPECT_EQ(direct[0], report.rows[0]);
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
  const std::vector<Sequence> data{generate_sequence(SceneParams{}, 12, 3, "a")};
  const auto grid = full_grid();
  const auto one = run_degradation_experiment(data, grid, {}, {}, 4, {1, StrataMode::All});
  const auto four = run_degradation_experiment(data, grid, {}, {}, 4, {4, StrataMode::All});
  EXPECT_EQ(one.rows, four.rows);
  EXPECT_EQ(one.rows.size(), 34u * 16u);
}
