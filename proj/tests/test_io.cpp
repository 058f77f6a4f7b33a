#include <gtest/gtest.h>

#include <cstring>

#include "r3bench/core/rng.hpp"
#include "r3bench/io/cloud_io.hpp"
#include "r3bench/io/dataset.hpp"
#include "r3bench/io/image_io.hpp"
#include "r3bench/io/records.hpp"
#include "r3bench/io/report_io.hpp"
#include "r3bench/synth.hpp"
#include "test_util.hpp"

using namespace r3bench;
using namespace r3bench::io;
using r3bench::testing::TempDir;

namespace {

PointCloud small_cloud() {
  PointCloud c;
  c.points = {{1.5, -2.25, 0.125, 0}, {0, 0, 0, 0}, {-100.5, 3.0, 1e-3, 0}};
  return quantize(c);
}

template <typename Fn>
ParseError expect_parse_error(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError thrown";
  return ParseError(ParseErrorKind::Malformed, LocationKind::Line, 0, "");
}

std::string annotation_line(const std::string& frame, const std::string& occlusion, const std::string& track = "t1") {
  return R"({"frame_id":")" + frame + R"(","sequence_id":"s","boxes":[{"cx":1,"cy":2,"cz":0,"l":0.6,"w":0.6,"h":1.7,"yaw":0,"occlusion":")" +
         occlusion + R"(","track_id":")" + track + R"("}]})";
}

// Three-frame split with labels listed out of index order.
void build_fixture(const fs::path& root, bool with_cloud_for_frame_1 = true) {
  LayoutConfig cfg;
  cfg.cameras = {"front"};
  write_text(root / kLayoutFile, cfg.to_json().dump());
  std::vector<AnnotationRecord> recs;
  for (std::int64_t i : {2, 0, 1}) {
    FrameSample f;
    f.frame_id = "seqA_" + std::to_string(i);
    f.sequence_id = "seqA";
    f.index_in_sequence = i;
    f.cloud.points = {{static_cast<double>(i), 0, 0, 0}};
    f.images.emplace_back(4, 2, "front", 0.25);
    Calibration c;
    c.camera_id = "front";
    f.calibrations.push_back(c);
    f.ground_truth.push_back({Box3D{2, 0, 0, 0.6, 0.6, 1.7, 0.5}, Occlusion::MostlyVisible, "p"});
    write_frame_sensors(root, "train", cfg, f);
    recs.push_back(annotation_from_frame(f));
  }
  if (!with_cloud_for_frame_1) fs::remove(root / cfg.expand(cfg.cloud, "train", "seqA", 1));
  write_annotations(root / "train/labels/seqA.jsonl", recs);
}

}  // namespace

TEST(CloudIo, RoundTrips) {
  EXPECT_EQ(decode_cloud(encode_cloud(PointCloud{})), PointCloud{});
  const auto c = small_cloud();
  EXPECT_EQ(decode_cloud(encode_cloud(c)).points, c.points);

  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    auto r = r3bench::testing::random_cloud(rng, rng.below(300), i % 2 == 0);
    const auto q = quantize(r);
    const auto back = decode_cloud(encode_cloud(r));
    ASSERT_EQ(back.points, q.points);
    ASSERT_EQ(back.has_intensity, r.has_intensity);
    ASSERT_EQ(encode_cloud(back), encode_cloud(r));
  }
}

TEST(CloudIo, FileRoundTrip) {
  TempDir dir("cloud");
  const auto c = small_cloud();
  write_cloud(c, dir.path() / "a/b/c.r3pc");
  EXPECT_EQ(read_cloud(dir.path() / "a/b/c.r3pc").points, c.points);
  EXPECT_THROW(read_cloud(dir.path() / "missing.r3pc"), IoError);
}

TEST(CloudIo, StructuredErrors) {
  auto bytes = encode_cloud(small_cloud());

  auto bad_magic = bytes;
  std::memcpy(bad_magic.data(), "XXXX", 4);
  auto e = expect_parse_error([&] { decode_cloud(bad_magic); });
  EXPECT_EQ(e.kind(), ParseErrorKind::BadMagic);
  EXPECT_EQ(e.location(), 0u);
  EXPECT_EQ(e.location_kind(), LocationKind::ByteOffset);

  auto bad_version = bytes;
  bad_version[4] = 2;
  e = expect_parse_error([&] { decode_cloud(bad_version); });
  EXPECT_EQ(e.kind(), ParseErrorKind::VersionMismatch);
  EXPECT_EQ(e.location(), 4u);

  auto bad_flags = bytes;
  bad_flags[10] = 0x6;
  EXPECT_EQ(expect_parse_error([&] { decode_cloud(bad_flags); }).kind(), ParseErrorKind::UnknownFlags);

  auto truncated = bytes;
  truncated.pop_back();
  e = expect_parse_error([&] { decode_cloud(truncated); });
  EXPECT_EQ(e.kind(), ParseErrorKind::Truncated);
  EXPECT_EQ(e.location(), truncated.size());

  auto trailing = bytes;
  trailing.push_back(0);
  e = expect_parse_error([&] { decode_cloud(trailing); });
  EXPECT_EQ(e.kind(), ParseErrorKind::TrailingBytes);
  EXPECT_EQ(e.location(), bytes.size());
}

TEST(CloudIo, FuzzedBytesFailWithStructuredErrors) {
  Rng rng(7);
  const auto valid = encode_cloud(small_cloud());
  for (int i = 0; i < 5000; ++i) {
    std::vector<std::uint8_t> b;
    if (i % 2 == 0) {
      b.resize(rng.below(64));
      for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(256));
    } else {
      b = valid;
      const std::size_t flips = 1 + rng.below(4);
      for (std::size_t k = 0; k < flips; ++k) b[rng.below(b.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
      b.resize(rng.below(b.size() + 8), 0);
    }
    try {
      decode_cloud(b);
    } catch (const ParseError& e) {
      ASSERT_LE(e.location(), b.size());
    }
  }
}

TEST(ImageIo, RoundTripAndErrors) {
  Rng rng(3);
  CameraImage img(7, 5, "cam2");
  for (double& v : img.pixels) v = rng.uniform01();
  const auto q = quantize(img);
  const auto back = decode_image(encode_image(img), "cam2");
  EXPECT_EQ(back.pixels, q.pixels);
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.height, 5);
  EXPECT_EQ(quantize(back).pixels, back.pixels);

  const std::string p5 = "P5\n1 1\n65535\n";
  EXPECT_EQ(expect_parse_error([&] { decode_image(std::vector<std::uint8_t>(p5.begin(), p5.end()), "c"); }).kind(),
            ParseErrorKind::BadMagic);
  auto bytes = encode_image(img);
  bytes.resize(bytes.size() - 3);
  EXPECT_EQ(expect_parse_error([&] { decode_image(bytes, "c"); }).kind(), ParseErrorKind::Truncated);

  for (int i = 0; i < 2000; ++i) {
    auto b = encode_image(CameraImage(2, 2, "c", 0.5));
    b[rng.below(b.size())] = static_cast<std::uint8_t>(rng.below(256));
    b.resize(rng.below(b.size() + 4), '9');
    try {
      decode_image(b, "c");
    } catch (const ParseError&) {
    }
  }
}

TEST(Annotations, RoundTripPreservesUnknownFields) {
  const std::string text =
      R"({"frame_id":"f0","sequence_id":"s","index":3,"weather":"rain","boxes":[{"cx":1.25,"cy":-2,"cz":0.1,"l":0.6,"w":0.5,"h":1.7,"yaw":0.3,"occlusion":"severely_occluded","track_id":"7","attributes":{"pose":"sitting"}}]})"
      "\n";
  const auto recs = parse_annotations(text);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].index, std::optional<std::int64_t>{3});
  EXPECT_EQ(recs[0].boxes[0].gt.occlusion, Occlusion::SeverelyOccluded);
  EXPECT_EQ(recs[0].extra["weather"], "rain");
  EXPECT_EQ(recs[0].boxes[0].extra["attributes"]["pose"], "sitting");
  const auto again = parse_annotations(format_annotations(recs));
  EXPECT_EQ(format_annotations(again), format_annotations(recs));
  EXPECT_EQ(json::parse(format_annotation(again[0])), json::parse(text));
}

TEST(Annotations, FuzzedRecordsRoundTripLosslessly) {
  Rng rng(5);
  std::vector<AnnotationRecord> recs;
  for (int i = 0; i < 200; ++i) {
    AnnotationRecord r;
    r.frame_id = "f" + std::to_string(i);
    r.sequence_id = "s" + std::to_string(i % 3);
    if (i % 2) r.index = i;
    for (std::size_t b = 0; b < rng.below(5); ++b) {
      BoxRecord br;
      br.gt = {Box3D{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-1, 1), rng.uniform(0.1, 2),
                     rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(-3, 3)},
               kAllOcclusions[rng.below(4)], "t" + std::to_string(b)};
      r.boxes.push_back(br);
    }
    recs.push_back(r);
  }
  const auto back = parse_annotations(format_annotations(recs));
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    ASSERT_EQ(back[i].index, recs[i].index);
    ASSERT_EQ(back[i].boxes.size(), recs[i].boxes.size());
    for (std::size_t b = 0; b < recs[i].boxes.size(); ++b) ASSERT_EQ(back[i].boxes[b].gt, recs[i].boxes[b].gt);
  }
}

TEST(Annotations, StrictErrorsNameTheLine) {
  const std::string text = annotation_line("a", "fully_visible") + "\n" + annotation_line("b", "Mostly_visible") + "\n";
  auto e = expect_parse_error([&] { parse_annotations(text, "labels.jsonl"); });
  EXPECT_EQ(e.kind(), ParseErrorKind::InvalidValue);
  EXPECT_EQ(e.location_kind(), LocationKind::Line);
  EXPECT_EQ(e.location(), 2u);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("labels.jsonl"), std::string::npos);

  const std::string dup_frame = annotation_line("a", "fully_visible") + "\n\n" + annotation_line("a", "fully_visible");
  e = expect_parse_error([&] { parse_annotations(dup_frame); });
  EXPECT_EQ(e.kind(), ParseErrorKind::Duplicate);
  EXPECT_EQ(e.location(), 3u);

  const std::string dup_track =
      R"({"frame_id":"a","sequence_id":"s","boxes":[{"cx":1,"cy":2,"cz":0,"l":1,"w":1,"h":1,"yaw":0,"occlusion":"fully_visible","track_id":"x"},{"cx":3,"cy":2,"cz":0,"l":1,"w":1,"h":1,"yaw":0,"occlusion":"fully_visible","track_id":"x"}]})";
  EXPECT_EQ(expect_parse_error([&] { parse_annotations(dup_track); }).kind(), ParseErrorKind::Duplicate);
  EXPECT_EQ(expect_parse_error([&] { parse_annotations("{not json"); }).kind(), ParseErrorKind::Malformed);
}

TEST(Annotations, FuzzedTextNeverEscapesAsOtherExceptions) {
  Rng rng(9);
  const std::string base = annotation_line("a", "fully_visible");
  const std::string alphabet = "{}[]\":,0123456789.-eE abcxyz_\n";
  for (int i = 0; i < 3000; ++i) {
    std::string t = base;
    for (std::size_t k = 0; k < 1 + rng.below(5); ++k) t[rng.below(t.size())] = alphabet[rng.below(alphabet.size())];
    try {
      parse_annotations(t);
      parse_detections(t);
    } catch (const ParseError& e) {
      ASSERT_GE(e.location(), 1u);
    }
  }
}

TEST(Detections, GroupingAndValidation) {
  EXPECT_TRUE(parse_detections("").empty());
  EXPECT_TRUE(parse_detections("\n\n").empty());
  const std::string two =
      R"({"frame_id":"f","cx":1,"cy":0,"cz":0,"l":1,"w":1,"h":1,"yaw":0,"score":0.9})"
      "\n"
      R"({"frame_id":"f","cx":2,"cy":0,"cz":0,"l":1,"w":1,"h":1,"yaw":0,"score":0.4})"
      "\n";
  const auto m = parse_detections(two);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.at("f").size(), 2u);
  EXPECT_EQ(parse_detections(format_detections(m)), m);
  const std::string bad = R"({"frame_id":"f","cx":1,"cy":0,"cz":0,"l":1,"w":1,"h":1,"yaw":0,"score":1.5})";
  EXPECT_EQ(expect_parse_error([&] { parse_detections(bad); }).kind(), ParseErrorKind::InvalidValue);
}

TEST(Calibrations, RoundTrip) {
  Rng rng(4);
  std::vector<Calibration> cs(3);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    cs[i].camera_id = "cam" + std::to_string(i);
    for (double& r : cs[i].rotation) r = rng.normal();
    for (double& t : cs[i].translation) t = rng.normal();
  }
  EXPECT_EQ(parse_calibrations(format_calibrations(cs)), cs);
  EXPECT_THROW(parse_calibrations(R"({"calibrations":[{"camera_id":"c","rotation":[1],"translation":[0,0,0]}]})"),
               ParseError);
}

TEST(Reports, CsvRoundTripAndShape) {
  EvalReport r;
  r.rows.push_back({"none", 0, "all", 83.33333333333333, 50.0, 2, 2, 1});
  const auto csv = format_report_csv(r);
  EXPECT_EQ(csv,
            "corruption,level,stratum,ap_iou_0.3,ap_iou_0.5,n_gt,n_tp,n_fp\n"
            "none,0,all,83.33333333333333,50,2,2,1\n");
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    r.rows.push_back({std::string(to_string(kAllCorruptions[rng.below(11)])), 1 + static_cast<int>(rng.below(3)),
                      "near/heavy", 100 * rng.uniform01(), 100 * rng.uniform01(), rng.below(50), rng.below(50),
                      rng.below(50)});
  }
  r.rows.push_back({"fog", 3, "far", 0.0, 0.0, 0, 0, 0});
  const auto back = parse_report_csv(format_report_csv(r));
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    ASSERT_EQ(back.rows[i].corruption, r.rows[i].corruption);
    ASSERT_NEAR(back.rows[i].ap_primary, r.rows[i].ap_primary, 1e-9);
    ASSERT_NEAR(back.rows[i].ap_strict, r.rows[i].ap_strict, 1e-9);
    ASSERT_EQ(back.rows[i].n_gt, r.rows[i].n_gt);
  }
  EXPECT_EQ(back.iou_thresholds, r.iou_thresholds);
  const auto j = json::parse(format_report_json(r));
  EXPECT_TRUE(j["rows"].back()["empty_stratum"].get<bool>());
  EXPECT_THROW(parse_report_csv("a,b\n"), ParseError);
}

TEST(Dataset, EmptyRootYieldsNothing) {
  TempDir dir("empty");
  JrdbReader reader(dir.path(), "train");
  EXPECT_FALSE(reader.next().has_value());
}

TEST(Dataset, FixtureFramesInIndexOrder) {
  TempDir dir("fixture");
  build_fixture(dir.path());
  JrdbReader reader(dir.path(), "train");
  const auto frames = reader.read_all();
  ASSERT_EQ(frames.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(frames[i].index_in_sequence, static_cast<std::int64_t>(i));
    EXPECT_EQ(frames[i].frame_id, "seqA_" + std::to_string(i));
    EXPECT_EQ(frames[i].cloud.points[0].x, static_cast<double>(i));
    ASSERT_EQ(frames[i].images.size(), 1u);
    EXPECT_EQ(frames[i].images[0].camera_id, "front");
    EXPECT_EQ(frames[i].ground_truth[0].occlusion, Occlusion::MostlyVisible);
  }
}

TEST(Dataset, MissingCloudStrictAndLenient) {
  TempDir dir("missing");
  build_fixture(dir.path(), false);
  JrdbReader strict(dir.path(), "train");
  ASSERT_TRUE(strict.next().has_value());
  try {
    strict.next();
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("seqA_1"), std::string::npos);
  }

  auto cfg = LayoutConfig::load(dir.path());
  cfg.strict = false;
  std::vector<std::string> warnings;
  JrdbReader lenient(dir.path(), "train", cfg, [&](const std::string& w) { warnings.push_back(w); });
  EXPECT_EQ(lenient.read_all().size(), 2u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("seqA_1"), std::string::npos);
}

TEST(Dataset, YawConventionConversion) {
  TempDir dir("yaw");
  build_fixture(dir.path());
  auto cfg = LayoutConfig::load(dir.path());
  cfg.yaw_sign = -1.0;
  cfg.yaw_offset_rad = 0.25;
  JrdbReader reader(dir.path(), "train", cfg);
  EXPECT_NEAR(reader.next()->ground_truth[0].box.yaw, -0.25, 1e-12);
}

TEST(Dataset, SyntheticWriteReadRoundTrip) {
  TempDir dir("synth");
  SceneParams p;
  const std::vector<Sequence> seqs{generate_sequence(p, 3, 1, "s0"), generate_sequence(p, 2, 2, "s1")};
  write_dataset(dir.path(), "val", seqs);
  JrdbReader reader(dir.path(), "val");
  const auto back = reader.read_sequences();
  ASSERT_EQ(back.size(), 2u);
  ASSERT_EQ(back[0].size(), 3u);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < seqs[s].size(); ++i) {
      const auto& a = seqs[s][i];
      const auto& b = back[s][i];
      EXPECT_EQ(b.frame_id, a.frame_id);
      EXPECT_EQ(b.cloud.points, quantize(a.cloud).points);
      EXPECT_EQ(b.ground_truth, a.ground_truth);
      EXPECT_EQ(b.calibrations, a.calibrations);
      ASSERT_EQ(b.images.size(), a.images.size());
      EXPECT_EQ(b.images[0].pixels, quantize(a.images[0]).pixels);
    }
  }
}
