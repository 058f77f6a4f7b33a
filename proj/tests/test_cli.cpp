#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <map>
#include <sstream>

#include "r3bench/r3bench.hpp"
#include "test_util.hpp"

using namespace r3bench;
namespace fs = std::filesystem;

namespace {

// Runs the CLI with stdout to `out` (when given) and stderr discarded.
int cli(const std::string& args, const fs::path& out = {}) {
  std::string cmd = std::string(R3BENCH_CLI) + " " + args;
  cmd += out.empty() ? " >/dev/null" : " >'" + out.string() + "'";
  cmd += " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::vector<std::uint8_t>> tree(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_bytes(e.path());
  }
  return files;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Two well-separated persons, each with 40 points inside its box.
void write_two_person_fixture(const fs::path& root) {
  FrameSample f;
  f.sequence_id = "s";
  f.index_in_sequence = 0;
  f.frame_id = "s/000000";
  const Box3D a{5, 0, 0, 0.6, 0.6, 1.7, 0}, b{0, 10, 0, 0.6, 0.6, 1.7, 0};
  Rng gen(3);
  for (const Box3D& box : {a, b}) {
    for (int i = 0; i < 40; ++i) {
      f.cloud.points.push_back({box.cx + gen.uniform(-0.2, 0.2), box.cy + gen.uniform(-0.2, 0.2),
                                box.cz + gen.uniform(-0.6, 0.6), 0});
    }
  }
  f.ground_truth = {{a, Occlusion::FullyVisible, "a"}, {b, Occlusion::MostlyVisible, "b"}};
  io::LayoutConfig layout;
  layout.cameras.clear();
  const std::vector<Sequence> data{{f}};
  io::write_dataset(root, "train", data, layout);
}

class Cli : public ::testing::Test {
 protected:
  r3bench::testing::TempDir dir{"cli"};
  fs::path p(const std::string& name) const { return dir.path() / name; }
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  ASSERT_EQ(cli("--seed 1 synth --frames 3 --out " + q(p("ds"))), 0);
  EXPECT_EQ(cli("--help"), 0);
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("corrupt --input " + q(p("ds")) + " --output " + q(p("o")) + " --corruption bogus --severity 1"), 2);
  EXPECT_EQ(cli("corrupt --input " + q(p("ds")) + " --output " + q(p("o")) + " --corruption fog --severity 4"), 2);
  EXPECT_EQ(cli("corrupt --input " + q(p("ds")) + " --output " + q(p("o")) + " --corruption fog --severity 0"), 2);
  EXPECT_EQ(cli("corrupt --input " + q(p("missing")) + " --output " + q(p("o")) + " --corruption fog --severity 1"),
            1);
  EXPECT_EQ(cli("corrupt --input " + q(p("ds")) + " --output " + q(p("o")) +
                " --corruption crosstalk --severity 1 --param ratio"),
            2);
  EXPECT_EQ(cli("sweep --input " + q(p("ds")) + " --grid fog:9"), 2);
  EXPECT_EQ(cli("eval --gt " + q(p("ds")) + " --detections " + q(p("nope.jsonl"))), 1);
  EXPECT_EQ(cli("synth --persons 5..2 --out " + q(p("bad"))), 2);
  EXPECT_EQ(cli("corrupt --input " + q(p("ds")) + " --output " + q(p("o")) + " --corruption fog --severity 2"), 0);
}

TEST_F(Cli, CorruptDensityKeepsExactFractionAndCopiesLabels) {
  ASSERT_EQ(cli("--seed 5 synth --frames 10 --out " + q(p("ds"))), 0);
  ASSERT_EQ(cli("--seed 9 corrupt --input " + q(p("ds")) + " --output " + q(p("c")) +
                " --corruption density_decrease --severity 1"),
            0);
  const auto clean = io::JrdbReader(p("ds"), "train").read_all();
  const auto bad = io::JrdbReader(p("c"), "train").read_all();
  ASSERT_EQ(clean.size(), 10u);
  ASSERT_EQ(bad.size(), 10u);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const std::size_t n = clean[i].cloud.size();
    EXPECT_EQ(bad[i].cloud.size(), n - round_count(0.06, n));
    EXPECT_EQ(bad[i].ground_truth.size(), clean[i].ground_truth.size());
  }
  EXPECT_EQ(io::read_bytes(p("ds") / "train/labels/seq000.jsonl"), io::read_bytes(p("c") / "train/labels/seq000.jsonl"));

  const auto manifest = nlohmann::json::parse(io::read_text(p("c") / "manifest.json"));
  EXPECT_EQ(manifest["corruption"], "density_decrease");
  EXPECT_EQ(manifest["severity"], 1);
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_EQ(manifest["frames"], 10);
}

TEST_F(Cli, CorruptOutputIndependentOfThreadsAndRuns) {
  ASSERT_EQ(cli("synth --frames 6 --sequences 2 --out " + q(p("ds"))), 0);
  for (const char* kind : {"cutout", "camera_gaussian", "temporal_misalign_lidar"}) {
    const std::string base = "corrupt --input " + q(p("ds")) + " --corruption " + kind + " --severity 3 --output ";
    ASSERT_EQ(cli("--threads 1 " + base + q(p("a"))), 0);
    ASSERT_EQ(cli("--threads 4 " + base + q(p("b"))), 0);
    ASSERT_EQ(cli("--threads 4 " + base + q(p("c"))), 0);
    const auto a = tree(p("a"));
    EXPECT_EQ(a, tree(p("b"))) << kind;
    EXPECT_EQ(a, tree(p("c"))) << kind;
    EXPECT_NE(a, tree(p("ds"))) << kind;
    for (const char* d : {"a", "b", "c"}) fs::remove_all(p(d));
  }
}

TEST_F(Cli, SynthDetectEvalGivesPerfectAp) {
  ASSERT_EQ(cli("--seed 2 synth --frames 8 --sequences 2 --persons 6..10 --out " + q(p("ds"))), 0);
  ASSERT_EQ(cli("--seed 2 detect --input " + q(p("ds")) + " --min-points 1 --jitter 0 --out " + q(p("d.jsonl"))), 0);
  ASSERT_EQ(cli("eval --gt " + q(p("ds")) + " --detections " + q(p("d.jsonl")), p("r.csv")), 0);
  const auto report = io::read_report_csv(p("r.csv"));
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_GT(report.rows[0].n_gt, 0u);
  EXPECT_DOUBLE_EQ(report.rows[0].ap_primary, 100.0);
  EXPECT_DOUBLE_EQ(report.rows[0].ap_strict, 100.0);
}

TEST_F(Cli, EvalHandFixtureAndEmptyDetections) {
  write_two_person_fixture(p("ds"));
  // TP, FP, TP in descending score: all-point AP = 1/2 + 2/3 * 1/2 = 5/6.
  io::write_text(p("d.jsonl"),
                 R"({"frame_id":"s/000000","cx":5,"cy":0,"cz":0,"l":0.6,"w":0.6,"h":1.7,"yaw":0,"score":0.9}
{"frame_id":"s/000000","cx":-8,"cy":-8,"cz":0,"l":0.6,"w":0.6,"h":1.7,"yaw":0,"score":0.8}
{"frame_id":"s/000000","cx":0,"cy":10,"cz":0,"l":0.6,"w":0.6,"h":1.7,"yaw":0,"score":0.7}
)");
  ASSERT_EQ(cli("eval --gt " + q(p("ds")) + " --detections " + q(p("d.jsonl")) + " --strata occlusion",
                p("r.csv")),
            0);
  const auto r = io::read_report_csv(p("r.csv"));
  ASSERT_GE(r.rows.size(), 2u);
  EXPECT_NEAR(r.rows[0].ap_primary, 250.0 / 3.0, 1e-9);
  EXPECT_EQ(r.rows[0].n_tp, 2u);
  EXPECT_EQ(r.rows[0].n_fp, 1u);
  EXPECT_NE(io::read_text(p("r.csv")).find("none,0,all,83.333333333333"), std::string::npos);

  ASSERT_EQ(cli("eval --gt " + q(p("ds")) + " --detections " + q(p("d.jsonl")) + " --format json", p("r.json")), 0);
  EXPECT_NO_THROW(nlohmann::json::parse(io::read_text(p("r.json"))));

  io::write_text(p("empty.jsonl"), "");
  ASSERT_EQ(cli("eval --gt " + q(p("ds")) + " --detections " + q(p("empty.jsonl")), p("z.csv")), 0);
  const auto z = io::read_report_csv(p("z.csv"));
  ASSERT_EQ(z.rows.size(), 1u);
  EXPECT_EQ(z.rows[0].ap_primary, 0.0);
  EXPECT_EQ(z.rows[0].n_gt, 2u);
}

TEST_F(Cli, SweepLidarGridIsThreadIndependent) {
  ASSERT_EQ(cli("--seed 4 synth --frames 5 --sequences 2 --out " + q(p("ds"))), 0);
  const std::string base = "--seed 4 sweep --input " + q(p("ds")) + " --grid lidar --strata combined --out ";
  ASSERT_EQ(cli("--threads 1 " + base + q(p("a.csv"))), 0);
  ASSERT_EQ(cli("--threads 8 " + base + q(p("b.csv"))), 0);
  EXPECT_EQ(io::read_bytes(p("a.csv")), io::read_bytes(p("b.csv")));
  const auto r = io::read_report_csv(p("a.csv"));
  std::size_t cells = 0;
  for (const auto& row : r.rows) cells += row.stratum == "all" ? 1 : 0;
  EXPECT_EQ(cells, 16u);  // baseline + 5 kinds x 3 levels
}

TEST_F(Cli, ConfigFileSetsDefaultsAndFlagsOverride) {
  ASSERT_EQ(cli("synth --frames 4 --out " + q(p("ds"))), 0);
  io::write_text(p("cfg.toml"), "seed = 11\n[sweep]\ngrid = \"fog:2\"\n");
  ASSERT_EQ(cli("--config " + q(p("cfg.toml")) + " sweep --input " + q(p("ds")), p("a.csv")), 0);
  const auto a = io::read_report_csv(p("a.csv"));
  ASSERT_EQ(a.rows.size(), 2u);
  EXPECT_EQ(a.rows[1].corruption, "fog");
  ASSERT_EQ(cli("--config " + q(p("cfg.toml")) + " sweep --grid cutout:1 --input " + q(p("ds")), p("b.csv")), 0);
  EXPECT_EQ(io::read_report_csv(p("b.csv")).rows[1].corruption, "cutout");
}

TEST_F(Cli, PlotWritesOneMarkPerRow) {
  io::write_text(p("r.csv"),
                 "corruption,level,stratum,ap_iou_0.3,ap_iou_0.5,n_gt,n_tp,n_fp\n"
                 "none,0,all,80,60,10,8,2\n"
                 "fog,1,all,70,50,10,7,3\n"
                 "fog,2,all,65,40,10,6,3\n");
  ASSERT_EQ(cli("plot --report " + q(p("r.csv")) + " --out " + q(p("plots"))), 0);
  const std::string sev = io::read_text(p("plots") / "severity_ap_iou_0.3.svg");
  EXPECT_EQ(count(sev, "class=\"point\""), 3u);
  EXPECT_EQ(count(sev, "class=\"series\""), 1u);  // only fog has more than one point
  EXPECT_EQ(sev.rfind("<svg", 0), 0u);
  const std::string strata = io::read_text(p("plots") / "strata_ap_iou_0.5.svg");
  EXPECT_EQ(count(strata, "class=\"bar\""), 1u);

  io::write_text(p("empty.csv"), "corruption,level,stratum,ap_iou_0.3,ap_iou_0.5,n_gt,n_tp,n_fp\n");
  EXPECT_EQ(cli("plot --report " + q(p("empty.csv")) + " --out " + q(p("p2"))), 1);
  EXPECT_FALSE(fs::exists(p("p2") / "severity_ap_iou_0.3.svg"));
}
