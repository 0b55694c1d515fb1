#include <doctest.h>

#include <cstdlib>
#include <string>

#include "drpose/geometry.hpp"
#include "drpose/io.hpp"
#include "support.hpp"

using namespace drpose;
using drpose::testing::TempDir;
using drpose::testing::read_file;
using drpose::testing::write_file;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(DRPOSE_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

const std::string kTinyConfig = R"({
  "seed": 1,
  "motion": {"num_poses": 200, "num_subjects": 3},
  "split": {"kind": "subject-holdout", "train_subjects": [0, 1], "test_subjects": [2],
            "train_cameras": [0], "test_cameras": [0]},
  "architecture": {"hidden_width": 16},
  "train": {"epochs": 3, "batch_size": 32}
})";

}  // namespace

TEST_CASE("help exits zero and lists every subcommand") {
  TempDir dir("cli");
  const auto r = run(dir, "--help");
  CHECK(r.code == 0);
  for (const char* sub : {"synth", "augment", "train", "eval", "reconstruct", "ablate", "report"})
    CHECK(r.out.find(sub) != std::string::npos);
  CHECK(run(dir, "train --help").code == 0);
  CHECK(run(dir, "reconstruct --help").out.find("--root-depth") != std::string::npos);
}

TEST_CASE("usage errors exit nonzero") {
  TempDir dir("cli");
  CHECK(run(dir, "").code != 0);
  CHECK(run(dir, "frobnicate").code != 0);
  CHECK(run(dir, "reconstruct --pose2d nowhere.csv").code != 0);
  CHECK(run(dir, "train --seed notanumber").code != 0);

  write_file(dir / "bad.json", R"({"train": {"epochs": -1}})");
  const auto r = run(dir, "train --config " + (dir / "bad.json").string() + " --out " + dir.path().string());
  CHECK(r.code != 0);
  CHECK(r.err.find("epochs") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "model.json"));

  write_file(dir / "cfg.json", kTinyConfig);
  const auto ab = run(dir, "ablate --config " + (dir / "cfg.json").string() + " --axes no-rank,bogus --out " +
                               (dir / "ab").string());
  CHECK(ab.code != 0);
  CHECK_FALSE(std::filesystem::exists(dir / "ab"));
}

TEST_CASE("reconstruct recovers synthesized depths") {
  TempDir dir("cli");
  std::mt19937_64 rng(21);
  std::vector<Pose3D> gt;
  std::vector<Pose2D> p2;
  std::vector<RankingMatrix> ms;
  for (int k = 0; k < 25; ++k) {
    gt.push_back(testing::random_consistent_pose(rng));
    p2.push_back(project_orthogonal(gt.back()));
    ms.push_back(ranking_matrix_from_pose(gt.back()));
  }
  io::write_text_atomic(dir / "p2.csv", io::poses2d_csv(p2));
  io::write_text_atomic(dir / "m.csv", io::rankings_csv(ms));
  io::write_text_atomic(dir / "topo.csv", io::topology_csv(SkeletonTopology::canonical()));
  const auto out = dir / "out";
  const auto r = run(dir, "reconstruct --pose2d " + (dir / "p2.csv").string() + " --ranking " +
                              (dir / "m.csv").string() + " --topology " + (dir / "topo.csv").string() +
                              " --root-depth 2500 --out " + out.string());
  REQUIRE(r.code == 0);
  const auto rec = io::read_poses3d(out / "pose3d.csv");
  REQUIRE(rec.size() == gt.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < gt.size(); ++k) {
    CHECK(rec[k][kRootJoint].z() == 2500.0);
    const double shift = gt[k][kRootJoint].z() - rec[k][kRootJoint].z();
    for (int j = 0; j < kNumJoints; ++j) {
      worst = std::max(worst, std::abs(rec[k][j].z() + shift - gt[k][j].z()));
      CHECK(rec[k][j].head<2>() == gt[k][j].head<2>());
    }
  }
  CHECK(worst < 1e-6);

  const auto clamp = io::read_csv(out / "clamp.csv");
  CHECK(clamp.header.size() == kNumJoints + 2);
  CHECK(clamp.rows.size() == gt.size());
}

TEST_CASE("reconstruct reports clamped bones") {
  TempDir dir("cli");
  std::mt19937_64 rng(5);
  Pose3D pose = testing::random_consistent_pose(rng);
  Pose2D p2 = project_orthogonal(pose);
  p2[0] += Vec2(900.0, 0.0);  // ankle pushed beyond the shank length
  io::write_text_atomic(dir / "p2.csv", io::poses2d_csv({p2}));
  io::write_text_atomic(dir / "m.csv", io::rankings_csv({ranking_matrix_from_pose(pose)}));
  const auto r = run(dir, "reconstruct --pose2d " + (dir / "p2.csv").string() + " --ranking " +
                              (dir / "m.csv").string() + " --out " + (dir / "out").string());
  REQUIRE(r.code == 0);
  const auto clamp = io::read_csv(dir / "out" / "clamp.csv");
  REQUIRE(clamp.rows.size() == 1);
  CHECK(clamp.rows[0].values[1] == 1.0);
  CHECK(clamp.rows[0].values.back() >= 1.0);
}

TEST_CASE("malformed input leaves no output behind") {
  TempDir dir("cli");
  std::mt19937_64 rng(8);
  std::vector<Pose2D> p2;
  std::vector<RankingMatrix> ms;
  for (int k = 0; k < 3; ++k) {
    const auto pose = testing::random_consistent_pose(rng);
    p2.push_back(project_orthogonal(pose));
    ms.push_back(ranking_matrix_from_pose(pose));
  }
  auto text = io::poses2d_csv(p2);
  text.insert(text.rfind(',') + 1, "abc");  // corrupt the last field of line 4
  write_file(dir / "p2.csv", text);
  io::write_text_atomic(dir / "m.csv", io::rankings_csv(ms));
  const auto out = dir / "out";
  const auto r = run(dir, "reconstruct --pose2d " + (dir / "p2.csv").string() + " --ranking " +
                              (dir / "m.csv").string() + " --out " + out.string());
  CHECK(r.code != 0);
  CHECK(r.err.find("p2.csv:4") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(out / "pose3d.csv"));
  CHECK_FALSE(std::filesystem::exists(out / "clamp.csv"));

  // Topology problems carry the offending line too.
  io::write_text_atomic(dir / "p2.csv", io::poses2d_csv(p2));
  auto topo = io::topology_csv(SkeletonTopology::canonical());
  topo.replace(topo.find("\n3,"), 3, "\n2,");  // duplicate joint index on line 5
  write_file(dir / "topo.csv", topo);
  const auto t = run(dir, "reconstruct --pose2d " + (dir / "p2.csv").string() + " --ranking " +
                              (dir / "m.csv").string() + " --topology " + (dir / "topo.csv").string() +
                              " --out " + out.string());
  CHECK(t.code != 0);
  CHECK(t.err.find("topo.csv:5") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(out / "pose3d.csv"));

  // Mismatched counts.
  io::write_text_atomic(dir / "m1.csv", io::rankings_csv({ms[0]}));
  CHECK(run(dir, "reconstruct --pose2d " + (dir / "p2.csv").string() + " --ranking " +
                     (dir / "m1.csv").string() + " --out " + out.string())
            .code != 0);
  CHECK_FALSE(std::filesystem::exists(out / "pose3d.csv"));
}

TEST_CASE("train is deterministic given the seed") {
  TempDir dir("cli");
  write_file(dir / "cfg.json", kTinyConfig);
  const std::string cfg = " --config " + (dir / "cfg.json").string();
  REQUIRE(run(dir, "train" + cfg + " --seed 42 --out " + (dir / "a").string()).code == 0);
  REQUIRE(run(dir, "train" + cfg + " --seed 42 --out " + (dir / "b").string()).code == 0);
  REQUIRE(run(dir, "train" + cfg + " --seed 43 --out " + (dir / "c").string()).code == 0);
  CHECK(read_file(dir / "a" / "history.csv") == read_file(dir / "b" / "history.csv"));
  CHECK(read_file(dir / "a" / "model.json") == read_file(dir / "b" / "model.json"));
  CHECK(read_file(dir / "a" / "history.csv") != read_file(dir / "c" / "history.csv"));
}

TEST_CASE("synth, train and eval chain through files") {
  TempDir dir("cli");
  write_file(dir / "cfg.json", kTinyConfig);
  const std::string cfg = " --config " + (dir / "cfg.json").string();
  REQUIRE(run(dir, "synth" + cfg + " --out " + (dir / "s").string()).code == 0);
  REQUIRE(run(dir, "train" + cfg + " --train " + (dir / "s" / "train.csv").string() + " --val " +
                       (dir / "s" / "val.csv").string() + " --out " + (dir / "t").string())
              .code == 0);
  REQUIRE(run(dir, "eval" + cfg + " --model " + (dir / "t" / "model.json").string() + " --data " +
                       (dir / "s" / "test.csv").string() + " --out " + (dir / "e").string())
              .code == 0);
  REQUIRE(run(dir, "report" + cfg + " --out " + (dir / "r").string()).code == 0);
  // The report path trains on the same data, so both evaluations agree.
  CHECK(read_file(dir / "e" / "per_joint.csv") == read_file(dir / "r" / "per_joint.csv"));
  REQUIRE(run(dir, "report" + cfg + " --out " + (dir / "r2").string()).code == 0);
  CHECK(read_file(dir / "r" / "summary.json") == read_file(dir / "r2" / "summary.json"));

  REQUIRE(run(dir, "augment" + cfg + " --poses " + (dir / "s" / "poses_world.csv").string() +
                       " --factor 2 --out " + (dir / "a").string())
              .code == 0);
  CHECK(io::read_dataset(dir / "a" / "augmented.csv").size() == 400);
}
