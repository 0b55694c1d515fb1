#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drpose/errors.hpp"
#include "drpose/experiment.hpp"
#include "drpose/geometry.hpp"
#include "drpose/io.hpp"

namespace fs = std::filesystem;
using namespace drpose;

namespace {

// Flags shared by every subcommand.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON pipeline config (defaults when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Seed applied to every stochastic stage");
    cmd->add_option("--out", out, "Output directory")->capture_default_str();
  }

  PipelineConfig load() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig::defaults() : load_config(config);
    if (seed) cfg.reseed(*seed);
    cfg.validate();
    return cfg;
  }

  fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

void write(const fs::path& p, const std::string& text) {
  io::write_text_atomic(p, text);
  std::cerr << "wrote " << p.string() << "\n";
}

void write_report(const Common& c, const Report& r) {
  write(c.path("summary.json"), r.summary_json());
  write(c.path("per_joint.csv"), r.per_joint_csv());
  write(c.path("ranking_accuracy.csv"), io::accuracy_csv(r.ranking_accuracy));
  write(c.path("history.csv"), io::history_csv(r.history));
}

int cmd_synth(const Common& c) {
  const auto cfg = c.load();
  const auto poses = generate_motion(cfg.motion);
  const auto data = build_experiment_data(cfg);
  write(c.path("config.json"), config_json(cfg));
  write(c.path("poses_world.csv"), io::world_poses_csv(poses));
  write(c.path("cameras.csv"), io::cameras_csv(cfg.rig));
  write(c.path("train.csv"), io::dataset_csv(data.train));
  write(c.path("val.csv"), io::dataset_csv(data.val));
  write(c.path("test.csv"), io::dataset_csv(data.test));
  std::cout << "train " << data.train.size() << " val " << data.val.size() << " test "
            << data.test.size() << "\n";
  return 0;
}

struct AugmentArgs {
  std::string poses;
  std::string cameras;
  std::string accuracy;
  std::optional<int> factor;
  bool fixed = false;
};

int cmd_augment(const Common& c, const AugmentArgs& a) {
  auto cfg = c.load();
  const auto poses = a.poses.empty() ? generate_motion(cfg.motion) : io::read_world_poses(a.poses);
  const auto cams = a.cameras.empty() ? cfg.rig : io::read_cameras(a.cameras);
  if (!a.accuracy.empty()) cfg.noise.acc = io::read_accuracy(a.accuracy);
  auto acfg = cfg.augment_cfg;
  if (a.factor) acfg.factor = *a.factor;
  if (a.fixed) acfg.fixed_cameras = true;
  acfg.eps = cfg.eps;
  const auto data = augment_dataset(poses, cams, cfg.noise, acfg);
  write(c.path("augmented.csv"), io::dataset_csv(data));
  std::cout << "samples " << data.size() << "\n";
  return 0;
}

struct TrainArgs {
  std::string train;
  std::string val;
};

int cmd_train(const Common& c, const TrainArgs& a) {
  const auto cfg = c.load();
  ExperimentData data;
  if (!a.train.empty()) {
    data.train = io::read_dataset(a.train);
    if (!a.val.empty()) data.val = io::read_dataset(a.val);
  } else {
    data = build_experiment_data(cfg);
  }
  const auto trained = train_model(data.train, data.val, cfg);
  write(c.path("model.json"), io::model_json(trained.model));
  write(c.path("history.csv"), io::history_csv(trained.history));
  write(c.path("config.json"), config_json(cfg));
  const auto& last = trained.history.back();
  std::cout << "epochs " << trained.history.size() << " train_loss " << io::format_double(last.train_loss)
            << " val_loss " << io::format_double(last.val_loss) << "\n";
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string data;
};

int cmd_eval(const Common& c, const EvalArgs& a) {
  const auto cfg = c.load();
  const Model model = io::load_model(a.model);
  const Dataset test = a.data.empty() ? build_experiment_data(cfg).test : io::read_dataset(a.data);
  if (test.empty()) throw InputError("eval: empty test set");
  const auto ev = evaluate(model, test, cfg.eps);
  Report r;
  r.protocol = a.data.empty() ? to_string(cfg.split.kind) : "dataset";
  r.mpjpe = ev.mpjpe;
  r.aligned_mpjpe = ev.aligned_mpjpe;
  r.per_joint = ev.per_joint;
  r.ranking_accuracy = ev.ranking_accuracy;
  r.fingerprint = config_fingerprint(cfg);
  r.test_samples = test.size();
  r.check_consistency();
  write(c.path("summary.json"), r.summary_json());
  write(c.path("per_joint.csv"), r.per_joint_csv());
  write(c.path("ranking_accuracy.csv"), io::accuracy_csv(r.ranking_accuracy));
  std::cout << "mpjpe_mm " << io::format_double(r.mpjpe) << " aligned_mpjpe_mm "
            << io::format_double(r.aligned_mpjpe) << "\n";
  return 0;
}

struct ReconstructArgs {
  std::string pose2d;
  std::string ranking;
  std::string topology;
  double root_depth = 0.0;
};

int cmd_reconstruct(const Common& c, const ReconstructArgs& a) {
  // Everything is parsed and checked before the first byte is written.
  const auto p2 = io::read_poses2d(a.pose2d);
  const auto ms = io::read_rankings(a.ranking);
  const auto topo = a.topology.empty() ? SkeletonTopology::canonical() : io::read_topology(a.topology);
  if (p2.size() != ms.size())
    throw InputError("reconstruct: " + std::to_string(p2.size()) + " 2D poses but " +
                     std::to_string(ms.size()) + " ranking matrices");
  std::vector<Pose3D> out;
  std::string clamp = "row";
  for (int j = 0; j < kNumJoints; ++j) clamp += "," + std::string(joint_name(j));
  clamp += ",num_clamped\n";
  int total = 0;
  for (std::size_t k = 0; k < p2.size(); ++k) {
    const auto rec = reconstruct_depths(p2[k], ms[k], topo, a.root_depth);
    out.push_back(rec.pose);
    clamp += std::to_string(k);
    for (bool f : rec.clamped) clamp += f ? ",1" : ",0";
    clamp += "," + std::to_string(rec.num_clamped()) + "\n";
    total += rec.num_clamped();
  }
  write(c.path("pose3d.csv"), io::poses3d_csv(out));
  write(c.path("clamp.csv"), clamp);
  std::cout << "poses " << out.size() << " clamped_bones " << total << "\n";
  return 0;
}

struct AblateArgs {
  std::vector<std::string> axes = {"no-rank", "no-depthnet", "no-augment", "gt-rank"};
};

int cmd_ablate(const Common& c, const AblateArgs& a) {
  const auto cfg = c.load();
  std::vector<AblationAxis> axes;
  for (const auto& name : a.axes) axes.push_back(parse_ablation_axis(name));
  const auto results = run_ablation(axes, cfg);
  std::string table = "arm,mpjpe_mm,aligned_mpjpe_mm,fingerprint\n";
  for (const auto& r : results) {
    Common arm = c;
    arm.out = (fs::path(c.out) / r.arm).string();
    write(arm.path("config.json"), config_json(r.config));
    write_report(arm, r.report);
    table += r.arm + "," + io::format_double(r.report.mpjpe) + "," +
             io::format_double(r.report.aligned_mpjpe) + "," + r.report.fingerprint + "\n";
  }
  write(c.path("ablation.csv"), table);
  std::cout << table;
  return 0;
}

int cmd_report(const Common& c) {
  const auto cfg = c.load();
  const auto r = run_protocol(cfg);
  write(c.path("config.json"), config_json(cfg));
  write_report(c, r);
  std::cout << r.summary_json();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-ranking 3D pose lifting: data synthesis, training and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "drpose 1.0");

  Common common;
  AugmentArgs aug;
  TrainArgs tr;
  EvalArgs ev;
  ReconstructArgs rc;
  AblateArgs ab;

  auto* synth = app.add_subcommand("synth", "Generate motion and the train/val/test datasets");
  auto* augment = app.add_subcommand("augment", "Render poses from virtual cameras");
  auto* train = app.add_subcommand("train", "Train a model");
  auto* eval = app.add_subcommand("eval", "Evaluate a saved model");
  auto* recon = app.add_subcommand("reconstruct", "Geometric depth recovery from 2D pose and ranking");
  auto* ablate = app.add_subcommand("ablate", "Run matched ablation arms");
  auto* report = app.add_subcommand("report", "Run a full protocol and write its report");
  for (auto* cmd : {synth, augment, train, eval, recon, ablate, report}) common.attach(cmd);

  augment->add_option("--poses", aug.poses, "World pose CSV (generated from the config when omitted)")
      ->check(CLI::ExistingFile);
  augment->add_option("--cameras", aug.cameras, "Training camera CSV (config rig when omitted)")
      ->check(CLI::ExistingFile);
  augment->add_option("--accuracy", aug.accuracy, "16x16 ranking accuracy CSV")->check(CLI::ExistingFile);
  augment->add_option("--factor", aug.factor, "Virtual samples per pose")->check(CLI::PositiveNumber);
  augment->add_flag("--fixed-cameras", aug.fixed, "Reuse the training cameras instead of sampling");

  train->add_option("--train", tr.train, "Training dataset CSV")->check(CLI::ExistingFile);
  train->add_option("--val", tr.val, "Validation dataset CSV")->check(CLI::ExistingFile);

  eval->add_option("--model", ev.model, "Model JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ev.data, "Dataset CSV (config test split when omitted)")
      ->check(CLI::ExistingFile);

  recon->add_option("--pose2d", rc.pose2d, "2D pose CSV")->required()->check(CLI::ExistingFile);
  recon->add_option("--ranking", rc.ranking, "Ranking matrix CSV, one row per pose")
      ->required()
      ->check(CLI::ExistingFile);
  recon->add_option("--topology", rc.topology, "Skeleton CSV (canonical skeleton when omitted)")
      ->check(CLI::ExistingFile);
  recon->add_option("--root-depth", rc.root_depth, "Depth assigned to the root joint")
      ->capture_default_str();

  ablate->add_option("--axes", ab.axes, "Subset of no-rank, no-depthnet, no-augment, gt-rank")
      ->delimiter(',')
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(common);
    if (*augment) return cmd_augment(common, aug);
    if (*train) return cmd_train(common, tr);
    if (*eval) return cmd_eval(common, ev);
    if (*recon) return cmd_reconstruct(common, rc);
    if (*ablate) return cmd_ablate(common, ab);
    if (*report) return cmd_report(common);
  } catch (const Error& e) {
    std::cerr << "drpose: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "drpose: unexpected error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
