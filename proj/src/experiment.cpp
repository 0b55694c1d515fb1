#include "drpose/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "drpose/errors.hpp"
#include "drpose/geometry.hpp"
#include "drpose/io.hpp"

namespace drpose {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto rng = sample_rng(seed, stream, 0xC0FFEE);
  return rng();
}

template <typename T>
std::array<T, 3> arr3(const json& j) {
  const auto v = j.get<std::vector<T>>();
  if (v.size() != 3) throw ConfigError("config: expected a 3-vector");
  return {v[0], v[1], v[2]};
}

Vec3 vec3(const json& j) {
  const auto a = arr3<double>(j);
  return {a[0], a[1], a[2]};
}

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

std::string to_string(ProtocolSplit::Kind kind) {
  return kind == ProtocolSplit::Kind::CameraHoldout ? "camera-holdout" : "subject-holdout";
}

void ProtocolSplit::validate(int num_subjects, int num_cameras) const {
  auto check_ids = [](const std::vector<int>& ids, int limit, const char* what) {
    if (ids.empty()) throw ConfigError(std::string("split: no ") + what);
    for (int id : ids)
      if (id < 0 || id >= limit) throw ConfigError(std::string("split: ") + what + " id out of range");
    if (std::set<int>(ids.begin(), ids.end()).size() != ids.size())
      throw ConfigError(std::string("split: duplicate ") + what);
  };
  check_ids(train_subjects, num_subjects, "train subjects");
  check_ids(test_subjects, num_subjects, "test subjects");
  check_ids(train_cameras, num_cameras, "train cameras");
  check_ids(test_cameras, num_cameras, "test cameras");
  for (int s : test_subjects)
    if (std::find(train_subjects.begin(), train_subjects.end(), s) != train_subjects.end())
      throw ConfigError("split: subject " + std::to_string(s) + " is in both train and test");
  if (kind == Kind::CameraHoldout) {
    if (test_cameras.size() != 1) throw ConfigError("split: camera holdout needs exactly one test camera");
    if (std::find(train_cameras.begin(), train_cameras.end(), test_cameras[0]) != train_cameras.end())
      throw ConfigError("split: held-out camera is also a training camera");
  }
}

void PipelineConfig::reseed(std::uint64_t s) {
  seed = s;
  motion.seed = derive_seed(s, 1);
  augment_cfg.seed = derive_seed(s, 2);
  train.seed = derive_seed(s, 3);
}

void PipelineConfig::validate() const {
  motion.validate();
  noise.validate();
  augment_cfg.validate();
  train.validate();
  if (rig.empty()) throw ConfigError("config: camera rig is empty");
  for (const auto& c : rig)
    if (!c.valid(1e-6) || !(c.focal > 0.0)) throw ConfigError("config: invalid rig camera");
  if (val_every < 2) throw ConfigError("config: val_every must be >= 2");
  if (!(eps >= 0.0)) throw ConfigError("config: eps must be non-negative");
  split.validate(motion.num_subjects, static_cast<int>(rig.size()));
}

std::vector<Camera> PipelineConfig::default_rig() {
  const Vec3 target(0.0, 1000.0, 0.0);
  const std::array<double, 4> azimuth = {45.0, 135.0, 225.0, 315.0};
  const std::array<double, 4> radius = {5200.0, 4800.0, 5500.0, 4600.0};
  const std::array<double, 4> height = {1600.0, 1500.0, 1700.0, 1450.0};
  std::vector<Camera> rig;
  for (std::size_t k = 0; k < 4; ++k) {
    const double a = azimuth[k] * kDeg;
    const Vec3 pos(radius[k] * std::sin(a), height[k], radius[k] * std::cos(a));
    rig.push_back(Camera::look_at(pos, target, 1150.0));
  }
  return rig;
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  c.motion.num_poses = 7000;
  c.motion.num_subjects = 7;
  c.rig = default_rig();
  c.noise.gmm = NoiseConfig::default_gmm();
  c.noise.acc = AccuracyMatrix::uniform(0.9);
  c.train.epochs = 30;
  c.split.kind = ProtocolSplit::Kind::SubjectHoldout;
  c.split.train_subjects = {0, 1, 2, 3, 4};
  c.split.test_subjects = {5, 6};
  c.split.train_cameras = {0};
  c.split.test_cameras = {0};
  c.reseed(1);
  return c;
}

namespace {

json camera_json(const Camera& c) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) rot.push_back(c.rotation(r, k));
  return {{"position", vec_json(c.position)}, {"rotation", rot}, {"focal", c.focal}};
}

Camera parse_camera(const json& j) {
  const double focal = j.at("focal").get<double>();
  if (j.contains("target")) return Camera::look_at(vec3(j.at("position")), vec3(j.at("target")), focal);
  Camera c;
  c.position = vec3(j.at("position"));
  const auto rot = j.at("rotation").get<std::vector<double>>();
  if (rot.size() != 9) throw ConfigError("config: camera rotation needs 9 values");
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) c.rotation(r, k) = rot[static_cast<std::size_t>(3 * r + k)];
  c.focal = focal;
  return c;
}

json gmm_json(const std::vector<GmmComponent>& gmm) {
  json arr = json::array();
  for (const auto& c : gmm)
    arr.push_back({{"weight", c.weight},
                   {"mean", {c.mean.x(), c.mean.y()}},
                   {"cov", {{c.cov(0, 0), c.cov(0, 1)}, {c.cov(1, 0), c.cov(1, 1)}}}});
  return arr;
}

std::vector<GmmComponent> parse_gmm(const json& j) {
  if (j.is_string()) {
    if (j == "default") return NoiseConfig::default_gmm();
    if (j == "none") return {};
    throw ConfigError("config: unknown gmm preset");
  }
  if (j.is_null()) return {};
  std::vector<GmmComponent> out;
  for (const auto& c : j) {
    GmmComponent g;
    g.weight = c.at("weight").get<double>();
    const auto mean = c.at("mean").get<std::vector<double>>();
    const auto cov = c.at("cov").get<std::vector<std::vector<double>>>();
    if (mean.size() != 2 || cov.size() != 2 || cov[0].size() != 2 || cov[1].size() != 2)
      throw ConfigError("config: gmm component needs a 2-vector mean and 2x2 covariance");
    g.mean = Vec2(mean[0], mean[1]);
    g.cov << cov[0][0], cov[0][1], cov[1][0], cov[1][1];
    out.push_back(g);
  }
  return out;
}

ProtocolSplit::Kind parse_kind(const std::string& s) {
  if (s == "subject-holdout") return ProtocolSplit::Kind::SubjectHoldout;
  if (s == "camera-holdout") return ProtocolSplit::Kind::CameraHoldout;
  throw ConfigError("config: unknown split kind '" + s + "'");
}

PipelineConfig parse_config_json(const json& j, const fs::path& base_dir) {
  PipelineConfig c = PipelineConfig::defaults();
  if (j.contains("motion")) {
    const auto& m = j.at("motion");
    auto& mo = c.motion;
    mo.num_poses = m.value("num_poses", mo.num_poses);
    mo.num_subjects = m.value("num_subjects", mo.num_subjects);
    mo.subject_scale_spread = m.value("subject_scale_spread", mo.subject_scale_spread);
    if (m.contains("bone_lengths")) {
      const auto v = m.at("bone_lengths").get<std::vector<double>>();
      if (v.size() != kNumJoints) throw ConfigError("config: bone_lengths needs 16 values");
      std::copy(v.begin(), v.end(), mo.bone_lengths.begin());
    }
    if (m.contains("root_position")) mo.root_position = vec3(m.at("root_position"));
    if (m.contains("angles_deg")) {
      const auto a = m.at("angles_deg").get<std::vector<std::vector<std::vector<double>>>>();
      if (a.size() != kNumJoints) throw ConfigError("config: angles_deg needs 16 joints");
      for (std::size_t jn = 0; jn < a.size(); ++jn) {
        if (a[jn].size() != 3) throw ConfigError("config: angles_deg needs 3 axes per joint");
        for (std::size_t ax = 0; ax < 3; ++ax) {
          if (a[jn][ax].size() != 2) throw ConfigError("config: angle range needs [lo, hi]");
          mo.angles[jn][ax] = {a[jn][ax][0] * kDeg, a[jn][ax][1] * kDeg};
        }
      }
    }
    if (m.contains("angle_scale")) {
      const double s = m.at("angle_scale").get<double>();
      for (int jn = 0; jn < kNumJoints; ++jn) {
        if (jn == kRootJoint) continue;
        for (auto& r : mo.angles[static_cast<std::size_t>(jn)]) r = {r.lo * s, r.hi * s};
      }
    }
    if (m.contains("root_yaw_deg")) {
      const auto v = m.at("root_yaw_deg").get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("config: root_yaw_deg needs [lo, hi]");
      mo.angles[kRootJoint][1] = {v[0] * kDeg, v[1] * kDeg};
    }
  }
  if (j.contains("rig")) {
    const auto& r = j.at("rig");
    if (r.is_string()) {
      fs::path p = r.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      c.rig = io::read_cameras(p);
    } else {
      c.rig.clear();
      for (const auto& cam : r) c.rig.push_back(parse_camera(cam));
    }
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    if (n.contains("gmm")) c.noise.gmm = parse_gmm(n.at("gmm"));
    if (n.contains("accuracy")) {
      const auto& a = n.at("accuracy");
      if (a.is_null()) {
        c.noise.acc.reset();
      } else if (a.is_number()) {
        c.noise.acc = AccuracyMatrix::uniform(a.get<double>());
      } else if (a.is_string()) {
        fs::path p = a.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        c.noise.acc = io::read_accuracy(p);
      } else {
        const auto v = a.get<std::vector<double>>();
        if (v.size() != kNumPairs) throw ConfigError("config: accuracy needs 256 values");
        AccuracyMatrix acc;
        std::copy(v.begin(), v.end(), acc.p.begin());
        c.noise.acc = acc;
      }
    }
  }
  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    c.augment = a.value("enabled", c.augment);
    c.augment_cfg.factor = a.value("factor", c.augment_cfg.factor);
    c.augment_cfg.fixed_cameras = a.value("fixed_cameras", c.augment_cfg.fixed_cameras);
    if (a.contains("dist_mean") && !a.at("dist_mean").is_null())
      c.augment_cfg.dist_mean = a.at("dist_mean").get<double>();
    if (a.contains("dist_std") && !a.at("dist_std").is_null())
      c.augment_cfg.dist_std = a.at("dist_std").get<double>();
  }
  c.eps = j.value("eps", c.eps);
  c.val_every = j.value("val_every", c.val_every);
  if (j.contains("architecture")) {
    const auto& a = j.at("architecture");
    c.arch.hidden_width = a.value("hidden_width", c.arch.hidden_width);
    c.arch.depthnet_hidden_layers = a.value("depthnet_hidden_layers", c.arch.depthnet_hidden_layers);
    c.arch.use_depthnet = a.value("use_depthnet", c.arch.use_depthnet);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.decay = t.value("decay", c.train.decay);
    c.train.epochs = t.value("epochs", c.train.epochs);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.dropout_p = t.value("dropout_p", c.train.dropout_p);
    c.train.adam.beta1 = t.value("beta1", c.train.adam.beta1);
    c.train.adam.beta2 = t.value("beta2", c.train.adam.beta2);
    c.train.adam.epsilon = t.value("adam_epsilon", c.train.adam.epsilon);
  }
  if (j.contains("rank_input")) {
    const auto s = j.at("rank_input").get<std::string>();
    if (s == "as_is")
      c.rank_input = RankInput::AsIs;
    else if (s == "constant")
      c.rank_input = RankInput::Constant;
    else
      throw ConfigError("config: rank_input must be 'as_is' or 'constant'");
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    if (s.contains("kind")) c.split.kind = parse_kind(s.at("kind").get<std::string>());
    if (s.contains("train_subjects")) c.split.train_subjects = s.at("train_subjects").get<std::vector<int>>();
    if (s.contains("test_subjects")) c.split.test_subjects = s.at("test_subjects").get<std::vector<int>>();
    if (s.contains("train_cameras")) c.split.train_cameras = s.at("train_cameras").get<std::vector<int>>();
    if (s.contains("test_cameras")) c.split.test_cameras = s.at("test_cameras").get<std::vector<int>>();
  }
  // Seeds last: an explicit "seed" re-derives every component seed.
  c.reseed(j.value("seed", c.seed));
  c.validate();
  return c;
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text) {
  try {
    return parse_config_json(json::parse(json_text), fs::current_path());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_json(json::parse(ss.str()), path.parent_path());
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_json(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["eps"] = c.eps;
  j["val_every"] = c.val_every;
  json angles = json::array();
  for (const auto& jr : c.motion.angles) {
    json axes = json::array();
    for (const auto& r : jr) axes.push_back({r.lo / kDeg, r.hi / kDeg});
    angles.push_back(axes);
  }
  j["motion"] = {{"num_poses", c.motion.num_poses},
                 {"num_subjects", c.motion.num_subjects},
                 {"subject_scale_spread", c.motion.subject_scale_spread},
                 {"bone_lengths", c.motion.bone_lengths},
                 {"root_position", vec_json(c.motion.root_position)},
                 {"angles_deg", angles}};
  json rig = json::array();
  for (const auto& cam : c.rig) rig.push_back(camera_json(cam));
  j["rig"] = rig;
  j["noise"] = {{"gmm", gmm_json(c.noise.gmm)},
                {"accuracy", c.noise.acc ? json(c.noise.acc->p) : json(nullptr)}};
  j["augment"] = {{"enabled", c.augment},
                  {"factor", c.augment_cfg.factor},
                  {"fixed_cameras", c.augment_cfg.fixed_cameras},
                  {"dist_mean", c.augment_cfg.dist_mean ? json(*c.augment_cfg.dist_mean) : json(nullptr)},
                  {"dist_std", c.augment_cfg.dist_std ? json(*c.augment_cfg.dist_std) : json(nullptr)}};
  j["architecture"] = {{"hidden_width", c.arch.hidden_width},
                       {"depthnet_hidden_layers", c.arch.depthnet_hidden_layers},
                       {"use_depthnet", c.arch.use_depthnet}};
  j["train"] = {{"learning_rate", c.train.learning_rate}, {"decay", c.train.decay},
                {"epochs", c.train.epochs},               {"batch_size", c.train.batch_size},
                {"dropout_p", c.train.dropout_p},         {"beta1", c.train.adam.beta1},
                {"beta2", c.train.adam.beta2},            {"adam_epsilon", c.train.adam.epsilon}};
  j["rank_input"] = c.rank_input == RankInput::Constant ? "constant" : "as_is";
  j["split"] = {{"kind", to_string(c.split.kind)},
                {"train_subjects", c.split.train_subjects},
                {"test_subjects", c.split.test_subjects},
                {"train_cameras", c.split.train_cameras},
                {"test_cameras", c.split.test_cameras}};
  return j.dump(2) + "\n";
}

std::string config_fingerprint(const PipelineConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Report::check_consistency() const {
  double sum = 0.0;
  for (double e : per_joint) sum += e;
  if (std::abs(sum / kNumJoints - mpjpe) > 1e-9)
    throw Error("report: per-joint errors do not average to the overall MPJPE");
}

std::string Report::summary_json() const {
  json j;
  j["protocol"] = protocol;
  j["mpjpe_mm"] = mpjpe;
  j["aligned_mpjpe_mm"] = aligned_mpjpe;
  json pj = json::object();
  for (int k = 0; k < kNumJoints; ++k) pj[std::string(joint_name(k))] = per_joint[static_cast<std::size_t>(k)];
  j["per_joint_mm"] = pj;
  double strict = 0.0;
  int pairs = 0;
  for (int a = 0; a < kNumJoints; ++a)
    for (int b = 0; b < kNumJoints; ++b)
      if (a != b) {
        strict += ranking_accuracy(a, b);
        ++pairs;
      }
  j["mean_pairwise_ranking_accuracy"] = strict / pairs;
  j["fingerprint"] = fingerprint;
  j["train_samples"] = train_samples;
  j["test_samples"] = test_samples;
  j["epochs"] = history.size();
  return j.dump(2) + "\n";
}

std::string Report::per_joint_csv() const {
  std::string out = "joint,mpjpe_mm\n";
  for (int k = 0; k < kNumJoints; ++k)
    out += std::string(joint_name(k)) + "," + io::format_double(per_joint[static_cast<std::size_t>(k)]) + "\n";
  out += "mean," + io::format_double(mpjpe) + "\n";
  return out;
}

ExperimentData build_experiment_data(const PipelineConfig& cfg) {
  cfg.validate();
  const auto& split = cfg.split;
  const auto poses = generate_motion(cfg.motion);
  auto in = [](const std::vector<int>& ids, int v) {
    return std::find(ids.begin(), ids.end(), v) != ids.end();
  };
  std::vector<WorldPose> train_poses;
  std::vector<WorldPose> val_poses;
  std::vector<WorldPose> test_poses;
  for (const auto& wp : poses) {
    if (in(split.test_subjects, wp.subject))
      test_poses.push_back(wp);
    else if (in(split.train_subjects, wp.subject))
      (wp.pose_id % cfg.val_every == 0 ? val_poses : train_poses).push_back(wp);
  }
  if (train_poses.empty() || test_poses.empty())
    throw ConfigError("split: train or test subjects have no poses");

  const std::uint64_t view_seed = derive_seed(cfg.seed, 4);
  ExperimentData d;
  d.train = view_dataset(train_poses, cfg.rig, split.train_cameras, cfg.noise, view_seed, cfg.eps);
  d.val = view_dataset(val_poses, cfg.rig, split.train_cameras, cfg.noise, view_seed, cfg.eps);
  d.test = view_dataset(test_poses, cfg.rig, split.test_cameras, cfg.noise, view_seed, cfg.eps);

  if (cfg.augment) {
    std::vector<Camera> train_cams;
    for (int id : split.train_cameras) train_cams.push_back(cfg.rig[static_cast<std::size_t>(id)]);
    AugmentConfig acfg = cfg.augment_cfg;
    acfg.eps = cfg.eps;
    auto extra = augment_dataset(train_poses, train_cams, cfg.noise, acfg);
    // Fixed-camera augmentation reports positions in train_cams; map back to rig ids.
    for (auto& s : extra)
      if (s.camera >= 0) s.camera = split.train_cameras[static_cast<std::size_t>(s.camera)];
    d.train.insert(d.train.end(), extra.begin(), extra.end());
  }

  if (split.kind == ProtocolSplit::Kind::CameraHoldout) {
    const int held = split.test_cameras.front();
    for (const auto* set : {&d.train, &d.val})
      for (const auto& s : *set)
        if (s.camera == held) throw Error("split violation: held-out camera sample in training data");
  }
  return d;
}

EvalResult evaluate(const Model& model, const Dataset& test, double eps) {
  if (test.empty()) throw InputError("evaluate: empty test set");
  const auto preds = predict_dataset(test, model);
  EvalResult r;
  std::vector<RankingMatrix> inputs;
  std::vector<RankingMatrix> truths;
  inputs.reserve(test.size());
  truths.reserve(test.size());
  double total = 0.0;
  double aligned = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Pose3D gt = root_center(test[i].pose3d);
    const auto err = per_joint_error(preds[i], gt);
    for (int k = 0; k < kNumJoints; ++k)
      r.per_joint[static_cast<std::size_t>(k)] += err[static_cast<std::size_t>(k)];
    total += mpjpe(preds[i], gt);
    aligned += procrustes_align(preds[i], gt).error;
    inputs.push_back(test[i].ranking);
    truths.push_back(ranking_matrix_from_pose(test[i].pose3d, eps));
  }
  const double n = static_cast<double>(test.size());
  for (double& e : r.per_joint) e /= n;
  r.mpjpe = total / n;
  r.aligned_mpjpe = aligned / n;
  r.ranking_accuracy = pairwise_accuracy(inputs, truths);
  return r;
}

TrainedModel train_model(const Dataset& train_data, const Dataset& val_data, const PipelineConfig& cfg) {
  TrainedModel tm;
  const NormStats stats = NormStats::fit(train_data);
  const auto train_set = encode_batch(train_data, stats, cfg.rank_input);
  const auto val_set = encode_batch(val_data, stats, cfg.rank_input);
  auto result = train(train_set, val_set, cfg.arch, cfg.train);
  tm.model.params = std::move(result.params);
  tm.model.stats = stats;
  tm.model.train_config = cfg.train;
  tm.model.rank_input = cfg.rank_input;
  tm.history = std::move(result.history);
  return tm;
}

Report run_protocol(const PipelineConfig& cfg) {
  cfg.validate();
  const auto data = build_experiment_data(cfg);
  const auto trained = train_model(data.train, data.val, cfg);
  const auto eval = evaluate(trained.model, data.test, cfg.eps);

  Report rep;
  rep.protocol = to_string(cfg.split.kind);
  rep.mpjpe = eval.mpjpe;
  rep.aligned_mpjpe = eval.aligned_mpjpe;
  rep.per_joint = eval.per_joint;
  rep.ranking_accuracy = eval.ranking_accuracy;
  rep.fingerprint = config_fingerprint(cfg);
  rep.train_samples = data.train.size();
  rep.test_samples = data.test.size();
  rep.history = trained.history;
  rep.check_consistency();
  return rep;
}

AblationAxis parse_ablation_axis(const std::string& name) {
  if (name == "no-rank") return AblationAxis::NoRank;
  if (name == "no-depthnet") return AblationAxis::NoDepthNet;
  if (name == "no-augment") return AblationAxis::NoAugment;
  if (name == "gt-rank") return AblationAxis::GtRank;
  throw ConfigError("unknown ablation axis '" + name + "'");
}

std::string to_string(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::NoRank:
      return "no-rank";
    case AblationAxis::NoDepthNet:
      return "no-depthnet";
    case AblationAxis::NoAugment:
      return "no-augment";
    case AblationAxis::GtRank:
      return "gt-rank";
  }
  return "?";
}

PipelineConfig ablate(const PipelineConfig& base, AblationAxis axis) {
  PipelineConfig c = base;
  switch (axis) {
    case AblationAxis::NoRank:
      c.rank_input = RankInput::Constant;
      break;
    case AblationAxis::NoDepthNet:
      c.arch.use_depthnet = false;
      break;
    case AblationAxis::NoAugment:
      c.augment = false;
      break;
    case AblationAxis::GtRank:
      c.noise.acc.reset();
      break;
  }
  return c;
}

std::vector<AblationResult> run_ablation(const std::vector<AblationAxis>& axes,
                                         const PipelineConfig& base) {
  std::vector<AblationResult> out;
  out.push_back({"base", base, run_protocol(base)});
  for (auto axis : axes) {
    auto cfg = ablate(base, axis);
    out.push_back({to_string(axis), cfg, run_protocol(cfg)});
  }
  return out;
}

}  // namespace drpose
