#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drpose/augment.hpp"
#include "drpose/camera.hpp"
#include "drpose/motion.hpp"
#include "drpose/ranking.hpp"
#include "drpose/trainer.hpp"

namespace drpose {

struct ProtocolSplit {
  enum class Kind { SubjectHoldout, CameraHoldout };

  Kind kind = Kind::SubjectHoldout;
  std::vector<int> train_subjects;
  std::vector<int> test_subjects;
  std::vector<int> train_cameras;
  std::vector<int> test_cameras;

  // Throws ConfigError when train and test overlap, or when a camera holdout
  // does not leave exactly one unseen camera for testing.
  void validate(int num_subjects, int num_cameras) const;
};

std::string to_string(ProtocolSplit::Kind kind);

struct PipelineConfig {
  SyntheticMotionConfig motion = SyntheticMotionConfig::anthropometric();
  std::vector<Camera> rig;
  NoiseConfig noise;
  bool augment = false;
  AugmentConfig augment_cfg;
  double eps = 0.0;
  Architecture arch;
  TrainConfig train;
  RankInput rank_input = RankInput::AsIs;
  ProtocolSplit split;
  // Every k-th training pose (by pose id) is held out for validation.
  int val_every = 10;
  std::uint64_t seed = 0;

  // Applies `seed` to every stochastic component (motion, noise,
  // augmentation, training).
  void reseed(std::uint64_t s);
  void validate() const;

  // Four cameras on a circle around the subject, ~5 m away, at slightly
  // different heights, all looking at the pelvis rest position.
  static std::vector<Camera> default_rig();
  static PipelineConfig defaults();
};

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text);
std::string config_json(const PipelineConfig& cfg);
// FNV-1a hash of the canonical config dump, as 16 hex digits.
std::string config_fingerprint(const PipelineConfig& cfg);

struct Report {
  std::string protocol;
  double mpjpe = 0.0;
  double aligned_mpjpe = 0.0;
  std::array<double, kNumJoints> per_joint{};
  AccuracyMatrix ranking_accuracy;
  std::string fingerprint;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::vector<EpochRecord> history;

  // Throws Error when the per-joint table does not average to the overall
  // error within 1e-9.
  void check_consistency() const;
  std::string summary_json() const;
  std::string per_joint_csv() const;
};

struct ExperimentData {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Synthesizes motion and assembles the train / validation / test datasets
// for the configured split. Asserts that no training or validation sample
// comes from a held-out camera.
ExperimentData build_experiment_data(const PipelineConfig& cfg);

struct EvalResult {
  double mpjpe = 0.0;
  double aligned_mpjpe = 0.0;
  std::array<double, kNumJoints> per_joint{};
  AccuracyMatrix ranking_accuracy;
};

// Scores a trained model on a dataset. Ranking accuracy compares the input
// matrices with those of the ground-truth poses at tolerance `eps`.
EvalResult evaluate(const Model& model, const Dataset& test, double eps);

struct TrainedModel {
  Model model;
  std::vector<EpochRecord> history;
};

TrainedModel train_model(const Dataset& train, const Dataset& val, const PipelineConfig& cfg);

Report run_protocol(const PipelineConfig& cfg);

enum class AblationAxis { NoRank, NoDepthNet, NoAugment, GtRank };

AblationAxis parse_ablation_axis(const std::string& name);
std::string to_string(AblationAxis axis);

// Base configuration with only the named component changed.
PipelineConfig ablate(const PipelineConfig& base, AblationAxis axis);

struct AblationResult {
  std::string arm;  // "base" or the axis name
  PipelineConfig config;
  Report report;
};

// The base run followed by one run per axis.
std::vector<AblationResult> run_ablation(const std::vector<AblationAxis>& axes,
                                         const PipelineConfig& base);

}  // namespace drpose
