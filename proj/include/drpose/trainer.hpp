#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "drpose/augment.hpp"
#include "drpose/dpnet.hpp"

namespace drpose {

struct TrainConfig {
  double learning_rate = 1e-3;
  double decay = 0.96;  // multiplicative per epoch
  int epochs = 400;
  int batch_size = 64;
  double dropout_p = 0.3;
  AdamConfig adam;
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-dimension statistics fitted on the training set. The 2D input is
// root-centered before normalization; the 3D target is the root-centered
// camera-frame pose.
struct NormStats {
  Eigen::VectorXd pose2d_mean = Eigen::VectorXd::Zero(kPose2DDim);
  Eigen::VectorXd pose2d_std = Eigen::VectorXd::Ones(kPose2DDim);
  Eigen::VectorXd pose3d_mean = Eigen::VectorXd::Zero(kPose3DDim);
  Eigen::VectorXd pose3d_std = Eigen::VectorXd::Ones(kPose3DDim);

  static NormStats fit(std::span<const Sample> samples);

  Eigen::VectorXd normalize_2d(const Pose2D& p) const;
  Eigen::VectorXd normalize_3d(const Pose3D& p) const;
  Pose3D denormalize_3d(const Eigen::VectorXd& v) const;
};

// How the ranking matrix is presented to the network.
enum class RankInput {
  AsIs,
  Constant,  // every entry 0.5: the network sees no ranking information
};

DPNetBatch encode_batch(std::span<const Sample> samples, const NormStats& stats,
                        RankInput rank_input = RankInput::AsIs);

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  DPNetParams params;  // parameters of the epoch with the lowest validation loss
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

TrainResult train(const DPNetBatch& train_set, const DPNetBatch& val_set, const Architecture& arch,
                  const TrainConfig& cfg);

// Eval-mode loss over a whole set, processed in fixed-size chunks.
double evaluate_loss(const DPNetParams& params, const DPNetBatch& set);

struct Model {
  DPNetParams params;
  std::optional<NormStats> stats;
  TrainConfig train_config;
  RankInput rank_input = RankInput::AsIs;
};

// Normalize, eval-mode forward, denormalize the refined stage output and
// root-center it. Throws InputError when the model carries no statistics.
Pose3D predict_pose(const RankingMatrix& m, const Pose2D& p2d, const Model& model);

// Batched prediction over a dataset. Samples are processed in fixed chunks so
// the parallel kernel reproduces the serial one bit for bit.
std::vector<Pose3D> predict_dataset(std::span<const Sample> samples, const Model& model);
std::vector<Pose3D> predict_dataset_serial(std::span<const Sample> samples, const Model& model);

inline constexpr Eigen::Index kPredictChunk = 256;

}  // namespace drpose
