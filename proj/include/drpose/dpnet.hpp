#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "drpose/skeleton.hpp"

namespace drpose {

inline constexpr int kRankInputDim = kNumPairs;        // flattened ranking matrix
inline constexpr int kPose2DDim = 2 * kNumJoints;      // 32
inline constexpr int kPose3DDim = 3 * kNumJoints;      // 48
inline constexpr int kCoarseDepthDim = kNumJoints;     // 16

struct Architecture {
  int hidden_width = 256;
  int depthnet_hidden_layers = 1;
  // When false the flattened ranking matrix goes straight into both PoseNet
  // stages next to the 2D pose and there is no coarse-depth head.
  bool use_depthnet = true;

  int stage_input_dim() const {
    return (use_depthnet ? kCoarseDepthDim : kRankInputDim) + kPose2DDim;
  }
  bool operator==(const Architecture&) const = default;
};

struct LayerShape {
  int out = 0;
  int in = 0;
  std::size_t offset = 0;  // weights (out x in, column-major) then bias (out)

  std::size_t size() const { return static_cast<std::size_t>(out) * static_cast<std::size_t>(in + 1); }
};

// Every weight and bias of DepthNet and both PoseNet stages, stored in one
// contiguous vector. Gradients and optimizer moments use the same layout.
class DPNetParams {
 public:
  // Layers per PoseNet stage: input projection, two residual blocks of two
  // layers each, output projection.
  static constexpr int kStageLayers = 6;
  static constexpr int kStageIn = 0;
  static constexpr int kStageOut = 5;

  DPNetParams() = default;
  explicit DPNetParams(const Architecture& arch);

  // Fan-in scaled uniform weights, zero biases.
  static DPNetParams initialized(const Architecture& arch, std::uint64_t seed);

  const Architecture& arch() const { return arch_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  int num_depthnet_layers() const { return arch_.use_depthnet ? arch_.depthnet_hidden_layers + 1 : 0; }
  int depthnet_layer(int k) const { return k; }
  int stage_layer(int stage, int k) const { return num_depthnet_layers() + stage * kStageLayers + k; }

  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  // Zeroes every parameter of one PoseNet stage (0 or 1).
  void zero_stage(int stage);

  bool same_shape(const DPNetParams& other) const;

 private:
  Architecture arch_;
  std::vector<LayerShape> layers_;
  Eigen::VectorXd values_;
};

enum class Mode { Train, Eval };

// Column-per-sample batch.
struct DPNetBatch {
  Eigen::MatrixXd rank;  // 256 x B
  Eigen::MatrixXd pose2d;  // 32 x B, normalized
  Eigen::MatrixXd coarse_depth;  // 16 x B target (normalized depth order)
  Eigen::MatrixXd pose3d;  // 48 x B target, normalized

  Eigen::Index size() const { return rank.cols(); }
  DPNetBatch columns(const std::vector<Eigen::Index>& idx) const;
};

struct DPNetOutput {
  Eigen::MatrixXd coarse_depth;  // 16 x B (empty without DepthNet)
  Eigen::MatrixXd stage1;        // 48 x B
  Eigen::MatrixXd stage2;        // 48 x B = stage1 + residual
};

// Inverted dropout with probability `dropout_p` in Train mode; Eval mode is a
// plain forward pass. `rng` may be null in Eval mode or when dropout_p == 0.
DPNetOutput dpnet_forward(const DPNetParams& params, const Eigen::MatrixXd& rank,
                          const Eigen::MatrixXd& pose2d, Mode mode, double dropout_p,
                          std::mt19937_64* rng);

// Sum of the three MSE terms, each averaged over its entries and the batch.
double dpnet_loss(const DPNetOutput& out, const DPNetBatch& targets);

struct LossAndGradient {
  double loss = 0.0;
  DPNetParams grad;
};

// Forward pass, loss and exact reverse-mode gradient sharing one dropout mask.
LossAndGradient dpnet_backward(const DPNetParams& params, const DPNetBatch& batch, Mode mode,
                               double dropout_p, std::mt19937_64* rng);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  static AdamState zeros(const DPNetParams& params);
};

void adam_step(DPNetParams& params, const DPNetParams& grads, AdamState& state, double lr,
               const AdamConfig& cfg = {});

}  // namespace drpose
