#include "drpose/dpnet.hpp"

#include <cmath>

#include "drpose/errors.hpp"

namespace drpose {

using Eigen::MatrixXd;
using Eigen::VectorXd;

DPNetParams::DPNetParams(const Architecture& arch) : arch_(arch) {
  if (arch.hidden_width < 1) throw ConfigError("hidden width must be positive");
  if (arch.use_depthnet && arch.depthnet_hidden_layers < 1)
    throw ConfigError("DepthNet needs at least one hidden layer");
  const int h = arch.hidden_width;
  std::size_t offset = 0;
  auto add = [&](int out, int in) {
    LayerShape s{out, in, offset};
    offset += s.size();
    layers_.push_back(s);
  };
  if (arch.use_depthnet) {
    int in = kRankInputDim;
    for (int k = 0; k < arch.depthnet_hidden_layers; ++k) {
      add(h, in);
      in = h;
    }
    add(kCoarseDepthDim, in);
  }
  for (int stage = 0; stage < 2; ++stage) {
    add(h, arch.stage_input_dim());
    for (int k = 0; k < 4; ++k) add(h, h);
    add(kPose3DDim, h);
  }
  values_ = VectorXd::Zero(static_cast<Eigen::Index>(offset));
}

DPNetParams DPNetParams::initialized(const Architecture& arch, std::uint64_t seed) {
  DPNetParams p(arch);
  // Uniform bound sqrt(3 * gain / fan_in): gain 2 for ReLU layers, 1 for the
  // linear heads, and 1/2 for the last layer of each residual block so the
  // un-normalized residual sum does not grow with depth.
  std::vector<double> gain(p.layers_.size(), 2.0);
  if (arch.use_depthnet) gain[static_cast<std::size_t>(p.depthnet_layer(arch.depthnet_hidden_layers))] = 1.0;
  for (int stage = 0; stage < 2; ++stage) {
    gain[static_cast<std::size_t>(p.stage_layer(stage, kStageOut))] = 1.0;
    gain[static_cast<std::size_t>(p.stage_layer(stage, 2))] = 0.5;
    gain[static_cast<std::size_t>(p.stage_layer(stage, 4))] = 0.5;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < p.layers_.size(); ++k) {
    const auto& s = p.layers_[k];
    const double bound = std::sqrt(3.0 * gain[k] / s.in);
    std::uniform_real_distribution<double> u(-bound, bound);
    auto w = p.weight(static_cast<int>(k));
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
  }
  return p;
}

Eigen::Map<MatrixXd> DPNetParams::weight(int layer) {
  const auto& s = layers_.at(static_cast<std::size_t>(layer));
  return {values_.data() + s.offset, s.out, s.in};
}

Eigen::Map<const MatrixXd> DPNetParams::weight(int layer) const {
  const auto& s = layers_.at(static_cast<std::size_t>(layer));
  return {values_.data() + s.offset, s.out, s.in};
}

Eigen::Map<VectorXd> DPNetParams::bias(int layer) {
  const auto& s = layers_.at(static_cast<std::size_t>(layer));
  return {values_.data() + s.offset + static_cast<std::size_t>(s.out) * s.in, s.out};
}

Eigen::Map<const VectorXd> DPNetParams::bias(int layer) const {
  const auto& s = layers_.at(static_cast<std::size_t>(layer));
  return {values_.data() + s.offset + static_cast<std::size_t>(s.out) * s.in, s.out};
}

void DPNetParams::zero_stage(int stage) {
  for (int k = 0; k < kStageLayers; ++k) {
    weight(stage_layer(stage, k)).setZero();
    bias(stage_layer(stage, k)).setZero();
  }
}

bool DPNetParams::same_shape(const DPNetParams& other) const {
  if (!(arch_ == other.arch_) || layers_.size() != other.layers_.size()) return false;
  for (std::size_t k = 0; k < layers_.size(); ++k)
    if (layers_[k].out != other.layers_[k].out || layers_[k].in != other.layers_[k].in) return false;
  return values_.size() == other.values_.size();
}

DPNetBatch DPNetBatch::columns(const std::vector<Eigen::Index>& idx) const {
  DPNetBatch b;
  const auto n = static_cast<Eigen::Index>(idx.size());
  b.rank.resize(rank.rows(), n);
  b.pose2d.resize(pose2d.rows(), n);
  b.coarse_depth.resize(coarse_depth.rows(), n);
  b.pose3d.resize(pose3d.rows(), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto src = idx[static_cast<std::size_t>(c)];
    b.rank.col(c) = rank.col(src);
    b.pose2d.col(c) = pose2d.col(src);
    if (coarse_depth.size() > 0) b.coarse_depth.col(c) = coarse_depth.col(src);
    b.pose3d.col(c) = pose3d.col(src);
  }
  return b;
}

namespace {

// y = dropout(relu(W x + b))
struct HiddenCache {
  MatrixXd input;
  MatrixXd pre;
  MatrixXd mask;  // empty when dropout is inactive
  MatrixXd out;
};

struct StageCache {
  MatrixXd input;
  HiddenCache in;
  std::array<MatrixXd, 2> block_input;
  std::array<HiddenCache, 2> block_a;
  std::array<HiddenCache, 2> block_b;
  MatrixXd final_features;
};

struct ForwardCache {
  std::vector<HiddenCache> depth_hidden;
  MatrixXd depth_last_input;
  std::array<StageCache, 2> stage;
};

struct Dropout {
  bool active = false;
  double p = 0.0;
  std::mt19937_64* rng = nullptr;
};

void hidden_forward(const DPNetParams& params, int layer, const MatrixXd& x, const Dropout& drop,
                    HiddenCache& cache) {
  cache.input = x;
  cache.pre = (params.weight(layer) * x).colwise() + params.bias(layer);
  cache.out = cache.pre.cwiseMax(0.0);
  if (drop.active) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - drop.p);
    cache.mask.resize(cache.out.rows(), cache.out.cols());
    for (Eigen::Index c = 0; c < cache.mask.cols(); ++c)
      for (Eigen::Index r = 0; r < cache.mask.rows(); ++r)
        cache.mask(r, c) = u(*drop.rng) < drop.p ? 0.0 : keep_scale;
    cache.out.array() *= cache.mask.array();
  } else {
    cache.mask.resize(0, 0);
  }
}

// Accumulates the layer gradient and returns d(loss)/d(input).
MatrixXd hidden_backward(const DPNetParams& params, int layer, const HiddenCache& cache,
                         const MatrixXd& d_out, DPNetParams& grad) {
  MatrixXd d_pre = d_out;
  if (cache.mask.size() > 0) d_pre.array() *= cache.mask.array();
  d_pre.array() *= (cache.pre.array() > 0.0).cast<double>();
  grad.weight(layer).noalias() += d_pre * cache.input.transpose();
  grad.bias(layer) += d_pre.rowwise().sum();
  return params.weight(layer).transpose() * d_pre;
}

MatrixXd linear_forward(const DPNetParams& params, int layer, const MatrixXd& x) {
  return (params.weight(layer) * x).colwise() + params.bias(layer);
}

MatrixXd linear_backward(const DPNetParams& params, int layer, const MatrixXd& input,
                         const MatrixXd& d_out, DPNetParams& grad) {
  grad.weight(layer).noalias() += d_out * input.transpose();
  grad.bias(layer) += d_out.rowwise().sum();
  return params.weight(layer).transpose() * d_out;
}

MatrixXd stage_forward(const DPNetParams& params, int stage, const MatrixXd& x,
                       const MatrixXd* injected, const Dropout& drop, StageCache& cache) {
  cache.input = x;
  hidden_forward(params, params.stage_layer(stage, DPNetParams::kStageIn), x, drop, cache.in);
  MatrixXd h = cache.in.out;
  if (injected != nullptr) h += *injected;
  for (int b = 0; b < 2; ++b) {
    cache.block_input[static_cast<std::size_t>(b)] = h;
    hidden_forward(params, params.stage_layer(stage, 1 + 2 * b), h, drop,
                   cache.block_a[static_cast<std::size_t>(b)]);
    hidden_forward(params, params.stage_layer(stage, 2 + 2 * b),
                   cache.block_a[static_cast<std::size_t>(b)].out, drop,
                   cache.block_b[static_cast<std::size_t>(b)]);
    h += cache.block_b[static_cast<std::size_t>(b)].out;
  }
  cache.final_features = h;
  return linear_forward(params, params.stage_layer(stage, DPNetParams::kStageOut), h);
}

struct StageGrad {
  MatrixXd d_input;
  MatrixXd d_injected;
};

StageGrad stage_backward(const DPNetParams& params, int stage, const StageCache& cache,
                         const MatrixXd& d_out, const MatrixXd* d_features_extra,
                         DPNetParams& grad) {
  MatrixXd dh = linear_backward(params, params.stage_layer(stage, DPNetParams::kStageOut),
                                cache.final_features, d_out, grad);
  if (d_features_extra != nullptr) dh += *d_features_extra;
  for (int b = 1; b >= 0; --b) {
    const MatrixXd d_a = hidden_backward(params, params.stage_layer(stage, 2 + 2 * b),
                                         cache.block_b[static_cast<std::size_t>(b)], dh, grad);
    dh += hidden_backward(params, params.stage_layer(stage, 1 + 2 * b),
                          cache.block_a[static_cast<std::size_t>(b)], d_a, grad);
  }
  StageGrad g;
  g.d_injected = dh;
  g.d_input =
      hidden_backward(params, params.stage_layer(stage, DPNetParams::kStageIn), cache.in, dh, grad);
  return g;
}

DPNetOutput forward_impl(const DPNetParams& params, const MatrixXd& rank, const MatrixXd& pose2d,
                         const Dropout& drop, ForwardCache& cache) {
  const auto& arch = params.arch();
  if (rank.rows() != kRankInputDim || pose2d.rows() != kPose2DDim || rank.cols() != pose2d.cols())
    throw StructuralError("dpnet_forward: expected 256 x B ranking and 32 x B 2D inputs");
  const Eigen::Index batch = rank.cols();

  DPNetOutput out;
  MatrixXd stage_in(arch.stage_input_dim(), batch);
  if (arch.use_depthnet) {
    cache.depth_hidden.resize(static_cast<std::size_t>(arch.depthnet_hidden_layers));
    MatrixXd x = rank;
    for (int k = 0; k < arch.depthnet_hidden_layers; ++k) {
      hidden_forward(params, params.depthnet_layer(k), x, drop,
                     cache.depth_hidden[static_cast<std::size_t>(k)]);
      x = cache.depth_hidden[static_cast<std::size_t>(k)].out;
    }
    cache.depth_last_input = x;
    out.coarse_depth = linear_forward(params, params.depthnet_layer(arch.depthnet_hidden_layers), x);
    stage_in.topRows(kCoarseDepthDim) = out.coarse_depth;
  } else {
    stage_in.topRows(kRankInputDim) = rank;
  }
  stage_in.bottomRows(kPose2DDim) = pose2d;

  out.stage1 = stage_forward(params, 0, stage_in, nullptr, drop, cache.stage[0]);
  out.stage2 = out.stage1 +
               stage_forward(params, 1, stage_in, &cache.stage[0].final_features, drop, cache.stage[1]);
  return out;
}

Dropout make_dropout(Mode mode, double dropout_p, std::mt19937_64* rng) {
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw ConfigError("dropout_p must lie in [0, 1)");
  Dropout d;
  d.active = mode == Mode::Train && dropout_p > 0.0;
  d.p = dropout_p;
  d.rng = rng;
  if (d.active && rng == nullptr) throw ConfigError("train-mode dropout requires a generator");
  return d;
}

}  // namespace

DPNetOutput dpnet_forward(const DPNetParams& params, const MatrixXd& rank, const MatrixXd& pose2d,
                          Mode mode, double dropout_p, std::mt19937_64* rng) {
  ForwardCache cache;
  return forward_impl(params, rank, pose2d, make_dropout(mode, dropout_p, rng), cache);
}

double dpnet_loss(const DPNetOutput& out, const DPNetBatch& targets) {
  const double batch = static_cast<double>(targets.size());
  double loss = 0.0;
  if (out.coarse_depth.size() > 0)
    loss += (out.coarse_depth - targets.coarse_depth).squaredNorm() / (kCoarseDepthDim * batch);
  loss += (out.stage1 - targets.pose3d).squaredNorm() / (kPose3DDim * batch);
  loss += (out.stage2 - targets.pose3d).squaredNorm() / (kPose3DDim * batch);
  return loss;
}

LossAndGradient dpnet_backward(const DPNetParams& params, const DPNetBatch& batch, Mode mode,
                               double dropout_p, std::mt19937_64* rng) {
  ForwardCache cache;
  const auto out =
      forward_impl(params, batch.rank, batch.pose2d, make_dropout(mode, dropout_p, rng), cache);
  if (batch.pose3d.rows() != kPose3DDim || batch.pose3d.cols() != batch.size())
    throw StructuralError("dpnet_backward: pose target must be 48 x B");
  if (params.arch().use_depthnet &&
      (batch.coarse_depth.rows() != kCoarseDepthDim || batch.coarse_depth.cols() != batch.size()))
    throw StructuralError("dpnet_backward: coarse-depth target must be 16 x B");

  LossAndGradient res;
  res.loss = dpnet_loss(out, batch);
  res.grad = DPNetParams(params.arch());

  const double n = static_cast<double>(batch.size());
  const MatrixXd d_stage2 = 2.0 * (out.stage2 - batch.pose3d) / (kPose3DDim * n);
  const MatrixXd d_stage1 = 2.0 * (out.stage1 - batch.pose3d) / (kPose3DDim * n) + d_stage2;

  const auto g2 = stage_backward(params, 1, cache.stage[1], d_stage2, nullptr, res.grad);
  const auto g1 = stage_backward(params, 0, cache.stage[0], d_stage1, &g2.d_injected, res.grad);

  const auto& arch = params.arch();
  if (arch.use_depthnet) {
    MatrixXd d_o = (g1.d_input + g2.d_input).topRows(kCoarseDepthDim);
    d_o += 2.0 * (out.coarse_depth - batch.coarse_depth) / (kCoarseDepthDim * n);
    MatrixXd d = linear_backward(params, params.depthnet_layer(arch.depthnet_hidden_layers),
                                 cache.depth_last_input, d_o, res.grad);
    for (int k = arch.depthnet_hidden_layers - 1; k >= 0; --k)
      d = hidden_backward(params, params.depthnet_layer(k),
                          cache.depth_hidden[static_cast<std::size_t>(k)], d, res.grad);
  }
  return res;
}

AdamState AdamState::zeros(const DPNetParams& params) {
  AdamState s;
  s.m = VectorXd::Zero(static_cast<Eigen::Index>(params.size()));
  s.v = VectorXd::Zero(static_cast<Eigen::Index>(params.size()));
  return s;
}

void adam_step(DPNetParams& params, const DPNetParams& grads, AdamState& state, double lr,
               const AdamConfig& cfg) {
  if (!params.same_shape(grads)) throw StructuralError("adam_step: gradient shape mismatch");
  if (state.m.size() != params.values().size() || state.v.size() != params.values().size())
    throw StructuralError("adam_step: optimizer state shape mismatch");
  ++state.step;
  const auto& g = grads.values();
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params.values().array() -=
      lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.epsilon);
}

}  // namespace drpose
