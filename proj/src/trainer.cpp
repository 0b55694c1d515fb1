#include "drpose/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "drpose/errors.hpp"

namespace drpose {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("decay must lie in (0, 1]");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw ConfigError("dropout_p must lie in [0, 1)");
}

namespace {

constexpr double kMinStd = 1e-9;

void fit_columns(const MatrixXd& data, VectorXd& mean, VectorXd& sd) {
  mean = data.rowwise().mean();
  const MatrixXd centered = data.colwise() - mean;
  sd = (centered.rowwise().squaredNorm() / static_cast<double>(data.cols())).cwiseSqrt();
  for (Eigen::Index r = 0; r < sd.size(); ++r)
    if (!(sd(r) > kMinStd)) sd(r) = 1.0;
}

VectorXd flat2d(const Pose2D& p) {
  const auto f = root_center(p).flat();
  return Eigen::Map<const VectorXd>(f.data(), kPose2DDim);
}

VectorXd flat3d(const Pose3D& p) {
  const auto f = root_center(p).flat();
  return Eigen::Map<const VectorXd>(f.data(), kPose3DDim);
}

}  // namespace

NormStats NormStats::fit(std::span<const Sample> samples) {
  if (samples.empty()) throw InputError("NormStats::fit: empty dataset");
  MatrixXd p2(kPose2DDim, static_cast<Eigen::Index>(samples.size()));
  MatrixXd p3(kPose3DDim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    p2.col(static_cast<Eigen::Index>(i)) = flat2d(samples[i].pose2d);
    p3.col(static_cast<Eigen::Index>(i)) = flat3d(samples[i].pose3d);
  }
  NormStats s;
  fit_columns(p2, s.pose2d_mean, s.pose2d_std);
  fit_columns(p3, s.pose3d_mean, s.pose3d_std);
  return s;
}

VectorXd NormStats::normalize_2d(const Pose2D& p) const {
  return (flat2d(p) - pose2d_mean).cwiseQuotient(pose2d_std);
}

VectorXd NormStats::normalize_3d(const Pose3D& p) const {
  return (flat3d(p) - pose3d_mean).cwiseQuotient(pose3d_std);
}

Pose3D NormStats::denormalize_3d(const VectorXd& v) const {
  if (v.size() != kPose3DDim) throw StructuralError("denormalize_3d expects 48 values");
  const VectorXd mm = v.cwiseProduct(pose3d_std) + pose3d_mean;
  return Pose3D::from_flat(std::span<const double>(mm.data(), kPose3DDim));
}

DPNetBatch encode_batch(std::span<const Sample> samples, const NormStats& stats,
                        RankInput rank_input) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  DPNetBatch b;
  b.rank.resize(kRankInputDim, n);
  b.pose2d.resize(kPose2DDim, n);
  b.coarse_depth.resize(kCoarseDepthDim, n);
  b.pose3d.resize(kPose3DDim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (rank_input == RankInput::Constant) {
      b.rank.col(i).setConstant(0.5);
    } else {
      const auto flat = flatten_ranking(s.ranking);
      b.rank.col(i) = Eigen::Map<const VectorXd>(flat.data(), kRankInputDim);
    }
    b.pose2d.col(i) = stats.normalize_2d(s.pose2d);
    const auto order = depth_order(s.pose3d);
    b.coarse_depth.col(i) = Eigen::Map<const VectorXd>(order.normalized.data(), kCoarseDepthDim);
    b.pose3d.col(i) = stats.normalize_3d(s.pose3d);
  }
  return b;
}

double evaluate_loss(const DPNetParams& params, const DPNetBatch& set) {
  const Eigen::Index n = set.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (Eigen::Index start = 0; start < n; start += kPredictChunk) {
    const Eigen::Index len = std::min(kPredictChunk, n - start);
    DPNetBatch chunk;
    chunk.rank = set.rank.middleCols(start, len);
    chunk.pose2d = set.pose2d.middleCols(start, len);
    chunk.coarse_depth = set.coarse_depth.middleCols(start, len);
    chunk.pose3d = set.pose3d.middleCols(start, len);
    const auto out = dpnet_forward(params, chunk.rank, chunk.pose2d, Mode::Eval, 0.0, nullptr);
    total += dpnet_loss(out, chunk) * static_cast<double>(len);
  }
  return total / static_cast<double>(n);
}

TrainResult train(const DPNetBatch& train_set, const DPNetBatch& val_set, const Architecture& arch,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0) throw InputError("train: empty training set");

  TrainResult result;
  DPNetParams params = DPNetParams::initialized(arch, cfg.seed);
  AdamState adam = AdamState::zeros(params);
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0x5A5A5A5A5A5A5A5AULL);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(train_set.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  double best = std::numeric_limits<double>::infinity();
  result.params = params;
  double lr = cfg.learning_rate;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
      const DPNetBatch batch = train_set.columns(idx);
      auto lg = dpnet_backward(params, batch, Mode::Train, cfg.dropout_p, &dropout_rng);
      adam_step(params, lg.grad, adam, lr, cfg.adam);
      loss_sum += lg.loss * static_cast<double>(end - start);
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.learning_rate = lr;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.val_loss = evaluate_loss(params, val_set);
    result.history.push_back(rec);

    // Without a validation set the last epoch wins.
    const double score = std::isnan(rec.val_loss) ? -static_cast<double>(epoch) : rec.val_loss;
    if (score < best) {
      best = score;
      result.params = params;
      result.best_epoch = rec.epoch;
    }
    lr *= cfg.decay;
  }
  return result;
}

namespace {

std::vector<Pose3D> predict_chunks(std::span<const Sample> samples, const Model& model,
                                   bool parallel) {
  if (!model.stats) throw InputError("predict: model has no normalization statistics");
  const auto& stats = *model.stats;
  std::vector<Pose3D> out(samples.size());
  const auto n = static_cast<long>(samples.size());
  const long chunks = (n + kPredictChunk - 1) / kPredictChunk;
  auto run_chunk = [&](long c) {
    const long start = c * kPredictChunk;
    const long len = std::min<long>(kPredictChunk, n - start);
    const auto part = samples.subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(len));
    const DPNetBatch b = encode_batch(part, stats, model.rank_input);
    const auto res = dpnet_forward(model.params, b.rank, b.pose2d, Mode::Eval, 0.0, nullptr);
    for (long i = 0; i < len; ++i)
      out[static_cast<std::size_t>(start + i)] =
          root_center(stats.denormalize_3d(res.stage2.col(static_cast<Eigen::Index>(i))));
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  }
  return out;
}

}  // namespace

Pose3D predict_pose(const RankingMatrix& m, const Pose2D& p2d, const Model& model) {
  Sample s;
  s.ranking = m;
  s.pose2d = p2d;
  return predict_chunks(std::span<const Sample>(&s, 1), model, false).front();
}

std::vector<Pose3D> predict_dataset(std::span<const Sample> samples, const Model& model) {
  return predict_chunks(samples, model, true);
}

std::vector<Pose3D> predict_dataset_serial(std::span<const Sample> samples, const Model& model) {
  return predict_chunks(samples, model, false);
}

}  // namespace drpose
