#include "drpose/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "drpose/errors.hpp"

namespace drpose {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

AccuracyMatrix AccuracyMatrix::uniform(double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw InputError("accuracy must lie in [0, 1]");
  AccuracyMatrix a;
  a.p.fill(accuracy);
  for (int i = 0; i < kNumJoints; ++i) a.p[RankingMatrix::index(i, i)] = 1.0;
  return a;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ProbMatrix prob_matrix_from_features(const JointFeatures& f) {
  ProbMatrix p;
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = i + 1; j < kNumJoints; ++j) {
      const double pij = logistic(f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)]);
      p.at(i, j) = pij;
      // Assigning the complement keeps P_ij + P_ji = 1 to the last bit.
      p.at(j, i) = 1.0 - pij;
    }
  }
  return p;
}

double rank_cost(const JointFeatures& f, const RankingMatrix& m) {
  double c = 0.0;
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = 0; j < kNumJoints; ++j) {
      const double fij = f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)];
      c += softplus(fij) - m(i, j) * fij;
    }
  }
  return c;
}

double rank_cost_cross_entropy(const JointFeatures& f, const RankingMatrix& m) {
  double c = 0.0;
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = 0; j < kNumJoints; ++j) {
      const double fij = f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)];
      const double pij = std::exp(fij) / (1.0 + std::exp(fij));
      const double mij = m(i, j);
      if (mij > 0.0) c -= mij * std::log(pij);
      if (mij < 1.0) c -= (1.0 - mij) * std::log(1.0 - pij);
    }
  }
  return c;
}

JointFeatures rank_cost_gradient(const JointFeatures& f, const RankingMatrix& m) {
  JointFeatures g{};
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = 0; j < kNumJoints; ++j) {
      const double fij = f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)];
      const double r = logistic(fij) - m(i, j);
      g[static_cast<std::size_t>(i)] += r;
      g[static_cast<std::size_t>(j)] -= r;
    }
  }
  return g;
}

RankingMatrix discretize(const ProbMatrix& p, double threshold) {
  if (!(threshold > 0.0 && threshold < 0.5))
    throw InputError("discretize: threshold must lie in (0, 0.5)");
  RankingMatrix m;
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = i + 1; j < kNumJoints; ++j) {
      const double v = p(i, j);
      double d = 0.5;
      if (v > 0.5 + threshold)
        d = 1.0;
      else if (v < 0.5 - threshold)
        d = 0.0;
      m.set_pair(i, j, d);
    }
  }
  return m;
}

RankingMatrix noisy_ranking_oracle(const RankingMatrix& truth, const AccuracyMatrix& acc,
                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RankingMatrix out = truth;
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = i + 1; j < kNumJoints; ++j) {
      const double p = acc(i, j);
      if (!(p >= 0.0 && p <= 1.0)) throw InputError("accuracy entries must lie in [0, 1]");
      if (!(u(rng) < 1.0 - p)) continue;
      const double v = truth(i, j);
      if (v == 0.5)
        out.set_pair(i, j, u(rng) < 0.5 ? 0.0 : 1.0);
      else
        out.set_pair(i, j, 1.0 - v);
    }
  }
  return out;
}

AccuracyMatrix pairwise_accuracy(std::span<const RankingMatrix> preds,
                                 std::span<const RankingMatrix> gts) {
  if (preds.empty()) throw InputError("pairwise_accuracy: empty input");
  if (preds.size() != gts.size())
    throw InputError("pairwise_accuracy: prediction and ground-truth counts differ");
  AccuracyMatrix a;
  std::array<long, kNumPairs> hits{};
  for (std::size_t s = 0; s < preds.size(); ++s) {
    const auto& pe = preds[s].entries();
    const auto& ge = gts[s].entries();
    for (std::size_t k = 0; k < pe.size(); ++k) hits[k] += pe[k] == ge[k] ? 1 : 0;
  }
  for (std::size_t k = 0; k < hits.size(); ++k) {
    a.count[k] = static_cast<long>(preds.size());
    a.p[k] = static_cast<double>(hits[k]) / static_cast<double>(preds.size());
  }
  return a;
}

std::vector<int> topo_sort_ranks(std::span<const double> row_major, int n) {
  if (n < 1 || row_major.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw InputError("topo_sort_ranks: matrix size does not match joint count");
  const auto rel = [&](int i, int j) { return row_major[static_cast<std::size_t>(i * n + j)]; };
  // rel(i, j) == 1 means i is deeper, so j must be emitted before i.
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rel(i, j) == 1.0) ++indegree[static_cast<std::size_t>(i)];

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  std::vector<int> ranks(static_cast<std::size_t>(n), 0);
  for (int rank = 1; rank <= n; ++rank) {
    int pick = -1;
    for (int j = 0; j < n; ++j) {
      if (done[static_cast<std::size_t>(j)]) continue;
      if (pick < 0 || indegree[static_cast<std::size_t>(j)] < indegree[static_cast<std::size_t>(pick)])
        pick = j;
    }
    done[static_cast<std::size_t>(pick)] = true;
    ranks[static_cast<std::size_t>(pick)] = rank;
    for (int i = 0; i < n; ++i)
      if (!done[static_cast<std::size_t>(i)] && rel(i, pick) == 1.0)
        --indegree[static_cast<std::size_t>(i)];
  }
  return ranks;
}

DepthOrder topo_sort_order(const RankingMatrix& m) {
  const auto r = topo_sort_ranks(m.entries(), kNumJoints);
  std::array<int, kNumJoints> ranks{};
  std::copy(r.begin(), r.end(), ranks.begin());
  return DepthOrder::from_ranks(ranks);
}

}  // namespace drpose
