#pragma once

#include <array>
#include <random>
#include <span>
#include <vector>

#include "drpose/skeleton.hpp"

namespace drpose {

// One scalar feature per joint; pairwise features are differences F_i - F_j.
using JointFeatures = std::array<double, kNumJoints>;

// Soft pairwise relation: p(i, j) is the probability that joint i lies
// deeper than joint j.
class ProbMatrix {
 public:
  ProbMatrix() { entries_.fill(0.5); }

  double operator()(int i, int j) const { return entries_[RankingMatrix::index(i, j)]; }
  double& at(int i, int j) { return entries_[RankingMatrix::index(i, j)]; }
  const std::array<double, kNumPairs>& entries() const { return entries_; }

 private:
  std::array<double, kNumPairs> entries_{};
};

struct AccuracyMatrix {
  std::array<double, kNumPairs> p{};
  std::array<long, kNumPairs> count{};

  double operator()(int i, int j) const { return p[RankingMatrix::index(i, j)]; }

  // Every pair correct with probability `accuracy`; counts are left at zero.
  static AccuracyMatrix uniform(double accuracy);
};

double logistic(double x);

ProbMatrix prob_matrix_from_features(const JointFeatures& f);

// Sum over all ordered pairs of -M_ij F_ij + log(1 + exp(F_ij)).
double rank_cost(const JointFeatures& f, const RankingMatrix& m);

// The same cost written as binary cross-entropy on P_ij. Kept as an
// independent route for checking rank_cost.
double rank_cost_cross_entropy(const JointFeatures& f, const RankingMatrix& m);

JointFeatures rank_cost_gradient(const JointFeatures& f, const RankingMatrix& m);

RankingMatrix discretize(const ProbMatrix& p, double threshold = 0.1);

// Flips each unordered pair (i < j) with probability 1 - acc(i, j). A flipped
// tie becomes a strict relation chosen by a fair coin.
RankingMatrix noisy_ranking_oracle(const RankingMatrix& truth, const AccuracyMatrix& acc,
                                   std::mt19937_64& rng);

// Fraction of samples where the predicted entry equals the ground truth.
AccuracyMatrix pairwise_accuracy(std::span<const RankingMatrix> preds,
                                 std::span<const RankingMatrix> gts);

// Kahn topological sort over strict relations. When every remaining joint
// has incoming edges the lowest-index joint among those with the fewest is
// emitted next, which breaks the cycle.
DepthOrder topo_sort_order(const RankingMatrix& m);

// Same algorithm on an n x n row-major relation matrix; returns 1-based ranks.
std::vector<int> topo_sort_ranks(std::span<const double> row_major, int n);

}  // namespace drpose
