#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraudlab/common.hpp"

namespace fraudlab {

// Average unsuccessful-search path length in a BST of n nodes:
// c(n) = 2 H(n-1) - 2(n-1)/n, H(i) = ln(i) + Euler-Mascheroni.
double iforest_c(std::size_t n);

struct IsolationNode {
  int split_feature = -1;  // -1 for leaves
  double split_value = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t size = 0;   // training points reaching this node
  std::uint32_t depth = 0;  // edges from root
};

struct IsolationTree {
  std::vector<IsolationNode> nodes;  // nodes[0] is the root
};

struct IsolationForestConfig {
  std::size_t n_trees = 100;
  double contamination = 0.01;
  std::size_t subsample = 256;
  std::uint64_t seed = 0;
};

struct IsolationForestModel {
  std::vector<IsolationTree> trees;
  std::size_t subsample = 256;  // effective psi = min(256, n)
  double contamination = 0.01;
  double score_threshold = 0.0;
  std::uint64_t seed = 0;
};

// Builds the forest and sets the threshold at the (1 - contamination)
// nearest-rank quantile of training scores.
IsolationForestModel iforest_fit(const Dataset& matrix,
                                 const IsolationForestConfig& cfg = {});

// s(x) = 2^(-E[h(x)] / c(psi)), strictly inside (0, 1).
double iforest_score(const IsolationForestModel& model, std::span<const double> x);

std::vector<double> iforest_score_all(const IsolationForestModel& model,
                                      const Dataset& matrix);

// flag = score > threshold
std::vector<bool> iforest_flag(const IsolationForestModel& model,
                               const std::vector<double>& scores);

// Training-set flag set of exactly k = n - ceil((1-c)*n) rows: the top-k
// scores, ties broken by lower row index. This is what keeps the flagged
// fraction pinned at the contamination rate even on degenerate data.
std::vector<bool> top_k_flags(const std::vector<double>& scores, double contamination);

}  // namespace fraudlab
