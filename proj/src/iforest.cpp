#include "fraudlab/iforest.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fraudlab {

namespace {

constexpr double kEulerMascheroni = 0.5772156649;

struct TreeBuilder {
  const Dataset& data;
  std::vector<IsolationNode>& nodes;
  Rng& rng;
  std::uint32_t max_depth;

  // builds the subtree over indices [begin, end), returns node id
  std::int32_t build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                     std::uint32_t depth) {
    const auto id = static_cast<std::int32_t>(nodes.size());
    nodes.push_back({});
    nodes[id].size = static_cast<std::uint32_t>(end - begin);
    nodes[id].depth = depth;
    const std::size_t count = end - begin;
    if (count <= 1 || depth >= max_depth) return id;

    // pick uniformly among features with positive range
    double mins[8], maxs[8];
    int candidates[8];
    int n_cand = 0;
    for (std::size_t c = 0; c < data.cols; ++c) {
      double lo = data.at(idx[begin], c), hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = data.at(idx[i], c);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > lo) {
        candidates[n_cand] = static_cast<int>(c);
        mins[n_cand] = lo;
        maxs[n_cand] = hi;
        ++n_cand;
      }
    }
    if (n_cand == 0) return id;  // zero range on all features

    const int pick = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_cand)));
    const int feature = candidates[pick];
    const double split = rng.uniform(mins[pick], maxs[pick]);

    auto mid_it = std::partition(
        idx.begin() + static_cast<std::ptrdiff_t>(begin),
        idx.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return data.at(r, static_cast<std::size_t>(feature)) < split; });
    const auto mid = static_cast<std::size_t>(mid_it - idx.begin());
    if (mid == begin || mid == end) return id;  // degenerate split, keep as leaf

    nodes[id].split_feature = feature;
    nodes[id].split_value = split;
    const std::int32_t l = build(idx, begin, mid, depth + 1);
    const std::int32_t r = build(idx, mid, end, depth + 1);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }
};

double path_length(const IsolationTree& tree, std::span<const double> x) {
  std::int32_t id = 0;
  for (;;) {
    const IsolationNode& n = tree.nodes[static_cast<std::size_t>(id)];
    if (n.split_feature < 0) {
      return static_cast<double>(n.depth) + iforest_c(n.size);
    }
    id = x[static_cast<std::size_t>(n.split_feature)] < n.split_value ? n.left : n.right;
  }
}

}  // namespace

double iforest_c(std::size_t n) {
  if (n <= 1) return 0.0;
  const double nd = static_cast<double>(n);
  const double h = std::log(nd - 1.0) + kEulerMascheroni;
  return 2.0 * h - 2.0 * (nd - 1.0) / nd;
}

IsolationForestModel iforest_fit(const Dataset& matrix, const IsolationForestConfig& cfg) {
  const std::size_t n = matrix.rows;
  if (n < 2) throw std::invalid_argument("iforest_fit: need at least 2 rows");
  if (!(cfg.contamination > 0.0) || cfg.contamination >= 0.5) {
    throw std::invalid_argument("iforest_fit: contamination outside (0, 0.5)");
  }

  IsolationForestModel model;
  model.contamination = cfg.contamination;
  model.seed = cfg.seed;
  model.subsample = std::min(cfg.subsample, n);
  const auto max_depth = static_cast<std::uint32_t>(
      std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(model.subsample, 2)))));

  Rng base(cfg.seed);
  model.trees.resize(cfg.n_trees);
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    Rng rng = base.fork(t);  // per-tree stream: parallel-safe, order-free
    // uniform subsample without replacement (partial Fisher-Yates)
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < model.subsample; ++i) {
      const std::size_t j = i + rng.uniform_int(n - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(model.subsample);

    model.trees[t].nodes.reserve(2 * model.subsample);
    TreeBuilder builder{matrix, model.trees[t].nodes, rng, max_depth};
    builder.build(idx, 0, idx.size(), 0);
  }

  std::vector<double> scores = iforest_score_all(model, matrix);
  model.score_threshold =
      nearest_rank_quantile(scores, 1.0 - cfg.contamination);
  return model;
}

double iforest_score(const IsolationForestModel& model, std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("iforest_score: non-finite input");
  }
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += path_length(tree, x);
  const double eh = sum / static_cast<double>(model.trees.size());
  return std::pow(2.0, -eh / iforest_c(model.subsample));
}

std::vector<double> iforest_score_all(const IsolationForestModel& model,
                                      const Dataset& matrix) {
  std::vector<double> out(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    out[i] = iforest_score(model, matrix.row(i));
  }
  return out;
}

std::vector<bool> iforest_flag(const IsolationForestModel& model,
                               const std::vector<double>& scores) {
  std::vector<bool> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = scores[i] > model.score_threshold;
  }
  return out;
}

std::vector<bool> top_k_flags(const std::vector<double>& scores, double contamination) {
  const std::size_t n = scores.size();
  std::vector<bool> out(n, false);
  if (n == 0) return out;
  const std::size_t keep = nearest_rank_index(n, 1.0 - contamination) + 1;
  const std::size_t k = n - keep;
  if (k == 0) return out;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // highest score first; equal scores prefer the lower row index
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  for (std::size_t i = 0; i < k; ++i) out[idx[i]] = true;
  return out;
}

}  // namespace fraudlab
