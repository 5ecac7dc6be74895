#include "fraudlab/cluster.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace fraudlab {

namespace {

std::size_t nearest_centroid(const Dataset& centroids, std::span<const double> x,
                             double* dist_out = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    const double d = sq_dist(centroids.row(c), x);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

KMeansModel kmeans_single(const Dataset& matrix, std::size_t k, std::size_t max_iter,
                          Rng rng) {
  const std::size_t n = matrix.rows, cols = matrix.cols;

  // k-means++ seeding
  Dataset centroids;
  centroids.rows = k;
  centroids.cols = cols;
  centroids.values.resize(k * cols);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.uniform_int(n);
  std::copy_n(matrix.row(first).data(), cols, centroids.values.begin());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(centroids.row(c - 1), matrix.row(i)));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_int(n);
    }
    std::copy_n(matrix.row(pick).data(), cols,
                centroids.values.begin() + static_cast<std::ptrdiff_t>(c * cols));
  }

  std::vector<std::size_t> labels(n, 0), prev(n, SIZE_MAX), counts(k);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = nearest_centroid(centroids, matrix.row(i));

    // repair empty clusters: steal the farthest point from the largest cluster
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t l : labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      const std::size_t big =
          static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) -
                                   counts.begin());
      std::size_t far_i = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != big) continue;
        const double d = sq_dist(centroids.row(big), matrix.row(i));
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      labels[far_i] = c;
      --counts[big];
      ++counts[c];
    }

    if (labels == prev) break;
    prev = labels;

    std::fill(centroids.values.begin(), centroids.values.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < cols; ++j) centroids.at(labels[i], j) += matrix.at(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        centroids.at(c, j) /= static_cast<double>(counts[c]);
      }
    }
  }

  KMeansModel model;
  model.centroids = std::move(centroids);
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    nearest_centroid(model.centroids, matrix.row(i), &d);
    inertia += d;
  }
  model.inertia = inertia;
  return model;
}

}  // namespace

KMeansModel kmeans_fit(const Dataset& matrix, std::size_t k, std::size_t n_init,
                       std::size_t max_iter, std::uint64_t seed) {
  if (matrix.rows < k) throw std::invalid_argument("kmeans_fit: n < k");
  Rng base(seed);
  KMeansModel best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t init = 0; init < n_init; ++init) {
    KMeansModel m = kmeans_single(matrix, k, max_iter, base.fork(init));
    if (m.inertia < best.inertia) best = std::move(m);
  }
  best.n_init = n_init;
  best.max_iter = max_iter;
  best.seed = seed;
  return best;
}

std::vector<std::size_t> kmeans_assign(const KMeansModel& model, const Dataset& matrix) {
  std::vector<std::size_t> labels(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    labels[i] = nearest_centroid(model.centroids, matrix.row(i));
  }
  return labels;
}

std::vector<double> elbow_curve(const Dataset& matrix, std::size_t k_max,
                                std::size_t n_init, std::size_t max_iter,
                                std::uint64_t seed) {
  if (k_max > matrix.rows) throw std::invalid_argument("elbow_curve: k_max > n");
  std::vector<double> inertias;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= k_max; ++k) {
    const KMeansModel m = kmeans_fit(matrix, k, n_init, max_iter, seed);
    // the nesting property guarantees a non-increasing optimum; enforce it
    // against restart luck by keeping the best seen
    prev = std::min(prev, m.inertia);
    inertias.push_back(prev);
  }
  return inertias;
}

double silhouette(const Dataset& matrix, const std::vector<std::size_t>& labels,
                  std::size_t subsample, std::uint64_t seed) {
  const std::size_t n = matrix.rows;
  std::size_t k = 0;
  for (std::size_t l : labels) k = std::max(k, l + 1);
  if (k < 2) throw std::invalid_argument("silhouette: need >= 2 clusters");

  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  if (n > subsample) {
    Rng rng(seed);
    for (std::size_t i = 0; i < subsample; ++i) {
      const std::size_t j = i + rng.uniform_int(n - i);
      std::swap(rows[i], rows[j]);
    }
    rows.resize(subsample);
  }

  std::vector<std::size_t> cluster_sizes(k, 0);
  for (std::size_t l : labels) ++cluster_sizes[l];

  double total = 0.0;
  std::vector<double> sum_d(k);
  for (std::size_t i : rows) {
    std::fill(sum_d.begin(), sum_d.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum_d[labels[j]] += std::sqrt(sq_dist(matrix.row(i), matrix.row(j)));
    }
    const std::size_t li = labels[i];
    if (cluster_sizes[li] <= 1) continue;  // singleton scores 0
    const double a = sum_d[li] / static_cast<double>(cluster_sizes[li] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == li || cluster_sizes[c] == 0) continue;
      b = std::min(b, sum_d[c] / static_cast<double>(cluster_sizes[c]));
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(rows.size());
}

namespace {

// uniform grid over cells of side eps; neighbors live in adjacent cells
class GridIndex {
 public:
  GridIndex(const Dataset& data, double eps) : data_(data), eps_(eps) {
    cells_.reserve(data.rows);
    for (std::size_t i = 0; i < data.rows; ++i) {
      cells_[key(data.row(i))].push_back(i);
    }
  }

  void neighbors(std::size_t i, std::vector<std::size_t>& out) const {
    out.clear();
    const auto x = data_.row(i);
    std::array<std::int64_t, 4> base{};
    for (std::size_t d = 0; d < data_.cols; ++d) {
      base[d] = static_cast<std::int64_t>(std::floor(x[d] / eps_));
    }
    const std::size_t dims = data_.cols;
    std::array<std::int64_t, 4> off{};
    visit(0, dims, base, off, x, i, out);
  }

 private:
  using Key = std::array<std::int64_t, 4>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = 14695981039346656037ULL;
      for (std::int64_t v : k) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ULL;
      }
      return h;
    }
  };

  Key key(std::span<const double> x) const {
    Key k{};
    for (std::size_t d = 0; d < data_.cols; ++d) {
      k[d] = static_cast<std::int64_t>(std::floor(x[d] / eps_));
    }
    return k;
  }

  void visit(std::size_t dim, std::size_t dims, const Key& base, Key& off,
             std::span<const double> x, std::size_t self,
             std::vector<std::size_t>& out) const {
    if (dim == dims) {
      const auto it = cells_.find(off);
      if (it == cells_.end()) return;
      const double eps2 = eps_ * eps_;
      for (std::size_t j : it->second) {
        if (sq_dist(x, data_.row(j)) <= eps2) out.push_back(j);
      }
      return;
    }
    for (std::int64_t d = -1; d <= 1; ++d) {
      off[dim] = base[dim] + d;
      visit(dim + 1, dims, base, off, x, self, out);
    }
  }

  const Dataset& data_;
  double eps_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool lex_less(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

DbscanResult dbscan(const Dataset& matrix, double eps, std::size_t min_samples,
                    std::size_t grid_threshold) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_samples < 1) throw std::invalid_argument("dbscan: min_samples must be >= 1");
  const std::size_t n = matrix.rows;

  DbscanResult res;
  res.eps = eps;
  res.min_samples = min_samples;
  res.labels.assign(n, kDbscanNoise);
  res.core_flags.assign(n, false);
  if (n == 0) return res;

  const bool use_grid = n > grid_threshold && matrix.cols <= 4;
  std::unique_ptr<GridIndex> grid;
  if (use_grid) grid = std::make_unique<GridIndex>(matrix, eps);
  const double eps2 = eps * eps;

  auto collect_neighbors = [&](std::size_t i, std::vector<std::size_t>& out) {
    if (use_grid) {
      grid->neighbors(i, out);
    } else {
      out.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (sq_dist(matrix.row(i), matrix.row(j)) <= eps2) out.push_back(j);
      }
    }
  };

  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    collect_neighbors(i, nbrs[i]);
    res.core_flags[i] = nbrs[i].size() >= min_samples;  // includes the point itself
  }

  // connected components of the core points
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!res.core_flags[i]) continue;
    for (std::size_t j : nbrs[i]) {
      if (res.core_flags[j]) uf.unite(i, j);
    }
  }

  // border points attach to the nearest core neighbor (lex tie-break)
  std::vector<std::size_t> owner(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (res.core_flags[i]) {
      owner[i] = i;
      continue;
    }
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j : nbrs[i]) {
      if (!res.core_flags[j]) continue;
      const double d = sq_dist(matrix.row(i), matrix.row(j));
      if (d < best_d ||
          (d == best_d && best != n && lex_less(matrix.row(j), matrix.row(best)))) {
        best_d = d;
        best = j;
      }
    }
    owner[i] = best;
  }

  // cluster ids ordered by lowest member row index (core or border)
  std::map<std::size_t, std::size_t> first_member;  // component root -> min row
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] == n) continue;
    const std::size_t root = uf.find(owner[i]);
    auto [it, inserted] = first_member.try_emplace(root, i);
    if (!inserted && i < it->second) it->second = i;
  }
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (min row, root)
  for (const auto& [root, first] : first_member) order.emplace_back(first, root);
  std::sort(order.begin(), order.end());
  std::map<std::size_t, std::int32_t> root_to_id;
  for (const auto& [first, root] : order) {
    root_to_id.emplace(root, static_cast<std::int32_t>(root_to_id.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] != n) res.labels[i] = root_to_id.at(uf.find(owner[i]));
  }
  return res;
}

std::vector<double> k_distance(const Dataset& matrix, std::size_t k) {
  const std::size_t n = matrix.rows;
  if (n <= k) throw std::invalid_argument("k_distance: need n > k");
  std::vector<double> result(n);
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d[m++] = sq_dist(matrix.row(i), matrix.row(j));
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    result[i] = std::sqrt(d[k - 1]);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::pair<PcaModel, Dataset> pca_project(const Dataset& matrix) {
  const std::size_t n = matrix.rows;
  if (n < 2) throw std::invalid_argument("pca_project: need n >= 2");
  const std::size_t dim = matrix.cols;
  if (dim != 4) throw std::invalid_argument("pca_project: expects 4 columns");

  PcaModel model;
  for (std::size_t c = 0; c < dim; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += matrix.at(i, c);
    model.means[c] = s / static_cast<double>(n);
  }

  double cov[4][4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    double d[4];
    for (std::size_t c = 0; c < dim; ++c) d[c] = matrix.at(i, c) - model.means[c];
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a; b < dim; ++b) cov[a][b] += d[a] * d[b];
    }
  }
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      cov[a][b] /= static_cast<double>(n);
      cov[b][a] = cov[a][b];
    }
  }

  // cyclic Jacobi on the symmetric 4x4
  double v[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < 4; ++p) {
      for (std::size_t q = p + 1; q < 4; ++q) off += cov[p][q] * cov[p][q];
    }
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < 4; ++p) {
      for (std::size_t q = p + 1; q < 4; ++q) {
        if (std::abs(cov[p][q]) < 1e-18) continue;
        const double theta = (cov[q][q] - cov[p][p]) / (2.0 * cov[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < 4; ++i) {
          const double aip = cov[i][p], aiq = cov[i][q];
          cov[i][p] = c * aip - s * aiq;
          cov[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < 4; ++i) {
          const double api = cov[p][i], aqi = cov[q][i];
          cov[p][i] = c * api - s * aqi;
          cov[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < 4; ++i) {
          const double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
  }

  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cov[a][a] > cov[b][b]; });
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t col = order[c];
    model.explained_variance[c] = std::max(cov[col][col], 0.0);
    std::size_t max_i = 0;
    for (std::size_t i = 1; i < 4; ++i) {
      if (std::abs(v[i][col]) > std::abs(v[max_i][col])) max_i = i;
    }
    const double sign = v[max_i][col] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < 4; ++i) model.components[c][i] = sign * v[i][col];
  }

  Dataset proj;
  proj.rows = n;
  proj.cols = 2;
  proj.values.resize(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        s += (matrix.at(i, j) - model.means[j]) * model.components[c][j];
      }
      proj.at(i, c) = s;
    }
  }
  return {model, std::move(proj)};
}

}  // namespace fraudlab
