#include "fraudlab/ocsvm.hpp"

#include <cmath>
#include <list>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace fraudlab {

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
  return std::exp(-gamma * sq_dist(x, y));
}

namespace {

// fixed-size LRU cache of kernel rows
class KernelCache {
 public:
  KernelCache(const Dataset& data, double gamma, std::size_t capacity)
      : data_(data), gamma_(gamma), capacity_(std::max<std::size_t>(capacity, 2)) {}

  const std::vector<double>& row(std::size_t i) {
    auto it = map_.find(i);
    if (it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    if (map_.size() >= capacity_) {
      map_.erase(lru_.back());
      lru_.pop_back();
    }
    std::vector<double> r(data_.rows);
    const auto xi = data_.row(i);
    for (std::size_t j = 0; j < data_.rows; ++j) {
      r[j] = std::exp(-gamma_ * sq_dist(xi, data_.row(j)));
    }
    lru_.push_front(i);
    auto [nit, ok] = map_.emplace(i, std::make_pair(std::move(r), lru_.begin()));
    (void)ok;
    return nit->second.first;
  }

 private:
  const Dataset& data_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> map_;
};

}  // namespace

OcsvmModel ocsvm_fit(const Dataset& matrix, const OcsvmConfig& cfg) {
  if (matrix.rows < 1) throw std::invalid_argument("ocsvm_fit: empty matrix");
  if (!(cfg.nu > 0.0) || cfg.nu > 1.0) throw std::invalid_argument("ocsvm_fit: nu outside (0,1]");

  // subsample above the cap, seeded
  std::vector<std::size_t> sel(matrix.rows);
  std::iota(sel.begin(), sel.end(), 0);
  if (matrix.rows > cfg.subsample_cap) {
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < cfg.subsample_cap; ++i) {
      const std::size_t j = i + rng.uniform_int(matrix.rows - i);
      std::swap(sel[i], sel[j]);
    }
    sel.resize(cfg.subsample_cap);
    std::sort(sel.begin(), sel.end());
  }

  Dataset train;
  train.rows = sel.size();
  train.cols = matrix.cols;
  train.values.reserve(train.rows * train.cols);
  for (std::size_t r : sel) {
    const auto row = matrix.row(r);
    train.values.insert(train.values.end(), row.begin(), row.end());
  }

  const std::size_t n = train.rows;
  const double c_box = 1.0 / (cfg.nu * static_cast<double>(n));
  const double eps = 1e-12;

  // feasible start: spread the unit mass over the first ceil(nu*n) points
  std::vector<double> alpha(n, 0.0);
  double remaining = 1.0;
  for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
    const double a = std::min(c_box, remaining);
    alpha[i] = a;
    remaining -= a;
  }

  KernelCache cache(train, cfg.gamma, std::min<std::size_t>(n, 1024));

  // gradient g = K alpha, maintained incrementally
  std::vector<double> grad(n, 0.0);
  double objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] <= 0.0) continue;
    const auto& kj = cache.row(j);
    for (std::size_t k = 0; k < n; ++k) grad[k] += alpha[j] * kj[k];
  }
  for (std::size_t k = 0; k < n; ++k) objective += 0.5 * alpha[k] * grad[k];

  OcsvmModel model;
  model.gamma = cfg.gamma;
  if (cfg.record_objective) model.objective_history.push_back(objective);

  std::size_t iter = 0;
  for (;; ++iter) {
    // maximal violating pair: mass can move from i_low (alpha > 0, largest
    // gradient) to i_up (alpha < C, smallest gradient)
    std::size_t i_up = n, i_low = n;
    double g_up = 0.0, g_low = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (alpha[k] < c_box - eps && (i_up == n || grad[k] < g_up)) {
        i_up = k;
        g_up = grad[k];
      }
      if (alpha[k] > eps && (i_low == n || grad[k] > g_low)) {
        i_low = k;
        g_low = grad[k];
      }
    }
    if (i_up == n || i_low == n || g_low - g_up < cfg.tol) break;
    if (iter >= cfg.max_passes) {
      throw std::runtime_error("ocsvm_fit: no convergence after " +
                               std::to_string(iter) + " updates, residual " +
                               std::to_string(g_low - g_up));
    }

    const auto& k_up = cache.row(i_up);
    const auto& k_low = cache.row(i_low);
    const double eta = k_up[i_up] + k_low[i_low] - 2.0 * k_up[i_low];
    double t = eta > 1e-15 ? (g_low - g_up) / eta : c_box;
    t = std::min({t, alpha[i_low], c_box - alpha[i_up]});

    alpha[i_up] += t;
    alpha[i_low] -= t;
    objective += 0.5 * t * t * eta - t * (g_low - g_up);
    for (std::size_t k = 0; k < n; ++k) grad[k] += t * (k_up[k] - k_low[k]);
    if (cfg.record_objective) model.objective_history.push_back(objective);
    if (cfg.on_update) cfg.on_update(alpha);
  }

  // rho from margin support vectors; fall back to the violation midpoint
  double rho_sum = 0.0;
  std::size_t rho_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (alpha[k] > 1e-8 && alpha[k] < c_box - 1e-8) {
      rho_sum += grad[k];
      ++rho_count;
    }
  }
  if (rho_count > 0) {
    model.rho = rho_sum / static_cast<double>(rho_count);
  } else {
    double lo = 0.0, hi = 0.0;
    bool any_lo = false, any_hi = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (alpha[k] > eps && (!any_lo || grad[k] > lo)) { lo = grad[k]; any_lo = true; }
      if (alpha[k] < c_box - eps && (!any_hi || grad[k] < hi)) { hi = grad[k]; any_hi = true; }
    }
    model.rho = any_lo && any_hi ? 0.5 * (lo + hi) : (any_lo ? lo : hi);
  }

  // prune tiny alphas, keep the support set
  model.support_vectors.cols = train.cols;
  for (std::size_t k = 0; k < n; ++k) {
    if (alpha[k] > 1e-12) {
      const auto row = train.row(k);
      model.support_vectors.values.insert(model.support_vectors.values.end(),
                                          row.begin(), row.end());
      model.alphas.push_back(alpha[k]);
      ++model.support_vectors.rows;
    }
  }
  return model;
}

double ocsvm_decision(const OcsvmModel& model, std::span<const double> x) {
  double f = 0.0;
  for (std::size_t i = 0; i < model.support_vectors.rows; ++i) {
    f += model.alphas[i] * rbf_kernel(model.support_vectors.row(i), x, model.gamma);
  }
  return f - model.rho;
}

std::vector<double> ocsvm_decision_all(const OcsvmModel& model, const Dataset& matrix) {
  std::vector<double> out(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    out[i] = ocsvm_decision(model, matrix.row(i));
  }
  return out;
}

}  // namespace fraudlab
