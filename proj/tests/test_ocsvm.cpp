#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fraudlab/common.hpp"
#include "fraudlab/ocsvm.hpp"

using namespace fraudlab;

namespace {

Dataset blob(std::size_t n, std::uint64_t seed, double spread = 1.0,
             std::size_t cols = 4) {
  Dataset d;
  d.rows = n;
  d.cols = cols;
  d.values.resize(n * cols);
  Rng rng(seed);
  for (auto& v : d.values) v = rng.normal(0.0, spread);
  return d;
}

double dual_objective(const std::vector<std::vector<double>>& K,
                      const std::vector<double>& a) {
  double obj = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < a.size(); ++j) obj += a[i] * a[j] * K[i][j];
  }
  return 0.5 * obj;
}

// Projection of v onto { a : sum a = 1, 0 <= a_i <= C } by bisection on the
// Lagrange shift of the equality constraint.
std::vector<double> project_box_simplex(std::vector<double> v, double C) {
  double lo = -1e9, hi = 1e9;
  const auto mass = [&](double shift) {
    double s = 0.0;
    for (double x : v) s += std::clamp(x - shift, 0.0, C);
    return s;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  const double shift = 0.5 * (lo + hi);
  for (double& x : v) x = std::clamp(x - shift, 0.0, C);
  return v;
}

// dense accelerated projected-gradient reference for the dual problem
std::vector<double> qp_reference(const std::vector<std::vector<double>>& K, double C,
                                 std::size_t iters = 4000) {
  const std::size_t n = K.size();

  // Lipschitz constant of the gradient = top eigenvalue, by power iteration
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 1.0;
  for (int it = 0; it < 60; ++it) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) w[i] += K[i][j] * v[j];
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    lambda = norm;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  const double lr = 1.0 / lambda;

  std::vector<double> a(n, std::min(C, 1.0 / static_cast<double>(n)));
  a = project_box_simplex(a, C);
  std::vector<double> y = a, prev = a, g(n);
  double t = 1.0;
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += K[i][j] * y[j];
      g[i] = s;
    }
    prev = a;
    for (std::size_t i = 0; i < n; ++i) a[i] = y[i] - lr * g[i];
    a = project_box_simplex(a, C);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = a[i] + (t - 1.0) / t_next * (a[i] - prev[i]);
    }
    t = t_next;
  }
  return a;
}

std::vector<std::vector<double>> kernel_matrix(const Dataset& m, double gamma) {
  std::vector<std::vector<double>> K(m.rows, std::vector<double>(m.rows));
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.rows; ++j) {
      K[i][j] = rbf_kernel(m.row(i), m.row(j), gamma);
    }
  }
  return K;
}

}  // namespace

TEST_CASE("rbf kernel closed forms and symmetry") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(rbf_kernel(x, x, 0.1) == 1.0);

  const std::vector<double> y{1, 2, 3, 4 + std::sqrt(10.0)};
  CHECK(rbf_kernel(x, y, 0.1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));

  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> a(4), b(4);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    CHECK(rbf_kernel(a, b, 0.3) == rbf_kernel(b, a, 0.3));
    CHECK(rbf_kernel(a, b, 0.3) > 0.0);
    CHECK(rbf_kernel(a, b, 0.3) <= 1.0);
  }
}

TEST_CASE("a single training point forces alpha = 1 and a zero decision at the point") {
  Dataset m;
  m.rows = 1;
  m.cols = 4;
  m.values = {0.5, -0.25, 1.0, 2.0};
  const auto model = ocsvm_fit(m, {.nu = 1.0});
  REQUIRE(model.alphas.size() == 1);
  CHECK(model.alphas[0] == doctest::Approx(1.0));
  CHECK(model.rho == doctest::Approx(1.0));
  CHECK(ocsvm_decision(model, m.row(0)) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("solver matches a dense projected-gradient reference on a gaussian blob") {
  const std::size_t n = 300;
  const Dataset m = blob(n, 2, 1.0, 2);
  const double nu = 0.05, gamma = 0.1;
  const auto K = kernel_matrix(m, gamma);
  const double C = 1.0 / (nu * static_cast<double>(n));

  const auto model = ocsvm_fit(m, {.nu = nu, .gamma = gamma, .tol = 1e-5, .seed = 3});
  // reconstruct a full alpha vector from the sparse support-vector form
  std::vector<double> alpha(n, 0.0);
  for (std::size_t s = 0; s < model.alphas.size(); ++s) {
    // locate the training row this support vector came from
    for (std::size_t i = 0; i < n; ++i) {
      if (std::equal(m.row(i).begin(), m.row(i).end(),
                     model.support_vectors.row(s).begin())) {
        alpha[i] = model.alphas[s];
        break;
      }
    }
  }
  const double ours = dual_objective(K, alpha);
  const double ref = dual_objective(K, qp_reference(K, C));
  CHECK(ours == doctest::Approx(ref).epsilon(1e-4));
  // the tightly converged solver should never be worse than the reference
  CHECK(ours <= ref + 1e-6 * std::abs(ref));
}

TEST_CASE("feasibility holds at convergence") {
  const Dataset m = blob(1000, 4);
  const double nu = 0.02;
  const auto model = ocsvm_fit(m, {.nu = nu, .seed = 5});
  const double C = 1.0 / (nu * 1000.0);
  const double total = std::accumulate(model.alphas.begin(), model.alphas.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  for (double a : model.alphas) {
    CHECK(a > 0.0);  // sparse form keeps only positive alphas
    CHECK(a <= C + 1e-12);
  }
  // support-vector count lower bound
  CHECK(model.alphas.size() >= static_cast<std::size_t>(std::ceil(nu * 1000.0)));
}

TEST_CASE("feasibility holds after every pair update, and the objective descends") {
  const Dataset m = blob(200, 6);
  const double nu = 0.1;
  const double C = 1.0 / (nu * 200.0);
  bool always_feasible = true;
  OcsvmConfig cfg{.nu = nu, .seed = 7, .record_objective = true};
  cfg.on_update = [&](std::span<const double> a) {
    double s = 0.0;
    for (double x : a) {
      s += x;
      if (x < -1e-12 || x > C + 1e-12) always_feasible = false;
    }
    if (std::abs(s - 1.0) > 1e-9) always_feasible = false;
  };
  const auto model = ocsvm_fit(m, cfg);
  CHECK(always_feasible);
  REQUIRE(model.objective_history.size() > 1);
  for (std::size_t i = 1; i < model.objective_history.size(); ++i) {
    CHECK(model.objective_history[i] <= model.objective_history[i - 1] + 1e-10);
  }
}

TEST_CASE("decision function separates the blob centroid from far away") {
  const Dataset m = blob(500, 8);
  const auto model = ocsvm_fit(m, {.nu = 0.05, .seed = 9});
  const std::vector<double> centroid{0, 0, 0, 0};
  const std::vector<double> far{30, 30, 30, 30};
  CHECK(ocsvm_decision(model, centroid) > 0.0);
  CHECK(ocsvm_decision(model, far) < 0.0);
}

TEST_CASE("training flag fraction respects the nu property") {
  const Dataset m = blob(5000, 10);
  const double nu = 0.01;
  const auto model = ocsvm_fit(m, {.nu = nu, .seed = 11});
  const auto decisions = ocsvm_decision_all(model, m);
  std::size_t outliers = 0;
  for (double d : decisions) outliers += ocsvm_flag(d) ? 1 : 0;
  const double rate = static_cast<double>(outliers) / 5000.0;
  CHECK(rate >= nu / 2.0);
  CHECK(rate <= 2.0 * nu);
  // outlier fraction bounded above by the support-vector fraction
  CHECK(static_cast<double>(outliers) <= static_cast<double>(model.alphas.size()));
}

TEST_CASE("interior support vectors sit on the margin") {
  const Dataset m = blob(400, 12);
  const double nu = 0.1, tol = 1e-4;
  const auto model = ocsvm_fit(m, {.nu = nu, .tol = tol, .seed = 13});
  const double C = 1.0 / (nu * 400.0);
  std::size_t interior = 0;
  for (std::size_t s = 0; s < model.alphas.size(); ++s) {
    const double a = model.alphas[s];
    if (a > 1e-8 && a < C - 1e-8) {
      ++interior;
      CHECK(std::abs(ocsvm_decision(model, model.support_vectors.row(s))) <= 10 * tol);
    }
  }
  CHECK(interior >= 1);
}

TEST_CASE("decision is invariant to support-vector order") {
  const Dataset m = blob(300, 14);
  auto model = ocsvm_fit(m, {.nu = 0.05, .seed = 15});
  const std::vector<double> probe{0.3, -0.2, 0.9, 0.1};
  const double before = ocsvm_decision(model, probe);

  // reverse the stored support vectors and alphas together
  OcsvmModel rev = model;
  const std::size_t k = model.alphas.size();
  for (std::size_t s = 0; s < k; ++s) {
    rev.alphas[s] = model.alphas[k - 1 - s];
    for (std::size_t c = 0; c < 4; ++c) {
      rev.support_vectors.at(s, c) = model.support_vectors.at(k - 1 - s, c);
    }
  }
  CHECK(ocsvm_decision(rev, probe) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("oversized corpora are subsampled deterministically by seed") {
  const Dataset m = blob(2000, 16);
  OcsvmConfig cfg{.nu = 0.05, .subsample_cap = 500, .seed = 17};
  const auto a = ocsvm_fit(m, cfg);
  const auto b = ocsvm_fit(m, cfg);
  CHECK(a.alphas == b.alphas);
  CHECK(a.rho == b.rho);
  CHECK(a.support_vectors.values == b.support_vectors.values);
  // the fit only ever saw subsample_cap rows
  CHECK(a.support_vectors.rows <= 500);
}

TEST_CASE("empty input is rejected") {
  Dataset empty;
  CHECK_THROWS(ocsvm_fit(empty, {}));
}
