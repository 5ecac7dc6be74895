#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fraudlab/common.hpp"

namespace fraudlab {

struct OcsvmConfig {
  double nu = 0.01;
  double gamma = 0.1;
  double tol = 1e-3;
  std::size_t max_passes = 2'000'000;  // SMO pair updates
  std::size_t subsample_cap = 10'000;
  std::uint64_t seed = 0;
  bool record_objective = false;
  // test hook, called after every pair update with the current alphas
  std::function<void(std::span<const double>)> on_update;
};

struct OcsvmModel {
  Dataset support_vectors;       // rows with alpha > 0
  std::vector<double> alphas;    // matching support_vectors
  double rho = 0.0;
  double gamma = 0.1;
  // dual objective per SMO update when record_objective was set
  std::vector<double> objective_history;
};

// exp(-gamma * ||x - y||^2)
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Scholkopf nu-OCSVM dual: min 1/2 a'Ka  s.t.  sum a = 1, 0 <= a_i <= 1/(nu n),
// solved by SMO on the maximal-KKT-violating pair. Throws on n < 1 or failure
// to converge within max_passes.
OcsvmModel ocsvm_fit(const Dataset& matrix, const OcsvmConfig& cfg = {});

// f(x) = sum_i alpha_i K(x_i, x) - rho; negative means anomalous.
double ocsvm_decision(const OcsvmModel& model, std::span<const double> x);

std::vector<double> ocsvm_decision_all(const OcsvmModel& model, const Dataset& matrix);

inline bool ocsvm_flag(double decision) { return decision < 0.0; }

}  // namespace fraudlab
