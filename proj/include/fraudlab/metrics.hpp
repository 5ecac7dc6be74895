#pragma once

#include <string>
#include <vector>

namespace fraudlab {

struct EvalRow {
  std::string detector;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double detection_rate = 0.0;   // recall
  double false_positive_rate = 0.0;
  double precision = 0.0;
  double auc_roc = 0.0;
};

// Confusion-matrix metrics plus Mann-Whitney AUC with midrank tie handling.
// Throws std::invalid_argument on length mismatch or a degenerate label set
// (all positive or all negative).
EvalRow eval_metrics(const std::string& detector, const std::vector<bool>& labels,
                     const std::vector<bool>& flags, const std::vector<double>& scores);

// AUC alone (same preconditions)
double auc_mann_whitney(const std::vector<bool>& labels, const std::vector<double>& scores);

struct EvalReport {
  std::vector<EvalRow> rows;
  std::string to_csv() const;
};

}  // namespace fraudlab
