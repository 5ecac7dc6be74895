#include "fraudlab/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

namespace fraudlab {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double auc_mann_whitney(const std::vector<bool>& labels, const std::vector<double>& scores) {
  if (labels.size() != scores.size()) {
    throw std::invalid_argument("auc: labels/scores length mismatch");
  }
  const std::size_t n = labels.size();
  std::size_t pos = 0;
  for (bool b : labels) pos += b ? 1 : 0;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("auc: need at least one positive and one negative");
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // midranks: ties share the average 1-based rank
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]]) rank_sum_pos += midrank;
    }
    i = j;
  }
  const double u = rank_sum_pos - static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

EvalRow eval_metrics(const std::string& detector, const std::vector<bool>& labels,
                     const std::vector<bool>& flags, const std::vector<double>& scores) {
  if (labels.size() != flags.size() || labels.size() != scores.size()) {
    throw std::invalid_argument("eval_metrics: length mismatch");
  }
  EvalRow r;
  r.detector = detector;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      flags[i] ? ++r.tp : ++r.fn;
    } else {
      flags[i] ? ++r.fp : ++r.tn;
    }
  }
  if (r.tp + r.fn == 0 || r.fp + r.tn == 0) {
    throw std::invalid_argument("eval_metrics: degenerate label set");
  }
  r.detection_rate = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.false_positive_rate = static_cast<double>(r.fp) / static_cast<double>(r.fp + r.tn);
  r.precision = (r.tp + r.fp) == 0
                    ? 0.0
                    : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.auc_roc = auc_mann_whitney(labels, scores);
  return r;
}

std::string EvalReport::to_csv() const {
  std::string out =
      "detector,tp,fp,tn,fn,detection_rate,false_positive_rate,precision,auc_roc\n";
  for (const auto& r : rows) {
    out += r.detector + ',' + std::to_string(r.tp) + ',' + std::to_string(r.fp) + ',' +
           std::to_string(r.tn) + ',' + std::to_string(r.fn) + ',' + fmt(r.detection_rate) +
           ',' + fmt(r.false_positive_rate) + ',' + fmt(r.precision) + ',' + fmt(r.auc_roc) +
           '\n';
  }
  return out;
}

}  // namespace fraudlab
