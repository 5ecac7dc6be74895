#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "fraudlab/common.hpp"

namespace fraudlab {

struct ArfContext {
  std::string region_group = "global";
  double prior = 0.005;       // historical fraud prevalence, (0,1)
  double volatility = 0.0;    // V_m in [0,1]
  double legal_weight = 0.0;  // L_r >= 0
};

struct ArfFeatures {
  double f_if = 0.0;     // 0/1 detector flags
  double f_ocsvm = 0.0;
  double f_ae = 0.0;
  double delta_spend = 0.0;  // |amount - card mean| / card sigma, capped at 10
  double delta_time = 0.0;   // clamp(1 - seconds_since_last/3600, 0, 1)

  std::array<double, 5> as_array() const {
    return {f_if, f_ocsvm, f_ae, delta_spend, delta_time};
  }
};

ArfFeatures make_arf_features(bool f_if, bool f_ocsvm, bool f_ae, double amount,
                              double card_mean, double card_sigma,
                              double seconds_since_last);

struct ArfWeights {
  std::array<double, 5> w{0.2, 0.2, 0.2, 0.2, 0.2};
  std::size_t update_count = 0;
  std::string context_group = "global";
};

struct ArfConfig {
  double learning_rate = 0.01;
  double margin = 1.0;             // hinge margin m
  std::size_t batch_size = 32;
  double w_max = 5.0;
  std::size_t tau_window = 10'000; // sliding window for the 95th-pct threshold
};

// Contextual initialization: the behavioral weights w4, w5 scale with the
// region prior, merchant volatility and regulatory weight; detector weights
// start neutral at 0.2. All clipped to [0, w_max].
ArfWeights arf_init_weights(const ArfContext& ctx, double w_max = 5.0);

// R = w . features
double arf_score(const ArfWeights& weights, const ArfFeatures& feats);

enum class PseudoLabel { Positive, Negative, Abstain };

// +1 if delta_spend > 3; -1 if delta_spend < 0.5 and no detector flag; else
// abstain
PseudoLabel arf_pseudo_label(const ArfFeatures& feats);

struct ArfExample {
  ArfFeatures feats;
  bool is_true_label = false;  // true labels y in {0,1}, else pseudo {-1,+1}
  double label = 0.0;
};

// Mini-batch weight update: cross-entropy of sigmoid(R) for true labels,
// hinge max(0, m - y(R - tau)) for pseudo-labels; mean gradient, projection
// to [0, w_max]. Returns false (no-op) when the batch is empty.
bool arf_update(ArfWeights& weights, const std::vector<ArfExample>& batch, double tau,
                const ArfConfig& cfg);

// batch loss at the given weights (the quantity arf_update descends)
double arf_batch_loss(const ArfWeights& weights, const std::vector<ArfExample>& batch,
                      double tau, const ArfConfig& cfg);

// Sliding-window nearest-rank 95th-percentile tracker for tau.
class ArfPercentileTracker {
 public:
  explicit ArfPercentileTracker(std::size_t window = 10'000) : window_(window) {}

  void push(double r) {
    values_.push_back(r);
    if (values_.size() > window_) values_.pop_front();
  }
  std::size_t size() const { return values_.size(); }
  bool warm() const { return values_.size() >= 100; }

  double percentile95() const {
    std::vector<double> scratch(values_.begin(), values_.end());
    return nearest_rank_quantile(std::move(scratch), 0.95);
  }

 private:
  std::size_t window_;
  std::deque<double> values_;
};

// true iff R above the running 95th percentile (when warm), OR flagged by at
// least two detectors, OR delta_spend > 3 with a sub-minute gap
bool arf_high_risk_rule(double r_score, const ArfFeatures& feats,
                        double seconds_since_last, const ArfPercentileTracker& tracker);

}  // namespace fraudlab
