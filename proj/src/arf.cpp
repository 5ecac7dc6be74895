#include "fraudlab/arf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fraudlab {

ArfFeatures make_arf_features(bool f_if, bool f_ocsvm, bool f_ae, double amount,
                              double card_mean, double card_sigma,
                              double seconds_since_last) {
  ArfFeatures f;
  f.f_if = f_if ? 1.0 : 0.0;
  f.f_ocsvm = f_ocsvm ? 1.0 : 0.0;
  f.f_ae = f_ae ? 1.0 : 0.0;
  if (card_sigma > 0.0) {
    f.delta_spend = std::min(std::abs(amount - card_mean) / card_sigma, 10.0);
  } else {
    f.delta_spend = 0.0;
  }
  f.delta_time = std::clamp(1.0 - seconds_since_last / 3600.0, 0.0, 1.0);
  return f;
}

ArfWeights arf_init_weights(const ArfContext& ctx, double w_max) {
  if (!(ctx.prior > 0.0) || !(ctx.prior < 1.0)) {
    throw std::invalid_argument("arf_init_weights: prior must be in (0, 1)");
  }
  if (ctx.volatility < 0.0 || ctx.volatility > 1.0) {
    throw std::invalid_argument("arf_init_weights: volatility must be in [0, 1]");
  }
  if (ctx.legal_weight < 0.0) {
    throw std::invalid_argument("arf_init_weights: legal_weight must be >= 0");
  }
  ArfWeights w;
  w.context_group = ctx.region_group;
  const double behavioral = 0.2 * (1.0 + ctx.prior / 0.005) *
                            (1.0 + 0.5 * ctx.volatility) *
                            (1.0 + 0.25 * ctx.legal_weight);
  w.w = {0.2, 0.2, 0.2, behavioral, behavioral};
  for (double& x : w.w) x = std::clamp(x, 0.0, w_max);
  return w;
}

double arf_score(const ArfWeights& weights, const ArfFeatures& feats) {
  const auto f = feats.as_array();
  double r = 0.0;
  for (std::size_t i = 0; i < 5; ++i) r += weights.w[i] * f[i];
  return r;
}

PseudoLabel arf_pseudo_label(const ArfFeatures& feats) {
  if (feats.delta_spend > 3.0) return PseudoLabel::Positive;
  const bool any_detector = feats.f_if > 0.5 || feats.f_ocsvm > 0.5 || feats.f_ae > 0.5;
  if (feats.delta_spend < 0.5 && !any_detector) return PseudoLabel::Negative;
  return PseudoLabel::Abstain;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// per-example loss and gradient contribution (added into grad)
double example_loss_grad(const ArfWeights& weights, const ArfExample& ex, double tau,
                         double margin, std::array<double, 5>* grad) {
  const auto f = ex.feats.as_array();
  const double r = arf_score(weights, ex.feats);
  if (ex.is_true_label) {
    const double y = ex.label;  // 0 or 1
    const double p = sigmoid(r);
    // numerically safe cross-entropy via softplus
    const double loss = (y > 0.5) ? std::log1p(std::exp(-r)) : r + std::log1p(std::exp(-r));
    if (grad != nullptr) {
      const double g = p - y;
      for (std::size_t i = 0; i < 5; ++i) (*grad)[i] += g * f[i];
    }
    return loss;
  }
  const double y = ex.label;  // -1 or +1
  const double slack = margin - y * (r - tau);
  if (slack > 0.0) {
    if (grad != nullptr) {
      for (std::size_t i = 0; i < 5; ++i) (*grad)[i] += -y * f[i];
    }
    return slack;
  }
  return 0.0;
}

}  // namespace

double arf_batch_loss(const ArfWeights& weights, const std::vector<ArfExample>& batch,
                      double tau, const ArfConfig& cfg) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : batch) {
    total += example_loss_grad(weights, ex, tau, cfg.margin, nullptr);
  }
  return total / static_cast<double>(batch.size());
}

bool arf_update(ArfWeights& weights, const std::vector<ArfExample>& batch, double tau,
                const ArfConfig& cfg) {
  if (batch.empty()) return false;
  std::array<double, 5> grad{};
  for (const auto& ex : batch) {
    example_loss_grad(weights, ex, tau, cfg.margin, &grad);
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < 5; ++i) {
    weights.w[i] = std::clamp(weights.w[i] - cfg.learning_rate * grad[i] * inv_n, 0.0,
                              cfg.w_max);
  }
  ++weights.update_count;
  return true;
}

bool arf_high_risk_rule(double r_score, const ArfFeatures& feats,
                        double seconds_since_last, const ArfPercentileTracker& tracker) {
  if (tracker.warm() && r_score > tracker.percentile95()) return true;
  const int detectors = (feats.f_if > 0.5 ? 1 : 0) + (feats.f_ocsvm > 0.5 ? 1 : 0) +
                        (feats.f_ae > 0.5 ? 1 : 0);
  if (detectors >= 2) return true;
  return feats.delta_spend > 3.0 && seconds_since_last < 60.0;
}

}  // namespace fraudlab
