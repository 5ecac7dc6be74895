#include "fraudlab/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "fraudlab/time_util.hpp"

namespace fraudlab {

double high_amount_threshold(const std::vector<CleanTransaction>& txns) {
  std::vector<double> amounts;
  amounts.reserve(txns.size());
  for (const auto& t : txns) amounts.push_back(cents_to_dollars(t.amount));
  return nearest_rank_quantile(std::move(amounts), 0.99);
}

std::vector<IndicatorFlags> behavioral_flags(
    const std::vector<CleanTransaction>& txns,
    const std::vector<FeatureVector>& features,
    const std::map<std::string, CardholderStats>& stats,
    double high_amount_thresh) {
  std::vector<IndicatorFlags> out(txns.size());

  // per-card per-UTC-day counts for the spree rule
  std::unordered_map<std::string, std::unordered_map<std::int64_t, std::size_t>> day_counts;
  for (const auto& t : txns) {
    ++day_counts[t.card_id][day_index(t.timestamp)];
  }

  for (std::size_t i = 0; i < txns.size(); ++i) {
    const auto& t = txns[i];
    const auto& f = features[i];
    IndicatorFlags& fl = out[i];

    const auto& st = stats.at(t.card_id);
    if (st.std_amount > 0.0) {
      fl.unusual_spend = std::abs(f.amount - st.mean_amount) > 3.0 * st.std_amount;
    }

    fl.rapid_use =
        f.seconds_since_last < 60.0 && f.seconds_since_last != kFirstUseSentinelSeconds;

    fl.spending_spree = day_counts[t.card_id][day_index(t.timestamp)] >= 10;

    const bool first_of_card = i == 0 || txns[i - 1].card_id != t.card_id;
    if (!first_of_card) {
      const double prior = cents_to_dollars(txns[i - 1].amount);
      if (prior > 0.0) {
        fl.suspicious_sequence = std::abs(f.amount - prior) / prior > 2.0;
      }
    }

    fl.high_amount = f.amount > high_amount_thresh;
  }
  return out;
}

int composite_score(const IndicatorFlags& f) {
  return static_cast<int>(f.if_flag) + static_cast<int>(f.ocsvm_flag) +
         static_cast<int>(f.ae_flag) + static_cast<int>(f.unusual_spend) +
         static_cast<int>(f.rapid_use) + static_cast<int>(f.spending_spree);
}

double weighted_score(const IndicatorFlags& f, double amount_norm, const RiskWeights& w) {
  return w.amount * amount_norm + w.unusual_spend * (f.unusual_spend ? 1.0 : 0.0) +
         w.suspicious_sequence * (f.suspicious_sequence ? 1.0 : 0.0) +
         w.rapid_use * (f.rapid_use ? 1.0 : 0.0);
}

std::vector<bool> high_risk_mark(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("high_risk_mark: empty input");
  const double cut = nearest_rank_quantile(scores, 0.95);
  std::vector<bool> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > cut;
  return out;
}

std::vector<EntityRisk> entity_fraud_ratio(const std::vector<CleanTransaction>& txns,
                                           const std::vector<IndicatorFlags>& flags,
                                           EntityGroup group_by) {
  std::unordered_map<std::string, EntityRisk> agg;
  for (std::size_t i = 0; i < txns.size(); ++i) {
    const std::string& id =
        group_by == EntityGroup::Cardholder ? txns[i].card_id : txns[i].merchant_id;
    EntityRisk& e = agg[id];
    e.entity_id = id;
    ++e.txn_count;
    if (composite_score(flags[i]) >= 1) ++e.flagged_count;
  }
  std::vector<EntityRisk> out;
  out.reserve(agg.size());
  for (auto& [id, e] : agg) {
    e.fraud_ratio = static_cast<double>(e.flagged_count) / static_cast<double>(e.txn_count);
    e.high_risk = e.fraud_ratio > 0.20;
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const EntityRisk& a, const EntityRisk& b) {
    if (a.fraud_ratio != b.fraud_ratio) return a.fraud_ratio > b.fraud_ratio;
    if (a.txn_count != b.txn_count) return a.txn_count > b.txn_count;
    return a.entity_id < b.entity_id;
  });
  return out;
}

TimeWindow window_of_hour(int hour) {
  if (hour < 6) return TimeWindow::Night;
  if (hour < 12) return TimeWindow::Morning;
  if (hour < 18) return TimeWindow::Afternoon;
  return TimeWindow::Evening;
}

std::vector<TimeWindowStats> time_window_risk(const std::vector<FeatureVector>& features,
                                              const std::vector<double>& scores) {
  std::vector<TimeWindowStats> out(4);
  for (std::size_t w = 0; w < 4; ++w) out[w].window = static_cast<TimeWindow>(w);
  std::array<double, 4> sums{};
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto w = static_cast<std::size_t>(window_of_hour(features[i].hour));
    ++out[w].txn_count;
    sums[w] += scores[i];
  }
  for (std::size_t w = 0; w < 4; ++w) {
    if (out[w].txn_count > 0) out[w].mean_risk = sums[w] / static_cast<double>(out[w].txn_count);
  }
  return out;
}

std::vector<std::vector<double>> indicator_correlations(
    const std::vector<std::vector<bool>>& columns) {
  const std::size_t k = columns.size();
  std::vector<std::vector<double>> corr(k, std::vector<double>(k, 0.0));
  if (k == 0) return corr;
  const std::size_t n = columns[0].size();
  std::vector<double> means(k), stds(k);
  for (std::size_t c = 0; c < k; ++c) {
    double s = 0.0;
    for (bool b : columns[c]) s += b ? 1.0 : 0.0;
    means[c] = s / static_cast<double>(n);
    double v = 0.0;
    for (bool b : columns[c]) {
      const double d = (b ? 1.0 : 0.0) - means[c];
      v += d * d;
    }
    stds[c] = std::sqrt(v / static_cast<double>(n));
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double value;
      if (a == b) {
        value = 1.0;
      } else if (stds[a] == 0.0 || stds[b] == 0.0) {
        value = std::numeric_limits<double>::quiet_NaN();
      } else {
        double cov = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          cov += ((columns[a][i] ? 1.0 : 0.0) - means[a]) *
                 ((columns[b][i] ? 1.0 : 0.0) - means[b]);
        }
        value = cov / static_cast<double>(n) / (stds[a] * stds[b]);
      }
      corr[a][b] = corr[b][a] = value;
    }
  }
  return corr;
}

ReviewQueue review_queue(const std::vector<IndicatorFlags>& flags,
                         const std::vector<double>& weighted) {
  ReviewQueue q;
  if (flags.empty()) return q;
  const std::vector<bool> marks = high_risk_mark(weighted);
  q.members.assign(flags.size(), false);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    q.members[i] = marks[i] || flags[i].high_amount || flags[i].suspicious_sequence ||
                   flags[i].rapid_use;
    if (q.members[i]) q.rows.push_back(i);
  }
  std::stable_sort(q.rows.begin(), q.rows.end(), [&](std::size_t a, std::size_t b) {
    return weighted[a] > weighted[b];
  });
  q.fraction = static_cast<double>(q.rows.size()) / static_cast<double>(flags.size());
  return q;
}

}  // namespace fraudlab
