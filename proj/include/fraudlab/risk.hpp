#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraudlab/features.hpp"
#include "fraudlab/ingest.hpp"

namespace fraudlab {

struct IndicatorFlags {
  bool if_flag = false;
  bool ocsvm_flag = false;
  bool ae_flag = false;
  bool unusual_spend = false;
  bool rapid_use = false;
  bool spending_spree = false;
  bool suspicious_sequence = false;
  bool high_amount = false;
};

struct RiskScore {
  int composite = 0;       // 0..6
  double weighted = 0.0;
  bool high_risk = false;  // top-5% mark
};

struct RiskWeights {
  double amount = 0.05;
  double unusual_spend = 0.84;
  double suspicious_sequence = 0.76;
  double rapid_use = 0.53;
};

struct EntityRisk {
  std::string entity_id;
  std::size_t txn_count = 0;
  std::size_t flagged_count = 0;
  double fraud_ratio = 0.0;
  bool high_risk = false;  // fraud_ratio > 0.20
};

enum class TimeWindow { Night, Morning, Afternoon, Evening };

struct TimeWindowStats {
  TimeWindow window = TimeWindow::Night;
  std::size_t txn_count = 0;
  double mean_risk = 0.0;
};

// Behavioral indicators for the whole corpus. Detector flags are filled in by
// the caller; txns must be in (card, timestamp) order with matching features.
// `high_amount_threshold` is the corpus 99th-percentile amount in dollars.
std::vector<IndicatorFlags> behavioral_flags(
    const std::vector<CleanTransaction>& txns,
    const std::vector<FeatureVector>& features,
    const std::map<std::string, CardholderStats>& stats,
    double high_amount_threshold);

// corpus 99th-percentile amount (dollars), nearest-rank
double high_amount_threshold(const std::vector<CleanTransaction>& txns);

int composite_score(const IndicatorFlags& f);

// 0.05*amount_norm + 0.84*unusual + 0.76*sequence + 0.53*rapid
double weighted_score(const IndicatorFlags& f, double amount_norm,
                      const RiskWeights& w = {});

// true iff score > nearest-rank 95th percentile; ties excluded
std::vector<bool> high_risk_mark(const std::vector<double>& scores);

enum class EntityGroup { Cardholder, Merchant };

// flagged means composite >= 1; descending fraud_ratio, ties by txn_count
// then id
std::vector<EntityRisk> entity_fraud_ratio(const std::vector<CleanTransaction>& txns,
                                           const std::vector<IndicatorFlags>& flags,
                                           EntityGroup group_by);

// Night [0,6), Morning [6,12), Afternoon [12,18), Evening [18,24)
TimeWindow window_of_hour(int hour);
std::vector<TimeWindowStats> time_window_risk(const std::vector<FeatureVector>& features,
                                              const std::vector<double>& scores);

// Pearson over 0/1 indicator columns; NaN where a column has zero variance
std::vector<std::vector<double>> indicator_correlations(
    const std::vector<std::vector<bool>>& columns);

struct ReviewQueue {
  std::vector<std::size_t> rows;  // weighted score descending
  double fraction = 0.0;
  std::vector<bool> members;
};

// combined predicate: top-5% weighted mark OR high_amount OR
// suspicious_sequence OR rapid_use
ReviewQueue review_queue(const std::vector<IndicatorFlags>& flags,
                         const std::vector<double>& weighted);

}  // namespace fraudlab
