#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fraudlab/common.hpp"
#include "fraudlab/ingest.hpp"

namespace fraudlab {

// 9999 minutes, the first-use sentinel for seconds_since_last
constexpr double kFirstUseSentinelSeconds = 9999.0 * 60.0;

struct CardholderStats {
  double mean_amount = 0.0;  // dollars
  double std_amount = 0.0;   // population sigma, dollars
  std::size_t txn_count = 0;
};

struct FeatureVector {
  double amount = 0.0;
  double amount_deviation = 0.0;
  double seconds_since_last = kFirstUseSentinelSeconds;
  double category_frequency = 0.0;
  int hour = 0;
  int day_of_week = 0;  // Monday = 0
  bool weekend = false;
  int month = 1;
  std::size_t rolling_count_7d = 0;
  double rolling_sum_7d = 0.0;
  std::size_t rolling_count_30d = 0;
  double rolling_sum_30d = 0.0;
};

struct StandardizationParams {
  std::array<double, 4> mean{};
  std::array<double, 4> std{};
  static constexpr double kStdFloor = 1e-12;

  double transform(std::size_t col, double raw) const {
    return (raw - mean[col]) / std::max(std[col], kStdFloor);
  }
  double inverse(std::size_t col, double z) const {
    return z * std::max(std[col], kStdFloor) + mean[col];
  }
};

// Standardized 4-column model input: amount, amount_deviation,
// seconds_since_last, category_frequency.
struct FeatureMatrix {
  Dataset data;  // n x 4, z-scored
  StandardizationParams params;
};

// Per-card population mean/sigma over all of that card's amounts.
std::map<std::string, CardholderStats> cardholder_stats(
    const std::vector<CleanTransaction>& txns);

// Per-category fraction of corpus rows.
std::map<std::string, double> category_frequency(
    const std::vector<CleanTransaction>& txns);

// Full per-row feature derivation. Input must be sorted by (card, timestamp)
// (join_unified order); throws on unsorted input.
std::vector<FeatureVector> derive_features(
    const std::vector<CleanTransaction>& txns,
    const std::map<std::string, CardholderStats>& stats,
    const std::map<std::string, double>& cat_freq);

// (hour, day_of_week, weekend, month) in UTC.
void derive_temporal(TimestampMs ts, FeatureVector& fv);

// z-scored 4-column matrix with stored parameters.
FeatureMatrix build_matrix(const std::vector<FeatureVector>& features);

// Raw + standardized columns side by side, fixed column order.
void write_feature_csv(const std::string& path,
                       const std::vector<CleanTransaction>& txns,
                       const std::vector<FeatureVector>& features,
                       const FeatureMatrix& matrix);

}  // namespace fraudlab
