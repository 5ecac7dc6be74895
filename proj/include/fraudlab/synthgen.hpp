#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fraudlab/ingest.hpp"

namespace fraudlab {

enum class Typology {
  None,
  HighAmountBurst,
  RapidUseRun,
  LateNightHighValue,
  CategoryOutlier,
  Spree,
};

std::string typology_name(Typology t);
Typology typology_from_name(const std::string& s);

struct LabeledTransaction {
  CleanTransaction txn;
  bool is_fraud = false;
  Typology typology = Typology::None;
};

struct GenConfig {
  std::size_t n_transactions = 50'000;
  std::size_t n_cards = 0;      // 0 = derived from n_transactions
  std::size_t n_merchants = 0;  // 0 = derived from n_cards
  double anomaly_rate = 0.015;
  std::uint64_t seed = 0;

  // category label -> probability, order significant for determinism
  std::vector<std::pair<std::string, double>> category_mix = {
      {"pub", 0.25},        {"food truck", 0.20}, {"restaurant", 0.18},
      {"bar", 0.14},        {"coffee shop", 0.10}, {"retail", 0.13},
  };

  // Per-card routine spend level: log-normal across cards, small relative
  // noise per purchase. Retail purchases run a fixed multiple of the card's
  // routine level (big-ticket mode).
  double card_mean_mu = 3.80;      // log-dollars; exp(3.80) ~ 44.7
  double card_mean_sigma = 0.22;
  double card_mean_floor = 25.0;
  double card_mean_cap = 80.0;
  double routine_noise = 0.06;     // relative sigma per purchase
  double big_ticket_multiplier = 2.5;
  double big_ticket_noise = 0.05;

  // Dormant-card mode: last `rare_card_fraction` of the card ids transact at
  // `rare_card_weight` of the regular per-card rate, producing long gaps.
  double rare_card_fraction = 0.45;
  double rare_card_weight = 0.12;

  // temporal shape
  int start_year = 2024;
  double weekend_amplitude = 1.3;
  double december_amplitude = 1.4;
  // hourly weights 0..23; evening peak
  std::vector<double> hour_weights = {
      0.45, 0.45, 0.45, 0.45, 0.45, 0.45,  // 0-5
      0.8,  0.8,  0.8,  0.8,  0.8,  0.8,   // 6-11
      1.0,  1.0,  1.0,  1.0,  1.0,  1.0,   // 12-17
      1.6,  1.6,  2.3,  2.3,  2.3,  2.3,   // 18-23
  };

  // planted-amount multiples of the victim card's median purchase; rapid and
  // spree runs climb a geometric ladder from lo to hi across the run
  double burst_multiplier = 16.0;  // high-amount burst and late-night rows
  double burst_noise = 0.30;       // log-normal sigma on burst amounts
  double rapid_multiplier_lo = 6.0;
  double rapid_multiplier_hi = 26.0;
  double spree_multiplier_lo = 5.0;
  double spree_multiplier_hi = 32.0;

  std::string outlier_category_label = "luxury goods";
};

// throws std::invalid_argument when the mix does not sum to 1 (+-1e-9),
// anomaly_rate is outside (0, 0.1), or sizes are zero
void validate_config(const GenConfig& cfg);

struct DimensionTables {
  std::vector<RawCardholder> cardholders;
  std::vector<RawMerchant> merchants;
  std::vector<RawCategory> categories;  // includes the outlier category
};

DimensionTables make_dimension_tables(const GenConfig& cfg);

// Normal (non-fraud) corpus: per-card arrival processes with heterogeneous
// rates, card-level spend means, evening/weekend/December seasonality.
// Sorted by (card_id, timestamp); strictly increasing timestamps per card.
std::vector<LabeledTransaction> generate(const GenConfig& cfg);

// Plants round(anomaly_rate * n) labeled rows split evenly across the five
// typologies and deletes an equal number of normal rows from untouched cards,
// so the fraud fraction equals anomaly_rate up to rounding. Each planted row
// violates its typology's defining threshold by construction.
std::vector<LabeledTransaction> inject_anomalies(std::vector<LabeledTransaction> txns,
                                                 const GenConfig& cfg);

// Writes transactions.csv, cardholders.csv, merchants.csv, categories.csv and
// labels.csv (txn_id,is_fraud,typology) into `dir`.
void write_corpus(const std::string& dir, const std::vector<LabeledTransaction>& txns,
                  const DimensionTables& tables);

// strips labels for the modeling pipeline
std::vector<CleanTransaction> strip_labels(const std::vector<LabeledTransaction>& txns);

}  // namespace fraudlab
