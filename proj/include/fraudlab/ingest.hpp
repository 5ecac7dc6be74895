#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraudlab/time_util.hpp"

namespace fraudlab {

// Currency is carried as integer minor units (cents) to avoid drift;
// converted to real dollars only at feature time.
using Cents = std::int64_t;

inline double cents_to_dollars(Cents c) { return static_cast<double>(c) / 100.0; }

struct RawTransaction {
  std::string txn_id;
  std::string card_id;
  std::string merchant_id;
  TimestampMs timestamp = 0;
  Cents amount = 0;
};

struct RawCardholder {
  std::string card_id;
  std::string name;
  std::string region;
};

struct RawMerchant {
  std::string merchant_id;
  std::string name;
  std::string category_id;
};

struct RawCategory {
  std::string category_id;
  std::string label;
};

struct RawTables {
  std::vector<RawTransaction> transactions;
  std::vector<RawCardholder> cardholders;
  std::vector<RawMerchant> merchants;
  std::vector<RawCategory> categories;
};

struct CleanTransaction {
  std::string txn_id;
  std::string card_id;
  std::string merchant_id;
  std::string category_label;
  TimestampMs timestamp = 0;
  Cents amount = 0;
  bool cap_applied = false;
  bool timestamp_suspect = false;
};

struct IngestReport {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::size_t dropped_missing_id = 0;
  std::size_t capped = 0;
  std::size_t suspect_timestamps = 0;

  std::string to_json() const;
};

struct IngestPaths {
  std::string transactions;
  std::string cardholders;
  std::string merchants;
  std::string categories;
};

// Loads the four tables verbatim. Throws on missing files, malformed rows
// (reported with line number) and duplicate dimension-table primary keys.
RawTables load_tables(const IngestPaths& paths);

// Resolves card/merchant/category through the dimension tables, dropping and
// counting rows with unresolvable identifiers. Output sorted by
// (card_id, timestamp).
std::pair<std::vector<CleanTransaction>, IngestReport> join_unified(const RawTables& raw);

// Caps amounts above the empirical cap_quantile (nearest-rank) and flags
// suspect timestamps. `ingestion_time` defaults to the corpus max timestamp.
// Idempotent.
std::pair<std::vector<CleanTransaction>, IngestReport> clean_values(
    std::vector<CleanTransaction> txns, double cap_quantile = 0.999,
    bool cap_enabled = true,
    std::optional<TimestampMs> ingestion_time = std::nullopt);

}  // namespace fraudlab
