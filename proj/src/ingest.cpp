#include "fraudlab/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fraudlab/common.hpp"
#include "fraudlab/csv.hpp"

namespace fraudlab {

namespace {

Cents parse_amount(const std::string& s, const std::string& path, std::size_t line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": non-numeric amount on line " +
                             std::to_string(line));
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw std::runtime_error(path + ": non-numeric amount on line " +
                             std::to_string(line));
  }
  return static_cast<Cents>(std::llround(v * 100.0));
}

void expect_columns(const CsvFile& f, std::size_t n, const std::string& path) {
  if (f.header.size() != n) {
    throw std::runtime_error(path + ": expected " + std::to_string(n) +
                             " columns, got " + std::to_string(f.header.size()));
  }
}

void check_arity(const std::vector<std::string>& row, std::size_t n,
                 const std::string& path, std::size_t line) {
  if (row.size() != n) {
    throw std::runtime_error(path + ": malformed row on line " + std::to_string(line));
  }
}

template <typename T>
void check_duplicate(std::unordered_set<std::string>& seen, const T& key,
                     const std::string& path, std::size_t line) {
  if (!seen.insert(key).second) {
    throw std::runtime_error(path + ": duplicate primary key '" + key + "' on line " +
                             std::to_string(line));
  }
}

}  // namespace

std::string IngestReport::to_json() const {
  nlohmann::json j{{"rows_in", rows_in},
                   {"rows_out", rows_out},
                   {"dropped_missing_id", dropped_missing_id},
                   {"capped", capped},
                   {"suspect_timestamps", suspect_timestamps}};
  return j.dump(2);
}

RawTables load_tables(const IngestPaths& paths) {
  RawTables raw;

  {
    CsvFile f = read_csv(paths.transactions);
    expect_columns(f, 5, paths.transactions);
    raw.transactions.reserve(f.rows.size());
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
      const auto& r = f.rows[i];
      const std::size_t line = f.line_numbers[i];
      check_arity(r, 5, paths.transactions, line);
      RawTransaction t;
      t.txn_id = r[0];
      t.card_id = r[1];
      t.merchant_id = r[2];
      try {
        t.timestamp = parse_iso8601(r[3]);
      } catch (const std::exception&) {
        throw std::runtime_error(paths.transactions + ": bad timestamp on line " +
                                 std::to_string(line));
      }
      t.amount = parse_amount(r[4], paths.transactions, line);
      raw.transactions.push_back(std::move(t));
    }
  }
  {
    CsvFile f = read_csv(paths.cardholders);
    expect_columns(f, 3, paths.cardholders);
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
      const auto& r = f.rows[i];
      check_arity(r, 3, paths.cardholders, f.line_numbers[i]);
      check_duplicate(seen, r[0], paths.cardholders, f.line_numbers[i]);
      raw.cardholders.push_back({r[0], r[1], r[2]});
    }
  }
  {
    CsvFile f = read_csv(paths.merchants);
    expect_columns(f, 3, paths.merchants);
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
      const auto& r = f.rows[i];
      check_arity(r, 3, paths.merchants, f.line_numbers[i]);
      check_duplicate(seen, r[0], paths.merchants, f.line_numbers[i]);
      raw.merchants.push_back({r[0], r[1], r[2]});
    }
  }
  {
    CsvFile f = read_csv(paths.categories);
    expect_columns(f, 2, paths.categories);
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
      const auto& r = f.rows[i];
      check_arity(r, 2, paths.categories, f.line_numbers[i]);
      check_duplicate(seen, r[0], paths.categories, f.line_numbers[i]);
      raw.categories.push_back({r[0], r[1]});
    }
  }
  return raw;
}

std::pair<std::vector<CleanTransaction>, IngestReport> join_unified(const RawTables& raw) {
  std::unordered_set<std::string> cards;
  for (const auto& c : raw.cardholders) cards.insert(c.card_id);
  std::unordered_map<std::string, const RawMerchant*> merchants;
  for (const auto& m : raw.merchants) merchants.emplace(m.merchant_id, &m);
  std::unordered_map<std::string, std::string> categories;
  for (const auto& c : raw.categories) categories.emplace(c.category_id, c.label);

  IngestReport rep;
  rep.rows_in = raw.transactions.size();
  std::vector<CleanTransaction> out;
  out.reserve(raw.transactions.size());
  for (const auto& t : raw.transactions) {
    const auto mit = merchants.find(t.merchant_id);
    // a merchant with an unresolvable category breaks the critical chain too
    const std::string* label = nullptr;
    if (mit != merchants.end()) {
      const auto cit = categories.find(mit->second->category_id);
      if (cit != categories.end()) label = &cit->second;
    }
    if (t.card_id.empty() || t.merchant_id.empty() || !cards.contains(t.card_id) ||
        label == nullptr) {
      ++rep.dropped_missing_id;
      continue;
    }
    CleanTransaction ct;
    ct.txn_id = t.txn_id;
    ct.card_id = t.card_id;
    ct.merchant_id = t.merchant_id;
    ct.category_label = *label;
    ct.timestamp = t.timestamp;
    ct.amount = std::max<Cents>(t.amount, 0);
    out.push_back(std::move(ct));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CleanTransaction& a, const CleanTransaction& b) {
                     if (a.card_id != b.card_id) return a.card_id < b.card_id;
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.txn_id < b.txn_id;
                   });
  rep.rows_out = out.size();
  return {std::move(out), rep};
}

std::pair<std::vector<CleanTransaction>, IngestReport> clean_values(
    std::vector<CleanTransaction> txns, double cap_quantile, bool cap_enabled,
    std::optional<TimestampMs> ingestion_time) {
  if (!(cap_quantile > 0.0) || cap_quantile > 1.0) {
    throw std::invalid_argument("cap_quantile outside (0,1]");
  }
  IngestReport rep;
  rep.rows_in = rep.rows_out = txns.size();
  if (txns.empty()) return {std::move(txns), rep};

  TimestampMs max_ts = txns.front().timestamp;
  for (const auto& t : txns) max_ts = std::max(max_ts, t.timestamp);
  const TimestampMs horizon = ingestion_time.value_or(max_ts);

  if (cap_enabled) {
    std::vector<Cents> amounts;
    amounts.reserve(txns.size());
    for (const auto& t : txns) amounts.push_back(t.amount);
    const Cents cap = nearest_rank_quantile(std::move(amounts), cap_quantile);
    for (auto& t : txns) {
      if (t.amount > cap) {
        t.amount = cap;
        t.cap_applied = true;
        ++rep.capped;
      }
    }
  }

  const std::string* prev_card = nullptr;
  TimestampMs prev_ts = 0;
  for (auto& t : txns) {
    bool suspect = t.timestamp > horizon;
    // after the (card, timestamp) sort a strictly negative interval cannot
    // occur; a zero interval on the same card is still degenerate
    if (prev_card && *prev_card == t.card_id && t.timestamp <= prev_ts) suspect = true;
    t.timestamp_suspect = t.timestamp_suspect || suspect;
    prev_card = &t.card_id;
    prev_ts = t.timestamp;
  }

  for (const auto& t : txns) {
    if (t.timestamp_suspect) ++rep.suspect_timestamps;
  }
  return {std::move(txns), rep};
}

}  // namespace fraudlab
