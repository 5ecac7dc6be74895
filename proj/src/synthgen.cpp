#include "fraudlab/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "fraudlab/common.hpp"
#include "fraudlab/time_util.hpp"

namespace fraudlab {

std::string typology_name(Typology t) {
  switch (t) {
    case Typology::None: return "none";
    case Typology::HighAmountBurst: return "high_amount_burst";
    case Typology::RapidUseRun: return "rapid_use_run";
    case Typology::LateNightHighValue: return "late_night_high_value";
    case Typology::CategoryOutlier: return "category_outlier";
    case Typology::Spree: return "spree";
  }
  throw std::logic_error("typology_name: bad enum");
}

Typology typology_from_name(const std::string& s) {
  if (s == "none") return Typology::None;
  if (s == "high_amount_burst") return Typology::HighAmountBurst;
  if (s == "rapid_use_run") return Typology::RapidUseRun;
  if (s == "late_night_high_value") return Typology::LateNightHighValue;
  if (s == "category_outlier") return Typology::CategoryOutlier;
  if (s == "spree") return Typology::Spree;
  throw std::invalid_argument("unknown typology: " + s);
}

void validate_config(const GenConfig& cfg) {
  if (cfg.n_transactions == 0) throw std::invalid_argument("n_transactions must be > 0");
  double mix_sum = 0.0;
  for (const auto& [label, p] : cfg.category_mix) {
    if (p < 0.0) throw std::invalid_argument("negative category probability: " + label);
    mix_sum += p;
  }
  if (std::abs(mix_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("category mix must sum to 1");
  }
  if (!(cfg.anomaly_rate > 0.0) || !(cfg.anomaly_rate < 0.1)) {
    throw std::invalid_argument("anomaly_rate must lie in (0, 0.1)");
  }
  if (cfg.hour_weights.size() != 24) {
    throw std::invalid_argument("hour_weights must have 24 entries");
  }
}

namespace {

struct Sizes {
  std::size_t n_cards = 0;
  std::size_t n_merchants = 0;
  std::size_t n_regular = 0;  // cards [0, n_regular) are regular, rest dormant
};

Sizes resolve_sizes(const GenConfig& cfg) {
  Sizes s;
  s.n_cards = cfg.n_cards != 0 ? cfg.n_cards
                               : std::max<std::size_t>(40, cfg.n_transactions / 170);
  s.n_merchants = cfg.n_merchants != 0
                      ? cfg.n_merchants
                      : std::max<std::size_t>(cfg.category_mix.size() + 1, s.n_cards / 4);
  const double rare = std::clamp(cfg.rare_card_fraction, 0.0, 0.9);
  s.n_regular = s.n_cards - static_cast<std::size_t>(std::floor(rare * s.n_cards));
  if (s.n_regular == 0) s.n_regular = 1;
  return s;
}

std::string card_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "C%05zu", i);
  return buf;
}

std::string merchant_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "M%04zu", i);
  return buf;
}

// largest-remainder apportionment of `total` by `weights`; deterministic
std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size(), 0);
  if (wsum <= 0.0 || total == 0) return out;
  std::vector<std::pair<double, std::size_t>> rema;  // (-fraction, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double share = static_cast<double>(total) * weights[i] / wsum;
    out[i] = static_cast<std::size_t>(std::floor(share));
    assigned += out[i];
    rema.emplace_back(-(share - std::floor(share)), i);
  }
  std::sort(rema.begin(), rema.end());
  for (std::size_t j = 0; assigned < total; ++j, ++assigned) {
    ++out[rema[j % rema.size()].second];
  }
  return out;
}

// inverse-CDF sampler over the (day, hour) grid of one calendar year
class TimeSampler {
 public:
  explicit TimeSampler(const GenConfig& cfg) {
    const std::int64_t d0 = days_from_civil(cfg.start_year, 1, 1);
    const std::int64_t d1 = days_from_civil(cfg.start_year + 1, 1, 1);
    start_ms_ = d0 * kMsPerDay;
    n_days_ = static_cast<std::size_t>(d1 - d0);
    cum_.reserve(n_days_ * 24);
    double acc = 0.0;
    for (std::size_t d = 0; d < n_days_; ++d) {
      int y, m, day;
      civil_from_days(d0 + static_cast<std::int64_t>(d), y, m, day);
      const int dow = static_cast<int>(((d0 + static_cast<std::int64_t>(d)) % 7 + 7 + 3) % 7);
      double day_w = 1.0;
      if (dow >= 5) day_w *= cfg.weekend_amplitude;
      if (m == 12) day_w *= cfg.december_amplitude;
      for (int h = 0; h < 24; ++h) {
        acc += day_w * cfg.hour_weights[static_cast<std::size_t>(h)];
        cum_.push_back(acc);
      }
    }
    total_ = acc;
  }

  TimestampMs draw(Rng& rng) const {
    const double u = rng.uniform() * total_;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    const auto cell = static_cast<std::size_t>(it - cum_.begin());
    const std::size_t day = cell / 24, hour = cell % 24;
    return start_ms_ + static_cast<std::int64_t>(day) * kMsPerDay +
           static_cast<std::int64_t>(hour) * 3'600'000 +
           static_cast<std::int64_t>(rng.uniform_int(3'600'000));
  }

  TimestampMs year_start() const { return start_ms_; }
  std::size_t n_days() const { return n_days_; }

 private:
  TimestampMs start_ms_ = 0;
  std::size_t n_days_ = 365;
  std::vector<double> cum_;
  double total_ = 0.0;
};

struct MerchantDirectory {
  // category label -> merchant ids of that category
  std::map<std::string, std::vector<std::string>> by_category;
};

MerchantDirectory index_merchants(const GenConfig& cfg, const DimensionTables& tables) {
  std::unordered_map<std::string, std::string> cat_label;  // id -> label
  for (const auto& c : tables.categories) cat_label[c.category_id] = c.label;
  MerchantDirectory dir;
  for (const auto& m : tables.merchants) {
    dir.by_category[cat_label.at(m.category_id)].push_back(m.merchant_id);
  }
  (void)cfg;
  return dir;
}

double card_routine_mean(const GenConfig& cfg, Rng& rng) {
  const double m = std::exp(rng.normal(cfg.card_mean_mu, cfg.card_mean_sigma));
  return std::clamp(m, cfg.card_mean_floor, cfg.card_mean_cap);
}

Cents to_cents(double dollars) {
  return std::max<Cents>(100, static_cast<Cents>(std::llround(dollars * 100.0)));
}

// routine amounts for the median-based planting heuristics
double card_median_amount(const std::vector<const CleanTransaction*>& rows) {
  std::vector<double> a;
  a.reserve(rows.size());
  for (const auto* r : rows) a.push_back(cents_to_dollars(r->amount));
  return nearest_rank_quantile(std::move(a), 0.5);
}

void enforce_increasing(std::vector<LabeledTransaction>& txns) {
  for (std::size_t i = 1; i < txns.size(); ++i) {
    if (txns[i].txn.card_id == txns[i - 1].txn.card_id &&
        txns[i].txn.timestamp <= txns[i - 1].txn.timestamp) {
      txns[i].txn.timestamp = txns[i - 1].txn.timestamp + 1;
    }
  }
}

void sort_corpus(std::vector<LabeledTransaction>& txns) {
  std::stable_sort(txns.begin(), txns.end(),
                   [](const LabeledTransaction& a, const LabeledTransaction& b) {
                     if (a.txn.card_id != b.txn.card_id) return a.txn.card_id < b.txn.card_id;
                     if (a.txn.timestamp != b.txn.timestamp)
                       return a.txn.timestamp < b.txn.timestamp;
                     return a.txn.txn_id < b.txn.txn_id;
                   });
}

}  // namespace

DimensionTables make_dimension_tables(const GenConfig& cfg) {
  validate_config(cfg);
  const Sizes sz = resolve_sizes(cfg);
  DimensionTables t;

  t.cardholders.reserve(sz.n_cards);
  for (std::size_t i = 0; i < sz.n_cards; ++i) {
    t.cardholders.push_back({card_name(i), "Holder " + std::to_string(i), "default"});
  }

  for (std::size_t i = 0; i < cfg.category_mix.size(); ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "G%02zu", i);
    t.categories.push_back({buf, cfg.category_mix[i].first});
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "G%02zu", cfg.category_mix.size());
  t.categories.push_back({buf, cfg.outlier_category_label});

  // last merchant carries the outlier category; the rest split by the mix
  std::vector<double> weights;
  for (const auto& [label, p] : cfg.category_mix) weights.push_back(p);
  const std::vector<std::size_t> counts = apportion(weights, sz.n_merchants - 1);
  std::size_t id = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t j = 0; j < std::max<std::size_t>(1, counts[c]) && id < sz.n_merchants - 1;
         ++j) {
      t.merchants.push_back(
          {merchant_name(id), "Merchant " + std::to_string(id), t.categories[c].category_id});
      ++id;
    }
  }
  // backfill if the minimum-one rule starved later categories
  for (std::size_t c = 0; id < sz.n_merchants - 1; ++id, ++c) {
    t.merchants.push_back({merchant_name(id), "Merchant " + std::to_string(id),
                           t.categories[c % cfg.category_mix.size()].category_id});
  }
  t.merchants.push_back({merchant_name(sz.n_merchants - 1),
                         "Merchant " + std::to_string(sz.n_merchants - 1),
                         t.categories.back().category_id});
  return t;
}

std::vector<LabeledTransaction> generate(const GenConfig& cfg) {
  validate_config(cfg);
  const Sizes sz = resolve_sizes(cfg);
  const DimensionTables tables = make_dimension_tables(cfg);
  const MerchantDirectory dir = index_merchants(cfg, tables);
  const TimeSampler sampler(cfg);
  Rng base(cfg.seed);

  // per-card transaction budgets: dormant cards run at a fraction of the rate
  std::vector<double> card_weights(sz.n_cards, 1.0);
  for (std::size_t c = sz.n_regular; c < sz.n_cards; ++c) {
    card_weights[c] = cfg.rare_card_weight;
  }
  const std::vector<std::size_t> counts = apportion(card_weights, cfg.n_transactions);

  // category CDF
  std::vector<double> cat_cum;
  double acc = 0.0;
  for (const auto& [label, p] : cfg.category_mix) {
    acc += p;
    cat_cum.push_back(acc);
  }

  // hour-of-day CDF for the dormant cards' periodic schedule
  std::vector<double> hour_cum;
  double hacc = 0.0;
  for (double w : cfg.hour_weights) {
    hacc += w;
    hour_cum.push_back(hacc);
  }

  std::vector<LabeledTransaction> out;
  out.reserve(cfg.n_transactions);
  for (std::size_t c = 0; c < sz.n_cards; ++c) {
    if (counts[c] == 0) continue;
    Rng rng = base.fork(c);
    const double mu = card_routine_mean(cfg, rng);

    std::vector<TimestampMs> times(counts[c]);
    if (c >= sz.n_regular) {
      // dormant cards follow a jittered periodic rhythm: evenly spaced slots
      // across the year, each visit placed inside its slot
      const double period_days =
          static_cast<double>(sampler.n_days()) / static_cast<double>(counts[c]);
      for (std::size_t i = 0; i < counts[c]; ++i) {
        const double day = (static_cast<double>(i) + 0.35 + 0.3 * rng.uniform()) * period_days;
        const double hu = rng.uniform() * hour_cum.back();
        const auto hour = static_cast<std::size_t>(
            std::upper_bound(hour_cum.begin(), hour_cum.end(), hu) - hour_cum.begin());
        times[i] = sampler.year_start() + static_cast<std::int64_t>(day) * kMsPerDay +
                   static_cast<std::int64_t>(std::min(hour, std::size_t{23})) * 3'600'000 +
                   static_cast<std::int64_t>(rng.uniform_int(3'600'000));
      }
    } else {
      for (auto& t : times) t = sampler.draw(rng);
    }
    std::sort(times.begin(), times.end());

    for (std::size_t i = 0; i < counts[c]; ++i) {
      LabeledTransaction lt;
      lt.txn.card_id = card_name(c);
      lt.txn.timestamp = times[i];

      const double u = rng.uniform() * cat_cum.back();
      const auto ci = static_cast<std::size_t>(
          std::upper_bound(cat_cum.begin(), cat_cum.end(), u) - cat_cum.begin());
      const std::string& label = cfg.category_mix[std::min(ci, cat_cum.size() - 1)].first;
      lt.txn.category_label = label;
      const auto& merchants = dir.by_category.at(label);
      lt.txn.merchant_id = merchants[rng.uniform_int(merchants.size())];

      double dollars;
      if (label == "retail") {
        dollars = mu * cfg.big_ticket_multiplier * (1.0 + cfg.big_ticket_noise * rng.normal());
      } else {
        dollars = mu * (1.0 + cfg.routine_noise * rng.normal());
      }
      lt.txn.amount = to_cents(dollars);
      out.push_back(std::move(lt));
    }
  }

  sort_corpus(out);
  enforce_increasing(out);
  char idbuf[24];
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::snprintf(idbuf, sizeof idbuf, "T%07zu", i);
    out[i].txn.txn_id = idbuf;
  }
  return out;
}

namespace {

struct PlantEvent {
  Typology typology = Typology::None;
  std::size_t rows = 1;
};

}  // namespace

std::vector<LabeledTransaction> inject_anomalies(std::vector<LabeledTransaction> txns,
                                                 const GenConfig& cfg) {
  validate_config(cfg);
  const std::size_t n = txns.size();
  const auto planted_total =
      static_cast<std::size_t>(std::llround(cfg.anomaly_rate * static_cast<double>(n)));
  if (planted_total < 1) throw std::invalid_argument("anomaly_rate * n must be >= 1");
  if (planted_total < 50) {
    throw std::invalid_argument("corpus too small: need >= 50 planted rows for all typologies");
  }

  const Sizes sz = resolve_sizes(cfg);
  const TimeSampler sampler(cfg);
  Rng base(cfg.seed ^ 0xA50FA50FA50FA50FULL);

  // typology budgets: even split, remainder to the earlier entries
  std::array<Typology, 5> order = {Typology::HighAmountBurst, Typology::RapidUseRun,
                                   Typology::LateNightHighValue, Typology::CategoryOutlier,
                                   Typology::Spree};
  std::array<std::size_t, 5> budget{};
  budget.fill(planted_total / 5);
  for (std::size_t i = 0; i < planted_total % 5; ++i) ++budget[i];
  if (budget[4] < 10) {
    throw std::invalid_argument("corpus too small: spree typology needs >= 10 rows");
  }

  std::vector<PlantEvent> events;
  for (std::size_t r = 0; r < budget[0]; ++r) events.push_back({order[0], 1});
  for (std::size_t left = budget[1]; left > 0;) {
    const std::size_t run = std::min<std::size_t>(5, left);
    events.push_back({order[1], run});
    left -= run;
  }
  for (std::size_t r = 0; r < budget[2]; ++r) events.push_back({order[2], 1});
  for (std::size_t r = 0; r < budget[3]; ++r) events.push_back({order[3], 1});
  {
    const std::size_t sprees = budget[4] / 10;
    std::size_t leftover = budget[4] % 10;
    for (std::size_t s = 0; s < sprees; ++s) {
      std::size_t rows = 10;
      if (s + 1 == sprees) rows += leftover;
      events.push_back({order[4], rows});
    }
  }

  // group rows by card (input is (card, timestamp) sorted)
  std::map<std::string, std::vector<const CleanTransaction*>> by_card;
  for (const auto& lt : txns) by_card[lt.txn.card_id].push_back(&lt.txn);

  // victim pool: regular cards with enough history; sized so that the
  // high-amount rows stay a small share of any one card's activity and the
  // card's own sigma cannot swallow them
  std::vector<std::string> eligible;
  for (std::size_t c = 0; c < sz.n_regular; ++c) {
    const auto it = by_card.find(card_name(c));
    if (it != by_card.end() && it->second.size() >= 8) eligible.push_back(it->first);
  }
  if (eligible.empty()) throw std::invalid_argument("corpus too small: no eligible victim cards");
  base.fork(1).shuffle(eligible);
  const std::size_t high_rows = budget[0] + budget[1] + budget[2] + budget[4];
  std::size_t pool =
      std::max<std::size_t>({1, (high_rows + 5) / 6, (events.size() + 9) / 10});
  pool = std::min(pool, eligible.size());
  eligible.resize(pool);

  std::vector<LabeledTransaction> planted;
  planted.reserve(planted_total);
  std::size_t next_id = 0;
  char idbuf[24];
  auto make_row = [&](const std::string& card, TimestampMs ts, double dollars,
                      const std::string& category, const std::string& merchant, Typology ty) {
    LabeledTransaction lt;
    std::snprintf(idbuf, sizeof idbuf, "A%06zu", next_id++);
    lt.txn.txn_id = idbuf;
    lt.txn.card_id = card;
    lt.txn.merchant_id = merchant;
    lt.txn.category_label = category;
    lt.txn.timestamp = ts;
    lt.txn.amount = to_cents(dollars);
    lt.is_fraud = true;
    lt.typology = ty;
    planted.push_back(std::move(lt));
  };

  const DimensionTables tables = make_dimension_tables(cfg);
  const MerchantDirectory dir = index_merchants(cfg, tables);
  const auto& outlier_merchants = dir.by_category.at(cfg.outlier_category_label);
  // planting reuses each card's usual merchants so only the behavior stands out
  auto usual_merchant = [&](const std::vector<const CleanTransaction*>& rows, Rng& rng,
                            std::string* category) {
    const CleanTransaction* pick = rows[rng.uniform_int(rows.size())];
    *category = pick->category_label;
    return pick->merchant_id;
  };

  for (std::size_t e = 0; e < events.size(); ++e) {
    const PlantEvent& ev = events[e];
    const std::string& card = eligible[e % eligible.size()];
    const auto& rows = by_card.at(card);
    Rng rng = base.fork(0x10000 + e);
    const double med = card_median_amount(rows);
    std::string category;

    switch (ev.typology) {
      case Typology::HighAmountBurst: {
        const std::string merchant = usual_merchant(rows, rng, &category);
        make_row(card, sampler.draw(rng),
                 cfg.burst_multiplier * med * std::exp(cfg.burst_noise * rng.normal()), category,
                 merchant, ev.typology);
        break;
      }
      case Typology::LateNightHighValue: {
        const std::string merchant = usual_merchant(rows, rng, &category);
        const auto day = static_cast<std::int64_t>(rng.uniform_int(sampler.n_days()));
        const TimestampMs ts = sampler.year_start() + day * kMsPerDay +
                               static_cast<std::int64_t>(rng.uniform_int(5)) * 3'600'000 +
                               static_cast<std::int64_t>(rng.uniform_int(3'600'000));
        make_row(card, ts,
                 cfg.burst_multiplier * med * std::exp(cfg.burst_noise * rng.normal()), category,
                 merchant, ev.typology);
        break;
      }
      case Typology::CategoryOutlier: {
        const std::string merchant = outlier_merchants[rng.uniform_int(outlier_merchants.size())];
        make_row(card, sampler.draw(rng), med * (1.0 + 0.05 * rng.normal()),
                 cfg.outlier_category_label, merchant, ev.typology);
        break;
      }
      case Typology::RapidUseRun: {
        const CleanTransaction* anchor = rows[rng.uniform_int(rows.size())];
        TimestampMs ts = anchor->timestamp + 20'000;
        // geometric amount ladder: adjacent rows of a run separate
        // multiplicatively instead of forming a tight clump in feature space
        const double ratio =
            ev.rows > 1 ? std::pow(cfg.rapid_multiplier_hi / cfg.rapid_multiplier_lo,
                                   1.0 / static_cast<double>(ev.rows - 1))
                        : 1.0;
        double mult = cfg.rapid_multiplier_lo;
        for (std::size_t r = 0; r < ev.rows; ++r) {
          const std::string merchant = usual_merchant(rows, rng, &category);
          make_row(card, ts, mult * med * std::exp(0.1 * rng.normal()), category, merchant,
                   ev.typology);
          mult *= ratio;
          ts += 40'000;  // 40 s apart, each gap < 60 s
        }
        break;
      }
      case Typology::Spree: {
        const CleanTransaction* anchor = rows[rng.uniform_int(rows.size())];
        TimestampMs ts = day_index(anchor->timestamp) * kMsPerDay + 10LL * 3'600'000 +
                         static_cast<std::int64_t>(rng.uniform_int(120)) * 60'000;
        const double ratio =
            ev.rows > 1 ? std::pow(cfg.spree_multiplier_hi / cfg.spree_multiplier_lo,
                                   1.0 / static_cast<double>(ev.rows - 1))
                        : 1.0;
        double mult = cfg.spree_multiplier_lo;
        for (std::size_t r = 0; r < ev.rows; ++r) {
          const std::string merchant = usual_merchant(rows, rng, &category);
          make_row(card, ts, mult * med * std::exp(0.1 * rng.normal()), category, merchant,
                   ev.typology);
          mult *= ratio;
          ts += 45'000;
        }
        break;
      }
      case Typology::None:
        throw std::logic_error("inject_anomalies: unlabeled event");
    }
  }

  // delete an equal number of normal rows from cards outside the victim pool
  std::unordered_set<std::string> victims(eligible.begin(), eligible.end());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < txns.size(); ++i) {
    if (victims.count(txns[i].txn.card_id) == 0) candidates.push_back(i);
  }
  if (candidates.size() < planted.size()) {
    throw std::invalid_argument("corpus too small: not enough rows to swap for planted ones");
  }
  base.fork(2).shuffle(candidates);
  candidates.resize(planted.size());
  std::sort(candidates.begin(), candidates.end());
  std::vector<LabeledTransaction> result;
  result.reserve(txns.size());
  std::size_t drop = 0;
  for (std::size_t i = 0; i < txns.size(); ++i) {
    if (drop < candidates.size() && candidates[drop] == i) {
      ++drop;
      continue;
    }
    result.push_back(std::move(txns[i]));
  }
  for (auto& lt : planted) result.push_back(std::move(lt));

  sort_corpus(result);
  enforce_increasing(result);
  return result;
}

std::vector<CleanTransaction> strip_labels(const std::vector<LabeledTransaction>& txns) {
  std::vector<CleanTransaction> out;
  out.reserve(txns.size());
  for (const auto& lt : txns) out.push_back(lt.txn);
  return out;
}

void write_corpus(const std::string& dir, const std::vector<LabeledTransaction>& txns,
                  const DimensionTables& tables) {
  auto open = [&](const std::string& name) {
    std::ofstream f(dir + "/" + name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + dir + "/" + name);
    return f;
  };

  {
    auto f = open("transactions.csv");
    f << "txn_id,card_id,merchant_id,timestamp,amount\n";
    char amount[32];
    for (const auto& lt : txns) {
      std::snprintf(amount, sizeof amount, "%lld.%02lld",
                    static_cast<long long>(lt.txn.amount / 100),
                    static_cast<long long>(lt.txn.amount % 100));
      f << lt.txn.txn_id << ',' << lt.txn.card_id << ',' << lt.txn.merchant_id << ','
        << format_iso8601(lt.txn.timestamp) << ',' << amount << '\n';
    }
  }
  {
    auto f = open("cardholders.csv");
    f << "card_id,name,region\n";
    for (const auto& c : tables.cardholders) {
      f << c.card_id << ',' << c.name << ',' << c.region << '\n';
    }
  }
  {
    auto f = open("merchants.csv");
    f << "merchant_id,name,category_id\n";
    for (const auto& m : tables.merchants) {
      f << m.merchant_id << ',' << m.name << ',' << m.category_id << '\n';
    }
  }
  {
    auto f = open("categories.csv");
    f << "category_id,label\n";
    for (const auto& c : tables.categories) {
      f << c.category_id << ',' << c.label << '\n';
    }
  }
  {
    auto f = open("labels.csv");
    f << "txn_id,is_fraud,typology\n";
    for (const auto& lt : txns) {
      f << lt.txn.txn_id << ',' << (lt.is_fraud ? "true" : "false") << ','
        << typology_name(lt.typology) << '\n';
    }
  }
}

}  // namespace fraudlab
