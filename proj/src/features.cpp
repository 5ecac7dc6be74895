#include "fraudlab/features.hpp"

#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <stdexcept>

#include "fraudlab/time_util.hpp"

namespace fraudlab {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

std::map<std::string, CardholderStats> cardholder_stats(
    const std::vector<CleanTransaction>& txns) {
  std::map<std::string, std::vector<double>> amounts;
  for (const auto& t : txns) {
    amounts[t.card_id].push_back(cents_to_dollars(t.amount));
  }
  std::map<std::string, CardholderStats> out;
  for (const auto& [card, v] : amounts) {
    CardholderStats s;
    s.mean_amount = mean_of(v);
    s.std_amount = stddev_pop(v);
    s.txn_count = v.size();
    out.emplace(card, s);
  }
  return out;
}

std::map<std::string, double> category_frequency(
    const std::vector<CleanTransaction>& txns) {
  if (txns.empty()) throw std::invalid_argument("category_frequency: empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& t : txns) ++counts[t.category_label];
  std::map<std::string, double> out;
  const double n = static_cast<double>(txns.size());
  for (const auto& [label, c] : counts) out.emplace(label, static_cast<double>(c) / n);
  return out;
}

void derive_temporal(TimestampMs ts, FeatureVector& fv) {
  const CivilTime c = to_civil(ts);
  fv.hour = c.hour;
  fv.day_of_week = day_of_week(ts);
  fv.weekend = fv.day_of_week == 5 || fv.day_of_week == 6;
  fv.month = c.month;
}

std::vector<FeatureVector> derive_features(
    const std::vector<CleanTransaction>& txns,
    const std::map<std::string, CardholderStats>& stats,
    const std::map<std::string, double>& cat_freq) {
  std::vector<FeatureVector> out(txns.size());

  constexpr std::int64_t kWindow7 = 7 * kMsPerDay;
  constexpr std::int64_t kWindow30 = 30 * kMsPerDay;

  std::size_t card_begin = 0;
  for (std::size_t i = 0; i < txns.size(); ++i) {
    const auto& t = txns[i];
    FeatureVector& fv = out[i];

    const bool first_of_card = i == 0 || txns[i - 1].card_id != t.card_id;
    if (first_of_card) card_begin = i;
    if (!first_of_card && txns[i - 1].timestamp > t.timestamp) {
      throw std::invalid_argument("derive_features: input not sorted by (card, time)");
    }

    fv.amount = cents_to_dollars(t.amount);
    const auto sit = stats.find(t.card_id);
    if (sit == stats.end()) throw std::invalid_argument("missing stats for card");
    fv.amount_deviation = fv.amount - sit->second.mean_amount;

    // intervals are never computed across suspect rows
    if (first_of_card || t.timestamp_suspect || txns[i - 1].timestamp_suspect) {
      fv.seconds_since_last = kFirstUseSentinelSeconds;
    } else {
      fv.seconds_since_last =
          static_cast<double>(t.timestamp - txns[i - 1].timestamp) / 1000.0;
    }

    const auto cit = cat_freq.find(t.category_label);
    fv.category_frequency = cit == cat_freq.end() ? 0.0 : cit->second;

    derive_temporal(t.timestamp, fv);

    // strictly-prior same-card rows inside the calendar windows
    for (std::size_t j = i; j-- > card_begin;) {
      const std::int64_t age = t.timestamp - txns[j].timestamp;
      if (age > kWindow30) break;
      const double amt = cents_to_dollars(txns[j].amount);
      ++fv.rolling_count_30d;
      fv.rolling_sum_30d += amt;
      if (age <= kWindow7) {
        ++fv.rolling_count_7d;
        fv.rolling_sum_7d += amt;
      }
    }
  }
  return out;
}

FeatureMatrix build_matrix(const std::vector<FeatureVector>& features) {
  FeatureMatrix m;
  const std::size_t n = features.size();
  m.data.rows = n;
  m.data.cols = 4;
  m.data.values.resize(n * 4);
  for (std::size_t i = 0; i < n; ++i) {
    m.data.at(i, 0) = features[i].amount;
    m.data.at(i, 1) = features[i].amount_deviation;
    m.data.at(i, 2) = features[i].seconds_since_last;
    m.data.at(i, 3) = features[i].category_frequency;
  }
  for (std::size_t c = 0; c < 4; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += m.data.at(i, c);
    const double mu = n ? s / static_cast<double>(n) : 0.0;
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = m.data.at(i, c) - mu;
      v += d * d;
    }
    const double sd = n ? std::sqrt(v / static_cast<double>(n)) : 0.0;
    m.params.mean[c] = mu;
    m.params.std[c] = sd;
    for (std::size_t i = 0; i < n; ++i) {
      m.data.at(i, c) = m.params.transform(c, m.data.at(i, c));
    }
  }
  return m;
}

void write_feature_csv(const std::string& path,
                       const std::vector<CleanTransaction>& txns,
                       const std::vector<FeatureVector>& features,
                       const FeatureMatrix& matrix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "txn_id,card_id,merchant_id,category,timestamp,amount,amount_deviation,"
         "seconds_since_last,category_frequency,hour,day_of_week,weekend,month,"
         "rolling_count_7d,rolling_sum_7d,rolling_count_30d,rolling_sum_30d,"
         "z_amount,z_amount_deviation,z_seconds_since_last,z_category_frequency\n";
  for (std::size_t i = 0; i < txns.size(); ++i) {
    const auto& t = txns[i];
    const auto& f = features[i];
    out << t.txn_id << ',' << t.card_id << ',' << t.merchant_id << ','
        << t.category_label << ',' << format_iso8601(t.timestamp) << ','
        << fmt_double(f.amount) << ',' << fmt_double(f.amount_deviation) << ','
        << fmt_double(f.seconds_since_last) << ',' << fmt_double(f.category_frequency)
        << ',' << f.hour << ',' << f.day_of_week << ',' << (f.weekend ? 1 : 0) << ','
        << f.month << ',' << f.rolling_count_7d << ',' << fmt_double(f.rolling_sum_7d)
        << ',' << f.rolling_count_30d << ',' << fmt_double(f.rolling_sum_30d);
    for (std::size_t c = 0; c < 4; ++c) out << ',' << fmt_double(matrix.data.at(i, c));
    out << '\n';
  }
}

}  // namespace fraudlab
