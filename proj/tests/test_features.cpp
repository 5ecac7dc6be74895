#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fraudlab/common.hpp"
#include "fraudlab/features.hpp"
#include "fraudlab/time_util.hpp"

using namespace fraudlab;

namespace {

CleanTransaction ct(const std::string& card, TimestampMs ts, Cents amount,
                    const std::string& category = "pub") {
  CleanTransaction t;
  t.txn_id = card + "-" + std::to_string(ts);
  t.card_id = card;
  t.merchant_id = "m";
  t.category_label = category;
  t.timestamp = ts;
  t.amount = amount;
  return t;
}

std::vector<FeatureVector> features_of(const std::vector<CleanTransaction>& txns) {
  return derive_features(txns, cardholder_stats(txns), category_frequency(txns));
}

}  // namespace

TEST_CASE("per-card stats: singleton, hand-computed sigma, empty input") {
  std::vector<CleanTransaction> one{ct("c1", 0, 4000)};
  auto s1 = cardholder_stats(one);
  CHECK(s1.at("c1").mean_amount == doctest::Approx(40.0));
  CHECK(s1.at("c1").std_amount == 0.0);
  CHECK(s1.at("c1").txn_count == 1);

  std::vector<CleanTransaction> three{ct("c1", 0, 1000), ct("c1", 1000, 2000),
                                      ct("c1", 2000, 3000)};
  auto s3 = cardholder_stats(three);
  CHECK(s3.at("c1").mean_amount == doctest::Approx(20.0));
  CHECK(s3.at("c1").std_amount == doctest::Approx(std::sqrt(200.0 / 3.0)));

  CHECK(cardholder_stats({}).empty());
}

TEST_CASE("first use carries the 9999-minute sentinel; later rows the real gap") {
  std::vector<CleanTransaction> txns{
      ct("c1", parse_iso8601("2024-03-01T10:00:00.000Z"), 1000),
      ct("c1", parse_iso8601("2024-03-01T10:00:45.000Z"), 1000),
      ct("c2", parse_iso8601("2024-03-01T11:00:00.000Z"), 1000),
  };
  const auto f = features_of(txns);
  CHECK(f[0].seconds_since_last == 599'940.0);
  CHECK(f[1].seconds_since_last == doctest::Approx(45.0));
  CHECK(f[2].seconds_since_last == 599'940.0);  // new card resets
}

TEST_CASE("gaps are never measured across suspect rows") {
  std::vector<CleanTransaction> txns{
      ct("c1", 0, 1000), ct("c1", 10'000, 1000), ct("c1", 20'000, 1000)};
  txns[1].timestamp_suspect = true;
  const auto f = features_of(txns);
  CHECK(f[1].seconds_since_last == 599'940.0);
  CHECK(f[2].seconds_since_last == 599'940.0);  // predecessor is suspect
}

TEST_CASE("unsorted input is rejected") {
  std::vector<CleanTransaction> txns{ct("c1", 5000, 1000), ct("c1", 0, 1000)};
  auto stats = cardholder_stats(txns);
  auto freq = category_frequency(txns);
  CHECK_THROWS_AS(derive_features(txns, stats, freq), std::invalid_argument);
}

TEST_CASE("temporal fields in UTC: weekday, weekend, month") {
  FeatureVector fv;
  derive_temporal(parse_iso8601("2024-07-06T00:30:00.000Z"), fv);  // Saturday
  CHECK(fv.day_of_week == 5);
  CHECK(fv.weekend);
  CHECK(fv.month == 7);
  CHECK(fv.hour == 0);

  derive_temporal(parse_iso8601("2024-03-04T09:00:00.000Z"), fv);  // Monday
  CHECK(fv.day_of_week == 0);
  CHECK(!fv.weekend);
  CHECK(fv.hour == 9);

  derive_temporal(parse_iso8601("2024-03-02T23:15:00.000Z"), fv);  // Saturday night
  CHECK(fv.hour == 23);
  CHECK(fv.weekend);
}

TEST_CASE("category frequencies are row proportions that sum to one") {
  std::vector<CleanTransaction> txns;
  for (int i = 0; i < 75; ++i) txns.push_back(ct("c1", i * 1000, 100, "a"));
  for (int i = 0; i < 25; ++i) txns.push_back(ct("c2", i * 1000, 100, "b"));
  const auto freq = category_frequency(txns);
  CHECK(freq.at("a") == doctest::Approx(0.75));
  CHECK(freq.at("b") == doctest::Approx(0.25));

  // 20-row, 5-category fixture tallied by hand: 8/5/3/2/2
  std::vector<CleanTransaction> fix;
  const char* cats[20] = {"p", "p", "p", "p", "p", "p", "p", "p", "f", "f",
                          "f", "f", "f", "r", "r", "r", "b", "b", "k", "k"};
  for (int i = 0; i < 20; ++i) fix.push_back(ct("c1", i * 1000, 100, cats[i]));
  const auto ff = category_frequency(fix);
  CHECK(ff.at("p") == doctest::Approx(0.40));
  CHECK(ff.at("f") == doctest::Approx(0.25));
  CHECK(ff.at("r") == doctest::Approx(0.15));
  CHECK(ff.at("b") == doctest::Approx(0.10));
  CHECK(ff.at("k") == doctest::Approx(0.10));
  double total = 0.0;
  for (const auto& [label, p] : ff) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(category_frequency({}), std::invalid_argument);

  // degenerate single category
  std::vector<CleanTransaction> mono{ct("c1", 0, 100, "x"), ct("c1", 1000, 100, "x")};
  CHECK(category_frequency(mono).at("x") == 1.0);
}

TEST_CASE("rolling windows match a brute-force scan") {
  Rng rng(17);
  std::vector<CleanTransaction> txns;
  for (int card = 0; card < 5; ++card) {
    TimestampMs ts = parse_iso8601("2024-01-01T00:00:00.000Z");
    for (int i = 0; i < 200; ++i) {
      ts += static_cast<TimestampMs>(rng.uniform_int(2 * kMsPerDay)) + 1;
      txns.push_back(ct("c" + std::to_string(card), ts,
                        static_cast<Cents>(100 + rng.uniform_int(10'000))));
    }
  }
  std::sort(txns.begin(), txns.end(), [](const auto& a, const auto& b) {
    return std::tie(a.card_id, a.timestamp) < std::tie(b.card_id, b.timestamp);
  });
  const auto f = features_of(txns);

  for (std::size_t i = 0; i < txns.size(); ++i) {
    std::size_t c7 = 0, c30 = 0;
    double s7 = 0.0, s30 = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      if (txns[j].card_id != txns[i].card_id) continue;
      const auto age = txns[i].timestamp - txns[j].timestamp;
      if (age <= 30 * kMsPerDay) {
        ++c30;
        s30 += cents_to_dollars(txns[j].amount);
      }
      if (age <= 7 * kMsPerDay) {
        ++c7;
        s7 += cents_to_dollars(txns[j].amount);
      }
    }
    CHECK(f[i].rolling_count_7d == c7);
    CHECK(f[i].rolling_count_30d == c30);
    CHECK(f[i].rolling_sum_7d == doctest::Approx(s7).epsilon(1e-9));
    CHECK(f[i].rolling_sum_30d == doctest::Approx(s30).epsilon(1e-9));
    CHECK(f[i].rolling_count_7d <= f[i].rolling_count_30d);
  }
}

TEST_CASE("amount deviation sums to zero within each card") {
  Rng rng(23);
  std::vector<CleanTransaction> txns;
  for (int card = 0; card < 4; ++card) {
    for (int i = 0; i < 50; ++i) {
      txns.push_back(ct("c" + std::to_string(card), i * 60'000,
                        static_cast<Cents>(100 + rng.uniform_int(100'000))));
    }
  }
  const auto f = features_of(txns);
  std::map<std::string, double> per_card;
  double scale = 0.0;
  for (std::size_t i = 0; i < txns.size(); ++i) {
    per_card[txns[i].card_id] += f[i].amount_deviation;
    scale = std::max(scale, std::abs(f[i].amount));
  }
  for (const auto& [card, sum] : per_card) {
    CHECK(std::abs(sum) <= 1e-6 * scale * 50);
  }
}

TEST_CASE("standardized matrix has zero mean, unit variance, invertible transform") {
  Rng rng(29);
  std::vector<CleanTransaction> txns;
  for (int i = 0; i < 500; ++i) {
    txns.push_back(ct("c" + std::to_string(i % 13), i * 90'000,
                      static_cast<Cents>(50 + rng.uniform_int(50'000)),
                      i % 3 == 0 ? "a" : "b"));
  }
  std::sort(txns.begin(), txns.end(), [](const auto& a, const auto& b) {
    return std::tie(a.card_id, a.timestamp) < std::tie(b.card_id, b.timestamp);
  });
  const auto f = features_of(txns);
  const auto m = build_matrix(f);
  REQUIRE(m.data.rows == 500);
  REQUIRE(m.data.cols == 4);

  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<double> col(m.data.rows);
    for (std::size_t i = 0; i < m.data.rows; ++i) col[i] = m.data.at(i, c);
    CHECK(std::abs(mean_of(col)) < 1e-9);
    CHECK(stddev_pop(col) == doctest::Approx(1.0).epsilon(1e-9));
  }

  // inverse transform recovers the raw values
  const double raw0 = f[7].amount;
  CHECK(m.params.inverse(0, m.data.at(7, 0)) == doctest::Approx(raw0).epsilon(1e-9));
}

TEST_CASE("a constant column standardizes to all zeros") {
  std::vector<FeatureVector> f(10);
  for (auto& fv : f) {
    fv.amount = 33.0;  // constant
    fv.amount_deviation = 0.0;
    fv.seconds_since_last = 100.0;
    fv.category_frequency = 1.0;
  }
  f[3].seconds_since_last = 200.0;  // one varying column
  const auto m = build_matrix(f);
  for (std::size_t i = 0; i < m.data.rows; ++i) {
    CHECK(m.data.at(i, 0) == 0.0);
    CHECK(m.data.at(i, 3) == 0.0);
  }
}

TEST_CASE("column {1,2,3} standardizes to -1.224745, 0, +1.224745") {
  std::vector<FeatureVector> f(3);
  for (int i = 0; i < 3; ++i) {
    f[i].amount = 1.0 + i;
    f[i].amount_deviation = 0.0;
    f[i].seconds_since_last = 0.0;
    f[i].category_frequency = 0.0;
  }
  const auto m = build_matrix(f);
  CHECK(m.params.std[0] == doctest::Approx(0.816497).epsilon(1e-5));
  CHECK(m.data.at(0, 0) == doctest::Approx(-1.224745).epsilon(1e-5));
  CHECK(m.data.at(1, 0) == doctest::Approx(0.0));
  CHECK(m.data.at(2, 0) == doctest::Approx(1.224745).epsilon(1e-5));
}

TEST_CASE("standardizing an already standardized matrix is a fixpoint") {
  Rng rng(31);
  std::vector<FeatureVector> f(300);
  for (auto& fv : f) {
    fv.amount = rng.normal(50, 10);
    fv.amount_deviation = rng.normal(0, 5);
    fv.seconds_since_last = rng.uniform(1, 1e5);
    fv.category_frequency = rng.uniform(0.01, 0.5);
  }
  const auto m1 = build_matrix(f);
  std::vector<FeatureVector> z(300);
  for (std::size_t i = 0; i < 300; ++i) {
    z[i].amount = m1.data.at(i, 0);
    z[i].amount_deviation = m1.data.at(i, 1);
    z[i].seconds_since_last = m1.data.at(i, 2);
    z[i].category_frequency = m1.data.at(i, 3);
  }
  const auto m2 = build_matrix(z);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(std::abs(m2.params.mean[c]) < 1e-9);
    CHECK(m2.params.std[c] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("feature csv export writes raw and standardized columns") {
  std::vector<CleanTransaction> txns{ct("c1", 0, 1000), ct("c1", 60'000, 2000),
                                     ct("c1", 120'000, 3000)};
  const auto f = features_of(txns);
  const auto m = build_matrix(f);
  const std::string path = "/tmp/fraudlab_features_test.csv";
  write_feature_csv(path, txns, f, m);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header.find("amount") != std::string::npos);
  CHECK(header.find("txn_id") != std::string::npos);
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
  std::remove(path.c_str());
}
