#include <doctest.h>

#include <cmath>
#include <vector>

#include "fraudlab/arf.hpp"
#include "fraudlab/common.hpp"

using namespace fraudlab;

namespace {

ArfFeatures feats(double f_if, double f_ocsvm, double f_ae, double spend, double time) {
  ArfFeatures f;
  f.f_if = f_if;
  f.f_ocsvm = f_ocsvm;
  f.f_ae = f_ae;
  f.delta_spend = spend;
  f.delta_time = time;
  return f;
}

}  // namespace

TEST_CASE("contextual initialization formula and ordering") {
  ArfContext neutral;  // prior 0.005, no volatility, no legal weight
  const auto w = arf_init_weights(neutral);
  CHECK(w.w[0] == doctest::Approx(0.2));
  CHECK(w.w[1] == doctest::Approx(0.2));
  CHECK(w.w[2] == doctest::Approx(0.2));
  CHECK(w.w[3] == doctest::Approx(0.4));  // 0.2 * (1 + 0.005/0.005)
  CHECK(w.w[4] == doctest::Approx(0.4));

  ArfContext rural;
  rural.prior = 0.02;
  ArfContext metro;
  metro.prior = 0.005;
  CHECK(arf_init_weights(rural).w[3] > arf_init_weights(metro).w[3]);

  ArfContext tiny;
  tiny.prior = 1e-9;
  const auto wt = arf_init_weights(tiny);
  for (double v : wt.w) CHECK(v == doctest::Approx(0.2).epsilon(1e-6));

  // volatility and regulatory factors scale the behavioral weights only
  ArfContext hot;
  hot.prior = 0.005;
  hot.volatility = 1.0;
  hot.legal_weight = 2.0;
  const auto wh = arf_init_weights(hot);
  CHECK(wh.w[3] == doctest::Approx(0.4 * 1.5 * 1.5));
  CHECK(wh.w[0] == doctest::Approx(0.2));

  // extreme context clips at the cap
  ArfContext extreme;
  extreme.prior = 0.5;
  extreme.volatility = 1.0;
  extreme.legal_weight = 100.0;
  const auto we = arf_init_weights(extreme, 5.0);
  CHECK(we.w[3] == 5.0);
}

TEST_CASE("risk score is the weighted sum of the five inputs") {
  ArfWeights w;  // all 0.2
  CHECK(arf_score(w, feats(1, 0, 1, 2.0, 0.5)) == doctest::Approx(0.9));
  CHECK(arf_score(w, feats(0, 0, 0, 0, 0)) == 0.0);

  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    ArfWeights rw;
    for (auto& x : rw.w) x = rng.uniform(0, 5);
    const auto f = feats(rng.uniform() < 0.5, rng.uniform() < 0.5, rng.uniform() < 0.5,
                         rng.uniform(0, 10), rng.uniform());
    const double r = arf_score(rw, f);
    ArfWeights doubled = rw;
    for (auto& x : doubled.w) x *= 2.0;
    CHECK(arf_score(doubled, f) == doctest::Approx(2.0 * r).epsilon(1e-12));
    // linearity in features too
    double manual = 0.0;
    const auto arr = f.as_array();
    for (int k = 0; k < 5; ++k) manual += rw.w[k] * arr[k];
    CHECK(r == doctest::Approx(manual).epsilon(1e-12));
  }
}

TEST_CASE("feature derivation caps and clamps") {
  // spend magnitude capped at 10, zero when sigma is zero
  auto f = make_arf_features(true, false, true, 1000.0, 50.0, 1.0, 30.0);
  CHECK(f.f_if == 1.0);
  CHECK(f.f_ocsvm == 0.0);
  CHECK(f.f_ae == 1.0);
  CHECK(f.delta_spend == 10.0);
  CHECK(f.delta_time == doctest::Approx(1.0 - 30.0 / 3600.0));

  CHECK(make_arf_features(false, false, false, 80.0, 50.0, 0.0, 30.0).delta_spend == 0.0);
  CHECK(make_arf_features(false, false, false, 56.0, 50.0, 2.0, 30.0).delta_spend ==
        doctest::Approx(3.0));
  // recency ramp hits zero at and beyond one hour
  CHECK(make_arf_features(false, false, false, 50, 50, 1, 3600.0).delta_time == 0.0);
  CHECK(make_arf_features(false, false, false, 50, 50, 1, 360'000.0).delta_time == 0.0);
  CHECK(make_arf_features(false, false, false, 50, 50, 1, 0.0).delta_time == 1.0);
}

TEST_CASE("pseudo-labels: confident positives, confident negatives, abstention") {
  CHECK(arf_pseudo_label(feats(0, 0, 0, 3.5, 0)) == PseudoLabel::Positive);
  CHECK(arf_pseudo_label(feats(0, 0, 0, 0.1, 0)) == PseudoLabel::Negative);
  CHECK(arf_pseudo_label(feats(1, 0, 0, 0.1, 0)) == PseudoLabel::Abstain);  // flagged
  CHECK(arf_pseudo_label(feats(0, 0, 0, 1.5, 0)) == PseudoLabel::Abstain);
  CHECK(arf_pseudo_label(feats(0, 0, 0, 3.0, 0)) == PseudoLabel::Abstain);  // boundary
}

TEST_CASE("a satisfied hinge leaves the weights untouched") {
  ArfWeights w;
  w.w = {1, 1, 1, 1, 1};
  ArfExample ex;
  ex.feats = feats(1, 1, 1, 5, 1);  // R = 9
  ex.is_true_label = false;
  ex.label = +1.0;
  const double tau = 0.0;  // y*(R - tau) = 9 >= m = 1
  ArfConfig cfg;
  const auto before = w.w;
  CHECK(arf_update(w, {ex}, tau, cfg));
  CHECK(w.w == before);
  CHECK(w.update_count == 1);
}

TEST_CASE("empty batches are a no-op") {
  ArfWeights w;
  ArfConfig cfg;
  CHECK(!arf_update(w, {}, 0.0, cfg));
  CHECK(w.update_count == 0);
}

TEST_CASE("update gradients match central finite differences") {
  Rng rng(13);
  ArfConfig cfg;
  for (int instance = 0; instance < 10; ++instance) {
    ArfWeights w;
    // interior weights so the projection never clips during the check
    for (auto& x : w.w) x = rng.uniform(0.5, 3.0);
    const double tau = rng.uniform(0.0, 2.0);

    std::vector<ArfExample> batch;
    while (batch.size() < 8) {
      ArfExample ex;
      ex.feats = feats(rng.uniform() < 0.5, rng.uniform() < 0.5, rng.uniform() < 0.5,
                       rng.uniform(0, 5), rng.uniform());
      ex.is_true_label = rng.uniform() < 0.5;
      ex.label = ex.is_true_label ? (rng.uniform() < 0.5 ? 1.0 : 0.0)
                                  : (rng.uniform() < 0.5 ? 1.0 : -1.0);
      // keep pseudo-labeled examples away from the hinge kink so the central
      // difference stays on one side of it
      if (!ex.is_true_label) {
        const double margin_gap =
            std::abs(cfg.margin - ex.label * (arf_score(w, ex.feats) - tau));
        if (margin_gap < 1e-2) continue;
      }
      batch.push_back(ex);
    }

    // analytic gradient recovered from a single small step
    ArfWeights stepped = w;
    ArfConfig tiny_cfg = cfg;
    // the update takes one batch-gradient step evaluated at the original
    // weights, so (w - stepped) / lr recovers the gradient exactly; a
    // moderate step keeps the subtraction well above rounding noise
    tiny_cfg.learning_rate = 1e-3;
    REQUIRE(arf_update(stepped, batch, tau, tiny_cfg));
    std::array<double, 5> grad{};
    for (int k = 0; k < 5; ++k) {
      grad[k] = (w.w[k] - stepped.w[k]) / tiny_cfg.learning_rate;
    }

    const double h = 1e-4;
    for (int k = 0; k < 5; ++k) {
      ArfWeights up = w, down = w;
      up.w[k] += h;
      down.w[k] -= h;
      const double fd = (arf_batch_loss(up, batch, tau, cfg) -
                         arf_batch_loss(down, batch, tau, cfg)) /
                        (2.0 * h);
      const double denom = std::max({std::abs(fd), std::abs(grad[k]), 1e-3});
      CHECK(std::abs(fd - grad[k]) / denom <= 1e-6);
    }
  }
}

TEST_CASE("cross-entropy pushes a useful weight up") {
  ArfWeights w;
  w.w = {0.2, 0.2, 0.2, 0.2, 0.2};
  ArfExample ex;
  ex.feats = feats(0, 0, 1, 0, 0);  // only the third detector fires
  ex.is_true_label = true;
  ex.label = 1.0;
  ArfConfig cfg;
  const double before = w.w[2];
  arf_update(w, {ex}, 0.0, cfg);
  CHECK(w.w[2] > before);
  CHECK(w.w[0] == doctest::Approx(0.2));  // zero feature, zero gradient
}

TEST_CASE("weights stay inside the box after arbitrary update sequences") {
  Rng rng(17);
  ArfWeights w;
  ArfConfig cfg;
  cfg.learning_rate = 0.5;  // aggressive steps to stress the projection
  for (int round = 0; round < 300; ++round) {
    std::vector<ArfExample> batch;
    for (int i = 0; i < 4; ++i) {
      ArfExample ex;
      ex.feats = feats(rng.uniform() < 0.5, rng.uniform() < 0.5, rng.uniform() < 0.5,
                       rng.uniform(0, 10), rng.uniform());
      ex.is_true_label = rng.uniform() < 0.5;
      ex.label = ex.is_true_label ? (rng.uniform() < 0.5 ? 1.0 : 0.0)
                                  : (rng.uniform() < 0.5 ? 1.0 : -1.0);
      batch.push_back(ex);
    }
    arf_update(w, batch, rng.uniform(0, 3), cfg);
    for (double x : w.w) {
      CHECK(x >= 0.0);
      CHECK(x <= cfg.w_max);
    }
  }
  CHECK(w.update_count == 300);
}

TEST_CASE("replaying a stream reproduces the weights bit for bit") {
  Rng rng(19);
  std::vector<ArfExample> stream;
  for (int i = 0; i < 500; ++i) {
    ArfExample ex;
    ex.feats = feats(rng.uniform() < 0.3, rng.uniform() < 0.3, rng.uniform() < 0.3,
                     rng.uniform(0, 6), rng.uniform());
    ex.is_true_label = rng.uniform() < 0.5;
    ex.label = ex.is_true_label ? (rng.uniform() < 0.5 ? 1.0 : 0.0)
                                : (rng.uniform() < 0.5 ? 1.0 : -1.0);
    stream.push_back(ex);
  }
  ArfConfig cfg;
  const auto run = [&] {
    ArfWeights w = arf_init_weights(ArfContext{});
    ArfPercentileTracker tracker;
    for (std::size_t i = 0; i < stream.size(); i += cfg.batch_size) {
      const std::size_t end = std::min(i + cfg.batch_size, stream.size());
      std::vector<ArfExample> batch(stream.begin() + i, stream.begin() + end);
      for (const auto& ex : batch) tracker.push(arf_score(w, ex.feats));
      arf_update(w, batch, tracker.warm() ? tracker.percentile95() : 0.0, cfg);
    }
    return w;
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.w == b.w);
  CHECK(a.update_count == b.update_count);
}

TEST_CASE("the percentile tracker slides and matches the sort oracle") {
  ArfPercentileTracker tracker(100);
  Rng rng(23);
  std::vector<double> window;
  for (int i = 0; i < 350; ++i) {
    const double v = rng.uniform(0, 100);
    tracker.push(v);
    window.push_back(v);
    if (window.size() > 100) window.erase(window.begin());
    if (tracker.warm()) {
      CHECK(tracker.percentile95() == nearest_rank_quantile(window, 0.95));
    }
  }
  CHECK(tracker.size() == 100);

  ArfPercentileTracker cold(1000);
  for (int i = 0; i < 99; ++i) cold.push(1.0);
  CHECK(!cold.warm());
  cold.push(1.0);
  CHECK(cold.warm());
}

TEST_CASE("high-risk rule: percentile clause, two detectors, spend-plus-speed") {
  ArfPercentileTracker tracker;
  for (int i = 1; i <= 200; ++i) tracker.push(static_cast<double>(i) / 100.0);

  // two detector flags alone are enough
  CHECK(arf_high_risk_rule(0.0, feats(1, 0, 1, 0, 0), 1e6, tracker));
  CHECK(!arf_high_risk_rule(0.0, feats(1, 0, 0, 0, 0), 1e6, tracker));

  // large deviation plus a sub-minute gap, regardless of the score
  CHECK(arf_high_risk_rule(0.0, feats(0, 0, 0, 3.2, 1), 30.0, tracker));
  CHECK(!arf_high_risk_rule(0.0, feats(0, 0, 0, 3.2, 1), 90.0, tracker));

  // the score clause kicks in above the tracked percentile
  const double p95 = tracker.percentile95();
  CHECK(arf_high_risk_rule(p95 + 0.01, feats(0, 0, 0, 0, 0), 1e6, tracker));
  CHECK(!arf_high_risk_rule(p95 - 0.01, feats(0, 0, 0, 0, 0), 1e6, tracker));

  // a cold tracker disables only the percentile clause
  ArfPercentileTracker cold;
  CHECK(!arf_high_risk_rule(1e9, feats(0, 0, 0, 0, 0), 1e6, cold));
  CHECK(arf_high_risk_rule(0.0, feats(1, 1, 0, 0, 0), 1e6, cold));
}
