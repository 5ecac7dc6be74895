#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "fraudlab/common.hpp"
#include "fraudlab/persist.hpp"

using namespace fraudlab;

namespace {

Dataset random_matrix(std::size_t n, std::uint64_t seed) {
  Dataset d;
  d.rows = n;
  d.cols = 4;
  d.values.resize(n * 4);
  Rng rng(seed);
  for (auto& v : d.values) v = rng.normal();
  return d;
}

}  // namespace

TEST_CASE("isolation forest round trip scores identically") {
  const Dataset m = random_matrix(400, 1);
  const auto model = iforest_fit(m, {.n_trees = 20, .seed = 5});
  const auto loaded = load_iforest(save_model(model));
  CHECK(loaded.trees.size() == model.trees.size());
  CHECK(loaded.score_threshold == model.score_threshold);
  const Dataset probe = random_matrix(100, 2);
  for (std::size_t i = 0; i < probe.rows; ++i) {
    CHECK(iforest_score(loaded, probe.row(i)) == iforest_score(model, probe.row(i)));
  }
}

TEST_CASE("one-class svm round trip scores identically") {
  const Dataset m = random_matrix(300, 3);
  const auto model = ocsvm_fit(m, {.nu = 0.1, .seed = 1});
  const auto loaded = load_ocsvm(save_model(model));
  CHECK(loaded.rho == model.rho);
  CHECK(loaded.alphas == model.alphas);
  const Dataset probe = random_matrix(50, 4);
  for (std::size_t i = 0; i < probe.rows; ++i) {
    CHECK(ocsvm_decision(loaded, probe.row(i)) == ocsvm_decision(model, probe.row(i)));
  }
}

TEST_CASE("autoencoder round trip reconstructs identically") {
  AutoencoderModel model;
  model.params = mlp_init(7);
  model.threshold = 0.125;
  model.standardization_ref = "ref-1";
  const auto loaded = load_autoencoder(save_model(model));
  CHECK(loaded.threshold == model.threshold);
  CHECK(loaded.standardization_ref == model.standardization_ref);
  const Dataset probe = random_matrix(50, 8);
  for (std::size_t i = 0; i < probe.rows; ++i) {
    CHECK(reconstruction_error(loaded, probe.row(i)) ==
          reconstruction_error(model, probe.row(i)));
  }
}

TEST_CASE("k-means round trip preserves centroids bit for bit") {
  const Dataset m = random_matrix(200, 9);
  const auto model = kmeans_fit(m, 3, 2, 50, 1);
  const auto loaded = load_kmeans(save_model(model));
  CHECK(loaded.centroids.values == model.centroids.values);
  CHECK(loaded.inertia == model.inertia);
  CHECK(kmeans_assign(loaded, m) == kmeans_assign(model, m));
}

TEST_CASE("streaming weights and standardization round trip") {
  ArfWeights w;
  w.w = {0.1, 0.2, 0.30000000000000004, 1.5, 4.999};
  w.update_count = 42;
  w.context_group = "rural-x";
  const auto lw = load_arf_weights(save_model(w));
  CHECK(lw.w == w.w);
  CHECK(lw.update_count == 42);
  CHECK(lw.context_group == "rural-x");

  StandardizationParams p;
  p.mean = {1.0, -2.5, 1e-9, 3.14159265358979};
  p.std = {0.5, 2.0, 1e-12, 7.0};
  const auto lp = load_standardization(save_model(p));
  CHECK(lp.mean == p.mean);
  CHECK(lp.std == p.std);
}

TEST_CASE("tampered payloads are rejected by the checksum") {
  ArfWeights w;
  std::string text = save_model(w);
  const auto pos = text.find("0.2");
  REQUIRE(pos != std::string::npos);
  text[pos + 2] = '3';
  CHECK_THROWS_AS(load_arf_weights(text), ChecksumError);
}

TEST_CASE("future schema versions are rejected explicitly") {
  ArfWeights w;
  std::string text = save_model(w);
  const std::string needle = "\"schema_version\":" + std::to_string(kSchemaVersion);
  auto pos = text.find(needle);
  if (pos == std::string::npos) {
    // pretty-printed variant
    const std::string alt = "\"schema_version\": " + std::to_string(kSchemaVersion);
    pos = text.find(alt);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, alt.size(), "\"schema_version\": 999");
  } else {
    text.replace(pos, needle.size(), "\"schema_version\":999");
  }
  CHECK_THROWS_AS(load_arf_weights(text), VersionError);
}

TEST_CASE("loading one kind as another fails") {
  ArfWeights w;
  CHECK_THROWS_AS(load_kmeans(save_model(w)), PersistError);
}

TEST_CASE("file helpers round trip contents") {
  const std::string path = "/tmp/fraudlab_persist_test.json";
  write_file(path, "hello\nworld\n");
  CHECK(read_file(path) == "hello\nworld\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_file("/tmp/definitely_missing_fraudlab_file"), std::runtime_error);
}
