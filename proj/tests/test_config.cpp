#include <doctest.h>

#include <cstdlib>

#include "fraudlab/config.hpp"

using namespace fraudlab;

TEST_CASE("defaults survive an ini round trip") {
  PipelineConfig def;
  const PipelineConfig back = parse_config(def.to_ini());
  CHECK(back.seed == def.seed);
  CHECK(back.gen_n_transactions == def.gen_n_transactions);
  CHECK(back.gen_anomaly_rate == def.gen_anomaly_rate);
  CHECK(back.cap_quantile == def.cap_quantile);
  CHECK(back.if_n_trees == def.if_n_trees);
  CHECK(back.if_contamination == def.if_contamination);
  CHECK(back.ocsvm_nu == def.ocsvm_nu);
  CHECK(back.ocsvm_gamma == def.ocsvm_gamma);
  CHECK(back.ae_max_epochs == def.ae_max_epochs);
  CHECK(back.kmeans_k == def.kmeans_k);
  CHECK(back.dbscan_eps == def.dbscan_eps);
  CHECK(back.weight_unusual == def.weight_unusual);
  CHECK(back.arf_learning_rate == def.arf_learning_rate);
}

TEST_CASE("sections map onto pipeline fields") {
  const auto cfg = parse_config(
      "[pipeline]\n"
      "seed = 7\n"
      "out_dir = somewhere\n"
      "[gen]\n"
      "n_transactions = 1234\n"
      "anomaly_rate = 0.02\n"
      "[iforest]\n"
      "n_trees = 50\n"
      "contamination = 0.02\n"
      "[ocsvm]\n"
      "nu = 0.05\n"
      "gamma = 1.0\n"
      "[cluster]\n"
      "kmeans_k = 4\n"
      "[sweep]\n"
      "contamination = 0.005, 0.01, 0.02\n");
  CHECK(cfg.seed == 7);
  CHECK(cfg.out_dir == "somewhere");
  CHECK(cfg.gen_n_transactions == 1234);
  CHECK(cfg.gen_anomaly_rate == 0.02);
  CHECK(cfg.if_n_trees == 50);
  CHECK(cfg.if_contamination == 0.02);
  CHECK(cfg.ocsvm_nu == 0.05);
  CHECK(cfg.ocsvm_gamma == 1.0);
  CHECK(cfg.kmeans_k == 4);
  REQUIRE(cfg.sweep_contamination.size() == 3);
  CHECK(cfg.sweep_contamination[1] == 0.01);
}

TEST_CASE("unknown keys and sections fail loudly with a line number") {
  CHECK_THROWS_WITH_AS(parse_config("[pipeline]\ntypo_key = 3\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("[not_a_section]\nseed = 1\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("[gen]\nn_transactions = not_a_number\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_config("no equals sign here\n"), std::runtime_error);
}

TEST_CASE("derived module configs carry the right fields") {
  PipelineConfig cfg;
  cfg.seed = 99;
  cfg.if_contamination = 0.02;
  cfg.ocsvm_gamma = 1.0;
  cfg.ae_bottleneck = 2;
  CHECK(cfg.gen_config().seed == 99);
  CHECK(cfg.gen_config().n_transactions == cfg.gen_n_transactions);
  CHECK(cfg.iforest_config().seed == 99);
  CHECK(cfg.iforest_config().contamination == 0.02);
  CHECK(cfg.ocsvm_config().gamma == 1.0);
  CHECK(cfg.ocsvm_config().seed == 99);
  CHECK(cfg.autoencoder_config().bottleneck == 2);
  CHECK(cfg.autoencoder_config().seed == 99);
  CHECK(cfg.arf_config().learning_rate == cfg.arf_learning_rate);
}

TEST_CASE("environment variable overrides the configured output dir") {
  unsetenv("FRAUDLAB_OUT");
  CHECK(resolve_out_dir("configured") == "configured");
  setenv("FRAUDLAB_OUT", "/tmp/env-out", 1);
  CHECK(resolve_out_dir("configured") == "/tmp/env-out");
  unsetenv("FRAUDLAB_OUT");
  CHECK(resolve_out_dir("configured") == "configured");
}
