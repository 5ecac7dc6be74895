#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraudlab/arf.hpp"
#include "fraudlab/autoencoder.hpp"
#include "fraudlab/iforest.hpp"
#include "fraudlab/ocsvm.hpp"
#include "fraudlab/synthgen.hpp"

namespace fraudlab {

// Flat sectioned key=value configuration for the pipeline. Unknown sections
// or keys are rejected so typos fail loudly.
struct PipelineConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  std::string data_dir;  // empty: generate a synthetic corpus instead

  // [gen]
  std::size_t gen_n_transactions = 50'000;
  std::size_t gen_n_cards = 0;
  std::size_t gen_n_merchants = 0;
  double gen_anomaly_rate = 0.015;

  // [ingest]
  double cap_quantile = 0.999;
  bool cap_enabled = true;

  // [iforest]
  std::size_t if_n_trees = 100;
  double if_contamination = 0.01;
  std::size_t if_subsample = 256;

  // [ocsvm]
  double ocsvm_nu = 0.01;
  double ocsvm_gamma = 0.1;
  double ocsvm_tol = 1e-3;
  std::size_t ocsvm_subsample_cap = 10'000;

  // [autoencoder]
  std::size_t ae_max_epochs = 100;
  std::size_t ae_batch_size = 256;
  double ae_learning_rate = 1e-3;
  std::size_t ae_patience = 10;
  std::size_t ae_bottleneck = 4;

  // [cluster]
  std::size_t kmeans_k = 3;
  std::size_t kmeans_n_init = 10;
  std::size_t elbow_k_max = 10;
  double dbscan_eps = 0.25;
  std::size_t dbscan_min_samples = 5;

  // [risk]
  double weight_amount = 0.05;
  double weight_unusual = 0.84;
  double weight_sequence = 0.76;
  double weight_rapid = 0.53;

  // [arf]
  double arf_learning_rate = 0.01;
  double arf_margin = 1.0;
  std::size_t arf_batch_size = 32;
  double arf_w_max = 5.0;
  std::size_t arf_tau_window = 10'000;
  double arf_prior = 0.005;
  double arf_volatility = 0.0;
  double arf_legal_weight = 0.0;

  // [sweep]
  std::vector<double> sweep_contamination;

  GenConfig gen_config() const;
  IsolationForestConfig iforest_config() const;
  OcsvmConfig ocsvm_config() const;
  TrainConfig autoencoder_config() const;
  ArfConfig arf_config() const;
  ArfContext arf_context() const;

  std::string to_ini() const;
};

// throws std::runtime_error with line number on malformed input, unknown
// section or unknown key
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

// FRAUDLAB_OUT, when set, overrides cfg.out_dir and any --out flag
std::string resolve_out_dir(const std::string& configured);

}  // namespace fraudlab
