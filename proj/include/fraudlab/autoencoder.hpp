#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fraudlab/common.hpp"

namespace fraudlab {

enum class Activation { Tanh, Relu };

// 4-8-4-8-4 mirrored MLP, tanh hidden layers, identity output. Parameters
// are stored flat (W0,b0,W1,b1,...) so finite-difference checks stay simple.
struct MlpParams {
  std::vector<std::size_t> dims{4, 8, 4, 8, 4};
  std::vector<double> flat;
  Activation activation = Activation::Tanh;

  std::size_t param_count() const;
  // offset of W[l] (row-major out x in); biases follow the weights
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
};

struct TrainConfig {
  std::size_t max_epochs = 100;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double validation_fraction = 0.1;
  std::size_t patience = 10;          // early-stop epochs
  std::size_t lr_patience = 5;        // epochs before halving
  double lr_floor = 1e-5;
  std::uint64_t seed = 0;
  Activation activation = Activation::Tanh;
  std::size_t bottleneck = 4;  // optionally narrowed to 2 for experiments
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> learning_rate;
  std::size_t stopped_epoch = 0;
};

struct AutoencoderModel {
  MlpParams params;
  double threshold = 0.0;  // 99th-percentile training reconstruction error
  std::string standardization_ref;
};

// Xavier-uniform init seeded per layer index.
MlpParams mlp_init(std::uint64_t seed, Activation activation = Activation::Tanh,
                   std::size_t bottleneck = 4);

void mlp_forward(const MlpParams& p, std::span<const double> x, std::span<double> out);

// Mean MSE over the batch; writes the analytic gradient of that loss into
// `grad` (same layout as params.flat). Batch is row-major n x 4.
double mlp_loss_and_grad(const MlpParams& p, const Dataset& batch,
                         std::span<double> grad);

std::pair<AutoencoderModel, TrainHistory> autoencoder_train(const Dataset& matrix,
                                                            const TrainConfig& cfg = {});

// mean over output dims of squared input/output difference
double reconstruction_error(const AutoencoderModel& model, std::span<const double> x);

std::vector<double> reconstruction_error_all(const AutoencoderModel& model,
                                             const Dataset& matrix);

// flag = error > threshold
std::vector<bool> autoencoder_flag(const AutoencoderModel& model,
                                   const std::vector<double>& errors);

void write_history_csv(const std::string& path, const TrainHistory& history);

}  // namespace fraudlab
