#include "fraudlab/autoencoder.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace fraudlab {

std::size_t MlpParams::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    n += dims[l + 1] * dims[l] + dims[l + 1];
  }
  return n;
}

std::size_t MlpParams::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += dims[l + 1] * dims[l] + dims[l + 1];
  return off;
}

std::size_t MlpParams::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + dims[layer + 1] * dims[layer];
}

MlpParams mlp_init(std::uint64_t seed, Activation activation, std::size_t bottleneck) {
  MlpParams p;
  p.activation = activation;
  p.dims = {4, 8, bottleneck, 8, 4};
  p.flat.assign(p.param_count(), 0.0);
  Rng base(seed);
  for (std::size_t l = 0; l + 1 < p.dims.size(); ++l) {
    Rng rng = base.fork(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(p.dims[l] + p.dims[l + 1]));
    double* w = p.flat.data() + p.weight_offset(l);
    for (std::size_t i = 0; i < p.dims[l + 1] * p.dims[l]; ++i) {
      w[i] = rng.uniform(-limit, limit);
    }
    // biases start at zero
  }
  return p;
}

namespace {

inline double act(double x, Activation a) {
  return a == Activation::Tanh ? std::tanh(x) : (x > 0.0 ? x : 0.0);
}
inline double act_grad(double y_pre, double y_post, Activation a) {
  return a == Activation::Tanh ? 1.0 - y_post * y_post : (y_pre > 0.0 ? 1.0 : 0.0);
}

struct Workspace {
  // per-layer pre- and post-activation values for one sample
  std::vector<std::vector<double>> pre, post;
  explicit Workspace(const std::vector<std::size_t>& dims) {
    pre.resize(dims.size());
    post.resize(dims.size());
    for (std::size_t l = 0; l < dims.size(); ++l) {
      pre[l].resize(dims[l]);
      post[l].resize(dims[l]);
    }
  }
};

void forward_into(const MlpParams& p, std::span<const double> x, Workspace& ws) {
  const std::size_t layers = p.dims.size() - 1;
  std::copy(x.begin(), x.end(), ws.post[0].begin());
  for (std::size_t l = 0; l < layers; ++l) {
    const double* w = p.flat.data() + p.weight_offset(l);
    const double* b = p.flat.data() + p.bias_offset(l);
    const std::size_t in = p.dims[l], out = p.dims[l + 1];
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += wr[i] * ws.post[l][i];
      ws.pre[l + 1][o] = s;
      // identity on the output layer
      ws.post[l + 1][o] = l + 1 == layers ? s : act(s, p.activation);
    }
  }
}

}  // namespace

void mlp_forward(const MlpParams& p, std::span<const double> x, std::span<double> out) {
  Workspace ws(p.dims);
  forward_into(p, x, ws);
  std::copy(ws.post.back().begin(), ws.post.back().end(), out.begin());
}

double mlp_loss_and_grad(const MlpParams& p, const Dataset& batch, std::span<double> grad) {
  const std::size_t layers = p.dims.size() - 1;
  const std::size_t out_dim = p.dims.back();
  std::fill(grad.begin(), grad.end(), 0.0);
  Workspace ws(p.dims);
  std::vector<std::vector<double>> delta(p.dims.size());
  for (std::size_t l = 0; l < p.dims.size(); ++l) delta[l].resize(p.dims[l]);

  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.rows);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const auto x = batch.row(r);
    forward_into(p, x, ws);
    // loss = mean over samples of mean over dims of squared error
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double e = ws.post[layers][o] - x[o];
      loss += e * e / static_cast<double>(out_dim) * inv_n;
      delta[layers][o] = 2.0 * e / static_cast<double>(out_dim) * inv_n;
    }
    for (std::size_t l = layers; l-- > 0;) {
      const double* w = p.flat.data() + p.weight_offset(l);
      double* gw = grad.data() + p.weight_offset(l);
      double* gb = grad.data() + p.bias_offset(l);
      const std::size_t in = p.dims[l], out = p.dims[l + 1];
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[l + 1][o];
        gb[o] += d;
        double* gwr = gw + o * in;
        for (std::size_t i = 0; i < in; ++i) gwr[i] += d * ws.post[l][i];
      }
      if (l > 0) {
        for (std::size_t i = 0; i < in; ++i) {
          double s = 0.0;
          for (std::size_t o = 0; o < out; ++o) s += w[o * in + i] * delta[l + 1][o];
          delta[l][i] = s * act_grad(ws.pre[l][i], ws.post[l][i], p.activation);
        }
      }
    }
  }
  return loss;
}

namespace {

double eval_loss(const MlpParams& p, const Dataset& data,
                 const std::vector<std::size_t>& rows) {
  Workspace ws(p.dims);
  const std::size_t layers = p.dims.size() - 1;
  double loss = 0.0;
  for (std::size_t r : rows) {
    const auto x = data.row(r);
    forward_into(p, x, ws);
    double e2 = 0.0;
    for (std::size_t o = 0; o < p.dims.back(); ++o) {
      const double e = ws.post[layers][o] - x[o];
      e2 += e * e;
    }
    loss += e2 / static_cast<double>(p.dims.back());
  }
  return loss / static_cast<double>(rows.size());
}

}  // namespace

std::pair<AutoencoderModel, TrainHistory> autoencoder_train(const Dataset& matrix,
                                                            const TrainConfig& cfg) {
  if (matrix.rows < 10) throw std::invalid_argument("autoencoder_train: need n >= 10");
  if (!(cfg.validation_fraction > 0.0) || cfg.validation_fraction >= 0.5) {
    throw std::invalid_argument("autoencoder_train: validation fraction outside (0, 0.5)");
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(matrix.rows);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.validation_fraction *
                                             static_cast<double>(matrix.rows))));
  std::vector<std::size_t> val_rows(order.end() - static_cast<std::ptrdiff_t>(n_val),
                                    order.end());
  std::vector<std::size_t> train_rows(order.begin(),
                                      order.end() - static_cast<std::ptrdiff_t>(n_val));
  if (train_rows.empty()) throw std::invalid_argument("autoencoder_train: n too small to split");

  MlpParams params = mlp_init(cfg.seed, cfg.activation, cfg.bottleneck);
  const std::size_t np = params.param_count();
  std::vector<double> m(np, 0.0), v(np, 0.0), grad(np);

  TrainHistory history;
  double lr = cfg.learning_rate;
  double best_val = std::numeric_limits<double>::infinity();
  MlpParams best_params = params;
  std::size_t since_best = 0, since_lr = 0, adam_t = 0;

  Dataset batch;
  batch.cols = matrix.cols;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(train_rows);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < train_rows.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, train_rows.size());
      batch.rows = end - start;
      batch.values.clear();
      for (std::size_t i = start; i < end; ++i) {
        const auto row = matrix.row(train_rows[i]);
        batch.values.insert(batch.values.end(), row.begin(), row.end());
      }
      const double loss = mlp_loss_and_grad(params, batch, grad);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("autoencoder_train: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batches));
      }
      epoch_loss += loss;
      ++batches;
      ++adam_t;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t));
      for (std::size_t i = 0; i < np; ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        params.flat[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
      }
    }

    const double val = eval_loss(params, matrix, val_rows);
    history.train_loss.push_back(epoch_loss / static_cast<double>(batches));
    history.val_loss.push_back(val);
    history.learning_rate.push_back(lr);
    history.stopped_epoch = epoch + 1;

    if (val < best_val - 1e-12) {
      best_val = val;
      best_params = params;
      since_best = 0;
      since_lr = 0;
    } else {
      ++since_best;
      ++since_lr;
      if (since_lr >= cfg.lr_patience && lr > cfg.lr_floor) {
        lr = std::max(lr * 0.5, cfg.lr_floor);
        since_lr = 0;
      }
      if (since_best >= cfg.patience) break;
    }
  }

  AutoencoderModel model;
  model.params = std::move(best_params);
  std::vector<double> errors = reconstruction_error_all(model, matrix);
  model.threshold = nearest_rank_quantile(std::move(errors), 0.99);
  return {std::move(model), std::move(history)};
}

double reconstruction_error(const AutoencoderModel& model, std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("reconstruction_error: non-finite input");
  }
  std::array<double, 4> out{};
  mlp_forward(model.params, x, out);
  double e2 = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double e = out[i] - x[i];
    e2 += e * e;
  }
  return e2 / static_cast<double>(out.size());
}

std::vector<double> reconstruction_error_all(const AutoencoderModel& model,
                                             const Dataset& matrix) {
  std::vector<double> out(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    out[i] = reconstruction_error(model, matrix.row(i));
  }
  return out;
}

std::vector<bool> autoencoder_flag(const AutoencoderModel& model,
                                   const std::vector<double>& errors) {
  std::vector<bool> out(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) out[i] = errors[i] > model.threshold;
  return out;
}

void write_history_csv(const std::string& path, const TrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "epoch,train_loss,val_loss,learning_rate\n";
  for (std::size_t i = 0; i < history.train_loss.size(); ++i) {
    char buf[96];
    char* p = buf;
    auto emit = [&](double v) {
      auto res = std::to_chars(p, buf + sizeof(buf), v);
      p = res.ptr;
    };
    out << (i + 1) << ',';
    emit(history.train_loss[i]);
    *p++ = ',';
    emit(history.val_loss[i]);
    *p++ = ',';
    emit(history.learning_rate[i]);
    out.write(buf, p - buf);
    out << '\n';
  }
}

}  // namespace fraudlab
