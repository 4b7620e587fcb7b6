#include "fluxrnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxrnn/errors.hpp"
#include "fluxrnn/evaluation.hpp"
#include "fluxrnn/rng.hpp"

namespace fluxrnn {

LossResult mae_loss(std::span<const double> preds, std::span<const double> targets) {
  if (preds.size() != targets.size()) {
    throw LengthMismatch(std::to_string(preds.size()) + " predictions for " +
                         std::to_string(targets.size()) + " targets");
  }
  if (preds.empty()) throw EmptyBatch();
  const double n = static_cast<double>(preds.size());
  LossResult out{0.0, std::vector<double>(preds.size())};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double e = preds[i] - targets[i];
    out.loss += std::abs(e);
    out.d_preds[i] = (e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)) / n;
  }
  out.loss /= n;
  return out;
}

AdamState AdamState::for_params(const NetworkParams& params) {
  return AdamState{params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(AdamState& state, NetworkParams& params, const NetworkParams& grads, double lr,
               const AdamConfig& config) {
  auto theta = params.tensors();
  const auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  if (g.size() != theta.size() || m.size() != theta.size() || v.size() != theta.size()) {
    throw ShapeMismatch("Adam state, gradients and parameters differ in layout");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (g[k].size() != theta[k].size() || m[k].size() != theta[k].size() ||
        v[k].size() != theta[k].size()) {
      throw ShapeMismatch("tensor " + std::to_string(k) + " differs in size");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    for (std::size_t i = 0; i < theta[k].size(); ++i) {
      const double gi = g[k][i];
      m[k][i] = config.beta1 * m[k][i] + (1.0 - config.beta1) * gi;
      v[k][i] = config.beta2 * v[k][i] + (1.0 - config.beta2) * gi * gi;
      const double m_hat = m[k][i] / correction1;
      const double v_hat = v[k][i] / correction2;
      theta[k][i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

BatchGradient batch_gradient(const NetworkParams& params, const WindowedDataset& data,
                             std::span<const std::size_t> batch, std::uint64_t dropout_seed) {
  if (batch.empty()) throw EmptyBatch();
  std::vector<ForwardCache> caches;
  std::vector<double> preds;
  std::vector<double> targets;
  caches.reserve(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto& s = data.samples[batch[j]];
    auto fr = forward(params, s.input, ForwardMode::kTrain, derive_seed(dropout_seed, j));
    preds.push_back(fr.prediction);
    targets.push_back(s.target);
    caches.push_back(std::move(*fr.cache));
  }
  const auto loss = mae_loss(preds, targets);

  BatchGradient out{loss.loss, params.zeros_like()};
  auto acc = out.grads.tensors();
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (loss.d_preds[j] == 0.0) continue;
    const NetworkParams g = backward(params, caches[j], loss.d_preds[j]);
    const auto gt = g.tensors();
    for (std::size_t k = 0; k < acc.size(); ++k) {
      for (std::size_t i = 0; i < acc[k].size(); ++i) acc[k][i] += gt[k][i];
    }
  }
  return out;
}

double dataset_mae(const NetworkParams& params, const WindowedDataset& data) {
  const auto preds = predict_dataset(params, data);
  return mae_loss(preds, data.targets()).loss;
}

namespace {

WindowedDataset subset(const WindowedDataset& data, std::span<const std::size_t> idx) {
  WindowedDataset out;
  out.length = data.length;
  out.n_features = data.n_features;
  out.feature_names = data.feature_names;
  for (std::size_t i : idx) out.samples.push_back(data.samples[i]);
  return out;
}

}  // namespace

TrainResult train(const NetworkParams& init, const WindowedDataset& train_set,
                  const WindowedDataset& test_set, const TrainConfig& config) {
  if (train_set.empty()) throw PreconditionViolation("training set is empty");
  if (config.batch_size == 0) throw PreconditionViolation("batch size must be >= 1");
  init.validate();

  WindowedDataset fit = train_set;
  WindowedDataset monitor = test_set;
  if (config.selection == Selection::kValidation) {
    if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
      throw PreconditionViolation("validation fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return train_set.samples[a].target_date < train_set.samples[b].target_date;
    });
    const auto n_val = static_cast<std::size_t>(
        std::ceil(config.validation_fraction * static_cast<double>(order.size())));
    if (n_val < 2 || n_val >= order.size()) {
      throw PreconditionViolation("validation split leaves too few samples");
    }
    const std::size_t cut = order.size() - n_val;
    std::vector<std::size_t> fit_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
    std::sort(fit_idx.begin(), fit_idx.end());
    fit = subset(train_set, fit_idx);
    monitor = subset(train_set, std::span(order).subspan(cut));
  }
  if (monitor.empty()) throw PreconditionViolation("monitored set is empty");
  const auto monitor_obs = monitor.targets();

  TrainResult result;
  NetworkParams params = init;
  AdamState adam = AdamState::for_params(params);

  result.best = Checkpoint{params, 0, nrmse(predict_dataset(params, monitor), monitor_obs), {}};
  result.history.push_back({0, dataset_mae(params, fit), result.best.monitored_score});

  Rng shuffler(config.shuffle_seed);
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffler.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const auto batch = std::span<const std::size_t>(order).subspan(start, stop - start);
      const auto bg = batch_gradient(params, fit, batch,
                                     derive_seed(config.shuffle_seed, epoch, start));
      adam_step(adam, params, bg.grads, config.learning_rate, config.adam);
      loss_sum += bg.loss;
      ++batches;
    }
    const double score = nrmse(predict_dataset(params, monitor), monitor_obs);
    result.history.push_back({epoch, loss_sum / static_cast<double>(batches), score});
    if (score < result.best.monitored_score) {
      result.best.params = params;
      result.best.epoch = epoch;
      result.best.monitored_score = score;
      result.improvements.push_back(epoch);
    }
  }
  result.final_params = std::move(params);
  return result;
}

}  // namespace fluxrnn
