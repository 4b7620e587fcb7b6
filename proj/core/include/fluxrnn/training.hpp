#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fluxrnn/recurrent.hpp"
#include "fluxrnn/timeseries.hpp"

namespace fluxrnn {

struct LossResult {
  double loss = 0.0;
  std::vector<double> d_preds;
};

// Mean absolute error and its (sub)gradient sign(p - t) / N with sign(0) = 0.
// Throws LengthMismatch or EmptyBatch.
LossResult mae_loss(std::span<const double> preds, std::span<const double> targets);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moments mirror the parameter tensors.
struct AdamState {
  NetworkParams m;
  NetworkParams v;
  std::uint64_t step = 0;

  static AdamState for_params(const NetworkParams& params);
};

// One bias-corrected Adam update in place. Throws ShapeMismatch.
void adam_step(AdamState& state, NetworkParams& params, const NetworkParams& grads, double lr,
               const AdamConfig& config = {});

// Which held-out set selects the best checkpoint.
enum class Selection {
  kTest,        // score on the test set after every epoch
  kValidation,  // hold out the latest fraction of training samples instead
};

struct TrainConfig {
  std::size_t epochs = 300;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  AdamConfig adam;
  std::uint64_t shuffle_seed = 0;
  Selection selection = Selection::kTest;
  double validation_fraction = 0.2;
};

struct Checkpoint {
  NetworkParams params;
  std::size_t epoch = 0;
  double monitored_score = 0.0;
  std::string config_snapshot;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;    // mean mini-batch MAE in train mode
  double monitored_nrmse = 0.0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
  std::vector<std::size_t> improvements;  // epochs at which the checkpoint was replaced
  NetworkParams final_params;
};

// Gradient of the batch MAE, summed in sample order.
struct BatchGradient {
  double loss = 0.0;
  NetworkParams grads;
};
BatchGradient batch_gradient(const NetworkParams& params, const WindowedDataset& data,
                             std::span<const std::size_t> batch, std::uint64_t dropout_seed);

// Mini-batch MAE training with Adam. After every epoch the monitored set is
// scored in eval mode; the checkpoint is replaced only on strict improvement.
TrainResult train(const NetworkParams& init, const WindowedDataset& train_set,
                  const WindowedDataset& test_set, const TrainConfig& config);

// Eval-mode MAE over a whole dataset.
double dataset_mae(const NetworkParams& params, const WindowedDataset& data);

}  // namespace fluxrnn
