#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fluxrnn {

enum class CellType : std::uint8_t { kRNN = 0, kGRU = 1, kLSTM = 2 };

std::string_view cell_name(CellType cell);
std::optional<CellType> parse_cell(std::string_view name);
// Gate blocks per cell: 1 (RNN), 3 (GRU: update, reset, candidate),
// 4 (LSTM: input, forget, candidate, output).
std::size_t gate_count(CellType cell);

inline constexpr std::size_t kMaxLayers = 5;
inline constexpr std::size_t kMaxUnits = 512;
inline constexpr double kDefaultDropout = 0.2;

struct LayerParams {
  std::size_t units = 0;
  std::size_t fan_in = 0;
  std::vector<double> input_weights;      // (gates * units) x fan_in, row-major
  std::vector<double> recurrent_weights;  // (gates * units) x units, row-major
  std::vector<double> biases;             // gates * units

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct NetworkParams {
  CellType cell = CellType::kLSTM;
  std::vector<LayerParams> layers;
  std::vector<double> head_weights;  // last layer units
  double head_bias = 0.0;
  double dropout_rate = kDefaultDropout;

  std::size_t n_features() const { return layers.empty() ? 0 : layers.front().fan_in; }
  std::vector<std::size_t> layer_sizes() const;
  std::size_t parameter_count() const;

  // Every trainable array in a fixed order: per layer (input, recurrent,
  // bias), then head weights, then the head bias as a one-element span.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;

  // Same shape, all parameters zero.
  NetworkParams zeros_like() const;

  // Throws InvalidArchitecture on inconsistent shapes or non-finite values.
  void validate() const;

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

enum class InitScheme {
  kSqrtFeatures,     // U[-sqrt(n), sqrt(n)], n = input feature count
  kInvSqrtFeatures,  // U[-1/sqrt(n), 1/sqrt(n)]
};

// Samples every weight and bias i.i.d. uniform within the scheme's bound.
// Deterministic given the seed. Throws InvalidArchitecture.
NetworkParams init_params(CellType cell, std::span<const std::size_t> layer_sizes,
                          std::size_t n_features, std::uint64_t seed,
                          double dropout_rate = kDefaultDropout,
                          InitScheme scheme = InitScheme::kSqrtFeatures);

enum class ForwardMode { kTrain, kEval };

struct LayerCache {
  std::vector<double> inputs;  // steps x fan_in, as fed to the layer
  std::vector<double> hidden;  // (steps + 1) x units, row 0 is the zero state
  std::vector<double> cell;    // LSTM only: (steps + 1) x units
  std::vector<double> gates;   // steps x (gates * units), post-activation
  std::vector<double> output_mask;  // steps x units inverted-dropout factors; empty if none
};

struct ForwardCache {
  CellType cell = CellType::kLSTM;
  std::size_t steps = 0;
  std::vector<std::size_t> layer_sizes;
  std::vector<LayerCache> layers;
  std::vector<double> head_input;  // last hidden state after dropout
  std::vector<double> head_mask;   // empty if none
};

struct ForwardResult {
  double prediction = 0.0;
  std::optional<ForwardCache> cache;  // present in train mode only
};

// Sequence-to-one forward pass over `input` (steps x n_features, row-major,
// oldest step first). Initial states are zero. In train mode inverted dropout
// is applied to each layer's output sequence feeding the next layer and to the
// head input, with masks drawn from `rng_seed`. Throws ShapeMismatch or
// NonFiniteActivation.
ForwardResult forward(const NetworkParams& params, std::span<const double> input,
                      ForwardMode mode, std::uint64_t rng_seed = 0);

// Eval-mode prediction.
double predict(const NetworkParams& params, std::span<const double> input);

// Gradient of d_prediction * prediction with respect to every parameter,
// using the dropout masks stored in the cache. Throws CacheMismatch.
NetworkParams backward(const NetworkParams& params, const ForwardCache& cache,
                       double d_prediction);

}  // namespace fluxrnn
