#include "fluxrnn/recurrent.hpp"

#include <algorithm>
#include <cmath>

#include "fluxrnn/errors.hpp"
#include "fluxrnn/rng.hpp"

namespace fluxrnn {

std::string_view cell_name(CellType cell) {
  switch (cell) {
    case CellType::kRNN: return "RNN";
    case CellType::kGRU: return "GRU";
    case CellType::kLSTM: return "LSTM";
  }
  return "?";
}

std::optional<CellType> parse_cell(std::string_view name) {
  for (auto c : {CellType::kRNN, CellType::kGRU, CellType::kLSTM}) {
    if (cell_name(c) == name) return c;
  }
  return std::nullopt;
}

std::size_t gate_count(CellType cell) {
  switch (cell) {
    case CellType::kRNN: return 1;
    case CellType::kGRU: return 3;
    case CellType::kLSTM: return 4;
  }
  return 0;
}

std::vector<std::size_t> NetworkParams::layer_sizes() const {
  std::vector<std::size_t> sizes;
  for (const auto& l : layers) sizes.push_back(l.units);
  return sizes;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = head_weights.size() + 1;
  for (const auto& l : layers) {
    n += l.input_weights.size() + l.recurrent_weights.size() + l.biases.size();
  }
  return n;
}

std::vector<std::span<double>> NetworkParams::tensors() {
  std::vector<std::span<double>> out;
  for (auto& l : layers) {
    out.emplace_back(l.input_weights);
    out.emplace_back(l.recurrent_weights);
    out.emplace_back(l.biases);
  }
  out.emplace_back(head_weights);
  out.emplace_back(&head_bias, 1);
  return out;
}

std::vector<std::span<const double>> NetworkParams::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers) {
    out.emplace_back(l.input_weights);
    out.emplace_back(l.recurrent_weights);
    out.emplace_back(l.biases);
  }
  out.emplace_back(head_weights);
  out.emplace_back(&head_bias, 1);
  return out;
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z = *this;
  for (auto t : z.tensors()) std::fill(t.begin(), t.end(), 0.0);
  return z;
}

void NetworkParams::validate() const {
  if (layers.empty() || layers.size() > kMaxLayers) {
    throw InvalidArchitecture("layer count must be in 1.." + std::to_string(kMaxLayers));
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw InvalidArchitecture("dropout rate must lie in [0, 1)");
  }
  const std::size_t g = gate_count(cell);
  if (g == 0) throw InvalidArchitecture("unknown cell type");
  std::size_t fan_in = layers.front().fan_in;
  if (fan_in == 0) throw InvalidArchitecture("network needs at least one input feature");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.units == 0 || l.units > kMaxUnits) {
      throw InvalidArchitecture("units per layer must be in 1.." + std::to_string(kMaxUnits));
    }
    if (l.fan_in != fan_in || l.input_weights.size() != g * l.units * l.fan_in ||
        l.recurrent_weights.size() != g * l.units * l.units || l.biases.size() != g * l.units) {
      throw InvalidArchitecture("layer " + std::to_string(i) + " has inconsistent shapes");
    }
    fan_in = l.units;
  }
  if (head_weights.size() != layers.back().units) {
    throw InvalidArchitecture("head width differs from last layer");
  }
  for (auto t : tensors()) {
    for (double v : t) {
      if (!std::isfinite(v)) throw InvalidArchitecture("non-finite parameter");
    }
  }
}

NetworkParams init_params(CellType cell, std::span<const std::size_t> layer_sizes,
                          std::size_t n_features, std::uint64_t seed, double dropout_rate,
                          InitScheme scheme) {
  if (layer_sizes.empty() || layer_sizes.size() > kMaxLayers) {
    throw InvalidArchitecture("layer count must be in 1.." + std::to_string(kMaxLayers));
  }
  if (n_features == 0) throw InvalidArchitecture("network needs at least one input feature");
  const double root = std::sqrt(static_cast<double>(n_features));
  const double bound = scheme == InitScheme::kSqrtFeatures ? root : 1.0 / root;
  const std::size_t g = gate_count(cell);

  Rng rng(seed);
  auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (double& x : v) x = rng.uniform(-bound, bound);
  };

  NetworkParams p;
  p.cell = cell;
  p.dropout_rate = dropout_rate;
  std::size_t fan_in = n_features;
  for (std::size_t units : layer_sizes) {
    if (units == 0 || units > kMaxUnits) {
      throw InvalidArchitecture("units per layer must be in 1.." + std::to_string(kMaxUnits));
    }
    LayerParams l;
    l.units = units;
    l.fan_in = fan_in;
    fill(l.input_weights, g * units * fan_in);
    fill(l.recurrent_weights, g * units * units);
    fill(l.biases, g * units);
    p.layers.push_back(std::move(l));
    fan_in = units;
  }
  fill(p.head_weights, fan_in);
  p.head_bias = rng.uniform(-bound, bound);
  p.validate();
  return p;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y[0:rows) += M x, M row-major rows x cols.
void matvec_add(const double* m, std::size_t rows, std::size_t cols, const double* x,
                double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] += s;
  }
}

// out[0:cols) += M^T v.
void matvec_t_add(const double* m, std::size_t rows, std::size_t cols, const double* v,
                  double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* row = m + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += vi * row[j];
  }
}

// G += a b^T.
void outer_add(double* g, std::size_t rows, std::size_t cols, const double* a, const double* b) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* row = g + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] += ai * b[j];
  }
}

// Runs one layer over the whole sequence, filling hidden/cell/gates.
void run_layer(CellType cell, const LayerParams& l, std::size_t steps, LayerCache& c) {
  const std::size_t h = l.units;
  const std::size_t f = l.fan_in;
  const std::size_t g = gate_count(cell);
  c.hidden.assign((steps + 1) * h, 0.0);
  c.gates.assign(steps * g * h, 0.0);
  if (cell == CellType::kLSTM) c.cell.assign((steps + 1) * h, 0.0);

  std::vector<double> pre(g * h);
  std::vector<double> reset_h(h);
  for (std::size_t t = 0; t < steps; ++t) {
    const double* x = c.inputs.data() + t * f;
    const double* h_prev = c.hidden.data() + t * h;
    double* h_next = c.hidden.data() + (t + 1) * h;
    double* gate = c.gates.data() + t * g * h;
    std::copy(l.biases.begin(), l.biases.end(), pre.begin());
    matvec_add(l.input_weights.data(), g * h, f, x, pre.data());

    switch (cell) {
      case CellType::kRNN: {
        matvec_add(l.recurrent_weights.data(), h, h, h_prev, pre.data());
        for (std::size_t u = 0; u < h; ++u) h_next[u] = gate[u] = std::tanh(pre[u]);
        break;
      }
      case CellType::kGRU: {
        // Update and reset gates see h_prev; the candidate sees reset * h_prev.
        matvec_add(l.recurrent_weights.data(), 2 * h, h, h_prev, pre.data());
        for (std::size_t u = 0; u < 2 * h; ++u) gate[u] = sigmoid(pre[u]);
        const double* z = gate;
        const double* r = gate + h;
        for (std::size_t u = 0; u < h; ++u) reset_h[u] = r[u] * h_prev[u];
        matvec_add(l.recurrent_weights.data() + 2 * h * h, h, h, reset_h.data(),
                   pre.data() + 2 * h);
        double* n = gate + 2 * h;
        for (std::size_t u = 0; u < h; ++u) {
          n[u] = std::tanh(pre[2 * h + u]);
          h_next[u] = (1.0 - z[u]) * h_prev[u] + z[u] * n[u];
        }
        break;
      }
      case CellType::kLSTM: {
        matvec_add(l.recurrent_weights.data(), 4 * h, h, h_prev, pre.data());
        const double* c_prev = c.cell.data() + t * h;
        double* c_next = c.cell.data() + (t + 1) * h;
        for (std::size_t u = 0; u < h; ++u) {
          const double ig = gate[u] = sigmoid(pre[u]);
          const double fg = gate[h + u] = sigmoid(pre[h + u]);
          const double cg = gate[2 * h + u] = std::tanh(pre[2 * h + u]);
          const double og = gate[3 * h + u] = sigmoid(pre[3 * h + u]);
          c_next[u] = fg * c_prev[u] + ig * cg;
          h_next[u] = og * std::tanh(c_next[u]);
        }
        break;
      }
    }
  }
}

}  // namespace

ForwardResult forward(const NetworkParams& params, std::span<const double> input,
                      ForwardMode mode, std::uint64_t rng_seed) {
  const std::size_t nf = params.n_features();
  if (nf == 0 || params.layers.empty()) throw ShapeMismatch("network has no layers");
  if (input.empty() || input.size() % nf != 0) {
    throw ShapeMismatch("input of " + std::to_string(input.size()) + " values for " +
                        std::to_string(nf) + " features");
  }
  for (double v : input) {
    if (!std::isfinite(v)) throw ShapeMismatch("input contains non-finite values");
  }
  const std::size_t steps = input.size() / nf;
  const bool dropout = mode == ForwardMode::kTrain && params.dropout_rate > 0.0;
  const double keep_scale = 1.0 / (1.0 - params.dropout_rate);
  Rng rng(rng_seed);
  auto draw_mask = [&](std::size_t n) {
    std::vector<double> mask(n);
    for (double& m : mask) m = rng.uniform() >= params.dropout_rate ? keep_scale : 0.0;
    return mask;
  };

  ForwardCache cache;
  cache.cell = params.cell;
  cache.steps = steps;
  cache.layer_sizes = params.layer_sizes();
  cache.layers.resize(params.layers.size());
  cache.layers.front().inputs.assign(input.begin(), input.end());

  for (std::size_t li = 0; li < params.layers.size(); ++li) {
    const auto& layer = params.layers[li];
    auto& lc = cache.layers[li];
    run_layer(params.cell, layer, steps, lc);
    if (li + 1 == params.layers.size()) break;
    // Output sequence (h_1..h_T) feeds the next layer.
    auto& next = cache.layers[li + 1].inputs;
    next.assign(lc.hidden.begin() + static_cast<std::ptrdiff_t>(layer.units), lc.hidden.end());
    if (dropout) {
      lc.output_mask = draw_mask(steps * layer.units);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] *= lc.output_mask[i];
    }
  }

  const auto& last = cache.layers.back();
  const std::size_t units = params.layers.back().units;
  cache.head_input.assign(last.hidden.end() - static_cast<std::ptrdiff_t>(units),
                          last.hidden.end());
  if (dropout) {
    cache.head_mask = draw_mask(units);
    for (std::size_t u = 0; u < units; ++u) cache.head_input[u] *= cache.head_mask[u];
  }
  double y = params.head_bias;
  for (std::size_t u = 0; u < units; ++u) y += params.head_weights[u] * cache.head_input[u];
  if (!std::isfinite(y)) throw NonFiniteActivation("prediction is not finite");

  ForwardResult result{y, std::nullopt};
  if (mode == ForwardMode::kTrain) result.cache = std::move(cache);
  return result;
}

double predict(const NetworkParams& params, std::span<const double> input) {
  return forward(params, input, ForwardMode::kEval).prediction;
}

NetworkParams backward(const NetworkParams& params, const ForwardCache& cache,
                       double d_prediction) {
  if (cache.cell != params.cell || cache.layer_sizes != params.layer_sizes() ||
      cache.layers.size() != params.layers.size() ||
      cache.head_input.size() != params.head_weights.size()) {
    throw CacheMismatch("cache was produced by a different architecture");
  }
  const std::size_t steps = cache.steps;
  NetworkParams grad = params.zeros_like();

  grad.head_bias = d_prediction;
  const std::size_t top_units = params.layers.back().units;
  for (std::size_t u = 0; u < top_units; ++u) {
    grad.head_weights[u] = d_prediction * cache.head_input[u];
  }

  // Gradient w.r.t. the current layer's hidden outputs h_1..h_T.
  std::vector<double> d_out(steps * top_units, 0.0);
  for (std::size_t u = 0; u < top_units; ++u) {
    double d = d_prediction * params.head_weights[u];
    if (!cache.head_mask.empty()) d *= cache.head_mask[u];
    d_out[(steps - 1) * top_units + u] = d;
  }

  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const auto& l = params.layers[li];
    const auto& lc = cache.layers[li];
    auto& gl = grad.layers[li];
    const std::size_t h = l.units;
    const std::size_t f = l.fan_in;
    const std::size_t g = gate_count(params.cell);
    if (lc.hidden.size() != (steps + 1) * h || lc.inputs.size() != steps * f) {
      throw CacheMismatch("layer " + std::to_string(li) + " cache has wrong size");
    }

    std::vector<double> d_in(steps * f, 0.0);
    std::vector<double> dh_next(h, 0.0);
    std::vector<double> dc_next(h, 0.0);
    std::vector<double> da(g * h);
    std::vector<double> dh(h);
    std::vector<double> reset_h(h);
    std::vector<double> d_reset_h(h);

    for (std::size_t t = steps; t-- > 0;) {
      const double* x = lc.inputs.data() + t * f;
      const double* h_prev = lc.hidden.data() + t * h;
      const double* h_cur = lc.hidden.data() + (t + 1) * h;
      const double* gate = lc.gates.data() + t * g * h;
      for (std::size_t u = 0; u < h; ++u) dh[u] = d_out[t * h + u] + dh_next[u];
      std::fill(dh_next.begin(), dh_next.end(), 0.0);

      switch (params.cell) {
        case CellType::kRNN: {
          for (std::size_t u = 0; u < h; ++u) da[u] = dh[u] * (1.0 - h_cur[u] * h_cur[u]);
          outer_add(gl.recurrent_weights.data(), h, h, da.data(), h_prev);
          matvec_t_add(l.recurrent_weights.data(), h, h, da.data(), dh_next.data());
          break;
        }
        case CellType::kGRU: {
          const double* z = gate;
          const double* r = gate + h;
          const double* n = gate + 2 * h;
          double* da_z = da.data();
          double* da_r = da.data() + h;
          double* da_n = da.data() + 2 * h;
          for (std::size_t u = 0; u < h; ++u) {
            dh_next[u] = dh[u] * (1.0 - z[u]);
            da_n[u] = dh[u] * z[u] * (1.0 - n[u] * n[u]);
            da_z[u] = dh[u] * (n[u] - h_prev[u]) * z[u] * (1.0 - z[u]);
            reset_h[u] = r[u] * h_prev[u];
          }
          const double* u_n = l.recurrent_weights.data() + 2 * h * h;
          outer_add(gl.recurrent_weights.data() + 2 * h * h, h, h, da_n, reset_h.data());
          std::fill(d_reset_h.begin(), d_reset_h.end(), 0.0);
          matvec_t_add(u_n, h, h, da_n, d_reset_h.data());
          for (std::size_t u = 0; u < h; ++u) {
            da_r[u] = d_reset_h[u] * h_prev[u] * r[u] * (1.0 - r[u]);
            dh_next[u] += d_reset_h[u] * r[u];
          }
          outer_add(gl.recurrent_weights.data(), 2 * h, h, da.data(), h_prev);
          matvec_t_add(l.recurrent_weights.data(), 2 * h, h, da.data(), dh_next.data());
          break;
        }
        case CellType::kLSTM: {
          const double* c_prev = lc.cell.data() + t * h;
          const double* c_cur = lc.cell.data() + (t + 1) * h;
          for (std::size_t u = 0; u < h; ++u) {
            const double ig = gate[u];
            const double fg = gate[h + u];
            const double cg = gate[2 * h + u];
            const double og = gate[3 * h + u];
            const double tc = std::tanh(c_cur[u]);
            const double dc = dc_next[u] + dh[u] * og * (1.0 - tc * tc);
            da[u] = dc * cg * ig * (1.0 - ig);
            da[h + u] = dc * c_prev[u] * fg * (1.0 - fg);
            da[2 * h + u] = dc * ig * (1.0 - cg * cg);
            da[3 * h + u] = dh[u] * tc * og * (1.0 - og);
            dc_next[u] = dc * fg;
          }
          outer_add(gl.recurrent_weights.data(), 4 * h, h, da.data(), h_prev);
          matvec_t_add(l.recurrent_weights.data(), 4 * h, h, da.data(), dh_next.data());
          break;
        }
      }
      outer_add(gl.input_weights.data(), g * h, f, da.data(), x);
      for (std::size_t i = 0; i < g * h; ++i) gl.biases[i] += da[i];
      matvec_t_add(l.input_weights.data(), g * h, f, da.data(), d_in.data() + t * f);
    }

    if (li == 0) break;
    // Route input gradients through the lower layer's dropout mask.
    const auto& below = cache.layers[li - 1];
    if (!below.output_mask.empty()) {
      for (std::size_t i = 0; i < d_in.size(); ++i) d_in[i] *= below.output_mask[i];
    }
    d_out = std::move(d_in);
  }
  return grad;
}

}  // namespace fluxrnn
