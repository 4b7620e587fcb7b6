#include "fluxrnn/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include "fluxrnn/csv.hpp"
#include "fluxrnn/errors.hpp"

namespace fluxrnn {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_little(v);
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf_.append(raw, sizeof(T));
  }
  void put_array(std::span<const double> values) {
    put<std::uint64_t>(values.size());
    for (double v : values) put(v);
  }
  void put_bytes(std::string_view s) { buf_.append(s); }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }

  std::vector<double> get_array(const char* what) {
    const auto n = get<std::uint64_t>(what);
    if (n > remaining() / sizeof(double)) throw TruncatedFile(what);
    std::vector<double> out(n);
    for (auto& v : out) v = get<double>(what);
    return out;
  }

  std::string get_string(const char* what) {
    const auto n = get<std::uint32_t>(what);
    need(n, what);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (n > remaining()) throw TruncatedFile(what);
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

CheckpointFile CheckpointFile::from(const Checkpoint& ckpt, std::vector<std::string> feature_names,
                                    std::optional<PcaModel> pca) {
  return CheckpointFile{ckpt.params, std::move(feature_names), std::move(pca),
                        ckpt.monitored_score, ckpt.epoch};
}

Checkpoint CheckpointFile::to_checkpoint() const {
  return Checkpoint{params, static_cast<std::size_t>(epoch), monitored_score, {}};
}

std::string encode_checkpoint(const CheckpointFile& file) {
  file.params.validate();
  Writer w;
  w.put_bytes(kCheckpointMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(file.params.cell));
  w.put<std::uint64_t>(file.params.n_features());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(file.params.layers.size()));
  for (const auto& l : file.params.layers) w.put<std::uint64_t>(l.units);
  w.put<double>(file.params.dropout_rate);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(file.feature_names.size()));
  for (const auto& n : file.feature_names) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(n.size()));
    w.put_bytes(n);
  }
  w.put<std::uint8_t>(file.pca ? 1 : 0);
  if (file.pca) {
    const auto& p = *file.pca;
    w.put<std::uint8_t>(p.standardized ? 1 : 0);
    w.put_array(p.means);
    w.put_array(p.scales);
    w.put_array(p.components.data());
    w.put_array(p.eigenvalues);
    w.put_array(p.explained_variance_ratio);
    w.put<std::uint64_t>(p.components.rows());
  }
  const auto tensors = file.params.tensors();
  w.put<std::uint64_t>(tensors.size());
  for (auto t : tensors) w.put_array(t);
  w.put<double>(file.monitored_score);
  w.put<std::uint64_t>(file.epoch);
  return w.take();
}

CheckpointFile decode_checkpoint(std::string_view bytes) {
  const auto prefix = bytes.substr(0, kCheckpointMagic.size());
  if (prefix != kCheckpointMagic.substr(0, prefix.size())) throw BadMagic();
  if (prefix.size() < kCheckpointMagic.size()) throw TruncatedFile("magic");

  Reader r(bytes.substr(kCheckpointMagic.size()));
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) throw VersionUnsupported(version);

  CheckpointFile file;
  const auto cell_code = r.get<std::uint8_t>("cell type");
  if (cell_code > 2) throw DataError("checkpoint: unknown cell code " + std::to_string(cell_code));
  const auto cell = static_cast<CellType>(cell_code);
  const auto n_features = r.get<std::uint64_t>("feature count");
  const auto n_layers = r.get<std::uint32_t>("layer count");
  if (n_layers == 0 || n_layers > kMaxLayers) throw DataError("checkpoint: bad layer count");
  std::vector<std::size_t> sizes;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const auto u = r.get<std::uint64_t>("layer size");
    if (u == 0 || u > kMaxUnits) throw DataError("checkpoint: bad layer size");
    sizes.push_back(u);
  }
  if (n_features == 0 || n_features > (1u << 20)) throw DataError("checkpoint: bad feature count");
  const double dropout = r.get<double>("dropout");

  const auto n_names = r.get<std::uint32_t>("feature names");
  if (n_names > r.remaining() / sizeof(std::uint32_t)) throw TruncatedFile("feature names");
  for (std::uint32_t i = 0; i < n_names; ++i) file.feature_names.push_back(r.get_string("name"));

  if (r.get<std::uint8_t>("pca flag") == 1) {
    PcaModel p;
    p.standardized = r.get<std::uint8_t>("pca standardized") == 1;
    p.means = r.get_array("pca means");
    p.scales = r.get_array("pca scales");
    auto comps = r.get_array("pca components");
    p.eigenvalues = r.get_array("pca eigenvalues");
    p.explained_variance_ratio = r.get_array("pca explained variance");
    const auto k = r.get<std::uint64_t>("pca component count");
    const std::size_t n_in = p.means.size();
    if (p.scales.size() != n_in || comps.size() != k * n_in || p.eigenvalues.size() != k ||
        p.explained_variance_ratio.size() != k) {
      throw DataError("checkpoint: PCA lengths disagree");
    }
    p.components = Matrix(k, n_in, std::move(comps));
    file.pca = std::move(p);
  }

  // Shapes are rebuilt from the header, then payload lengths must match.
  const std::size_t g = gate_count(cell);
  NetworkParams& params = file.params;
  params.cell = cell;
  params.dropout_rate = dropout;
  std::size_t fan_in = n_features;
  for (std::size_t units : sizes) {
    LayerParams l;
    l.units = units;
    l.fan_in = fan_in;
    params.layers.push_back(std::move(l));
    fan_in = units;
  }
  const auto n_arrays = r.get<std::uint64_t>("array count");
  if (n_arrays != 3 * params.layers.size() + 2) throw DataError("checkpoint: bad array count");
  for (auto& l : params.layers) {
    l.input_weights = r.get_array("input weights");
    l.recurrent_weights = r.get_array("recurrent weights");
    l.biases = r.get_array("biases");
    if (l.input_weights.size() != g * l.units * l.fan_in ||
        l.recurrent_weights.size() != g * l.units * l.units || l.biases.size() != g * l.units) {
      throw DataError("checkpoint: layer array lengths disagree with header");
    }
  }
  params.head_weights = r.get_array("head weights");
  const auto head_bias = r.get_array("head bias");
  if (params.head_weights.size() != params.layers.back().units || head_bias.size() != 1) {
    throw DataError("checkpoint: head array lengths disagree with header");
  }
  params.head_bias = head_bias[0];
  file.monitored_score = r.get<double>("monitored score");
  file.epoch = r.get<std::uint64_t>("epoch");
  if (r.remaining() != 0) throw DataError("checkpoint: trailing bytes");
  try {
    params.validate();
  } catch (const InvalidArchitecture& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  return file;
}

void save_checkpoint(const std::filesystem::path& path, const CheckpointFile& file) {
  write_file_atomic(path, encode_checkpoint(file));
}

CheckpointFile load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace fluxrnn
