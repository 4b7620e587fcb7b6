#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxrnn/pca.hpp"
#include "fluxrnn/training.hpp"

namespace fluxrnn {

inline constexpr std::string_view kCheckpointMagic = "FLUXRNN1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything persisted in a checkpoint file.
//
// Layout, little-endian throughout:
//   char[8]  magic "FLUXRNN1"
//   u32      format version
//   u8       cell code (0 RNN, 1 GRU, 2 LSTM)
//   u64      input feature count
//   u32      layer count, then u64 units per layer
//   f64      dropout rate
//   u32      feature name count, then per name: u32 byte length + bytes
//   u8       PCA present flag; when 1:
//              u8 standardized, then five arrays (means, scales, components
//              k x p row-major, eigenvalues, explained variance ratio)
//              each as u64 length + f64 values, then u64 component count k
//   u64      parameter array count, then per array: u64 length + f64 values
//            in NetworkParams::tensors() order
//   f64      monitored score
//   u64      epoch
struct CheckpointFile {
  NetworkParams params;
  std::vector<std::string> feature_names;
  std::optional<PcaModel> pca;
  double monitored_score = 0.0;
  std::uint64_t epoch = 0;

  static CheckpointFile from(const Checkpoint& ckpt, std::vector<std::string> feature_names,
                             std::optional<PcaModel> pca = std::nullopt);
  Checkpoint to_checkpoint() const;

  friend bool operator==(const CheckpointFile&, const CheckpointFile&) = default;
};

std::string encode_checkpoint(const CheckpointFile& file);
// Throws BadMagic, VersionUnsupported, TruncatedFile, or DataError.
CheckpointFile decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const CheckpointFile& file);
CheckpointFile load_checkpoint(const std::filesystem::path& path);

}  // namespace fluxrnn
