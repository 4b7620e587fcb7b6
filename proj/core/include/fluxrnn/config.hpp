#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fluxrnn/date.hpp"
#include "fluxrnn/evaluation.hpp"
#include "fluxrnn/extremes.hpp"
#include "fluxrnn/hyperband.hpp"
#include "fluxrnn/pca.hpp"
#include "fluxrnn/radiation.hpp"
#include "fluxrnn/recurrent.hpp"
#include "fluxrnn/synth.hpp"
#include "fluxrnn/timeseries.hpp"
#include "fluxrnn/training.hpp"

namespace fluxrnn {

struct SiteConfig {
  std::string id;
  double latitude = 0.0;
  double longitude = 0.0;
  std::filesystem::path csv;  // empty: <out>/<id>.csv
};

struct ModelConfig {
  CellType cell = CellType::kLSTM;
  std::vector<std::size_t> layers = {64};
  double dropout = kDefaultDropout;
  InitScheme init = InitScheme::kSqrtFeatures;
};

struct QualityConfig {
  double qc_min = kDefaultQcMin;
  double valid_min = kDefaultValidMin;
};

struct PcaConfig {
  PcaOptions options;
  std::string input_prefix = "VI_";
};

struct RadiationConfig {
  double tau = kDefaultTransmittance;
  Date start{2016, 1, 1};
  Date end{2020, 12, 31};
};

struct ImportanceConfig {
  std::size_t repetitions = kDefaultRepetitions;
  PermutationGranularity granularity = PermutationGranularity::kSampleBlock;
};

// Mirrors the JSON document field for field. Unknown keys are rejected.
struct PipelineConfig {
  std::vector<SiteConfig> sites;  // empty: the synthetic site
  SplitSpec split{{2016, 2017, 2018}, {2019, 2020}};
  std::size_t window_length = kDefaultWindowLength;
  ModelConfig model;
  TrainConfig training;
  HyperBandConfig hyperband;
  ExtremeOptions extremes;
  QualityConfig quality;
  PcaConfig pca;
  RadiationConfig radiation;
  ImportanceConfig importance;
  SynthSpec synth;
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "out";

  // Throws ConfigError when a value is outside its module's range.
  void validate() const;
};

// Throws ConfigError. Relative site paths resolve against `base_dir`.
PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Canonical JSON rendering; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const PipelineConfig& config);

}  // namespace fluxrnn
