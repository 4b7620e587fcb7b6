#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <string>
#include <vector>

#include "fluxrnn/config.hpp"
#include "fluxrnn/csv.hpp"
#include "fluxrnn/pca.hpp"

namespace fluxrnn {

// The sites a command operates on. An empty site list in the config stands for
// the synthetic site; a site without a csv path reads <out>/<id>.csv.
std::vector<SiteConfig> resolved_sites(const PipelineConfig& config);

// Band and backscatter column names recognised by `preprocess`.
inline constexpr const char* kBandGreen = "B_G";
inline constexpr const char* kBandRed = "B_R";
inline constexpr const char* kBandRedEdge1 = "B_RE1";
inline constexpr const char* kBandNir = "B_N";
inline constexpr const char* kBandSwir1 = "B_S1";
inline constexpr const char* kS1VvLinear = "S1_g0VV_lin";
inline constexpr const char* kS1VhLinear = "S1_g0VH_lin";
inline constexpr const char* kRadiationColumn = "RAD";

// Replaces band columns by vegetation indices and linear backscatter by dB
// values plus DpRVI. Values that cannot be derived are missing.
FeatureTable derive_features(const FeatureTable& raw);

// Fitted transformation shared by every processed site.
struct PreprocessModel {
  std::vector<std::string> sites;  // ids that passed quality filtering
  std::optional<PcaModel> pca;
  std::vector<std::string> pca_inputs;
  std::vector<std::string> features;
  std::vector<double> means;
  std::vector<double> scales;
};

std::string preprocess_model_to_json(const PreprocessModel& model);
PreprocessModel preprocess_model_from_json(std::string_view text);

// Subcommands. Each reads and writes files under config.out_dir.
//   synth       <id>.csv, <id>_truth.csv
//   radiation   <id>_radiation.csv
//   preprocess  <id>_processed.csv, preprocess.json
//   extremes    <id>_extremes.csv
//   train       model.ckpt, history.csv
//   tune        tune_trials.csv, tune_best.json
//   evaluate    evaluation.csv, evaluation_summary.csv, predictions.csv
//   importance  importance.csv, importance_summary.csv
void run_synth(const PipelineConfig& config);
void run_radiation(const PipelineConfig& config);
void run_preprocess(const PipelineConfig& config);
void run_extremes(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
void run_tune(const PipelineConfig& config);
void run_evaluate(const PipelineConfig& config);
void run_importance(const PipelineConfig& config);

}  // namespace fluxrnn
