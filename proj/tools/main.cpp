#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fluxrnn/config.hpp"
#include "fluxrnn/errors.hpp"
#include "fluxrnn/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code(fluxrnn::ErrorCategory c) {
  switch (c) {
    case fluxrnn::ErrorCategory::kConfig:
      return kExitConfig;
    case fluxrnn::ErrorCategory::kNumeric:
      return kExitNumeric;
    case fluxrnn::ErrorCategory::kData:
    case fluxrnn::ErrorCategory::kPrecondition:
      break;
  }
  return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrent GPP modelling pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "Overrides the configured seed");
  app.add_option("--out", out_dir, "Overrides the output directory");

  const std::map<std::string, std::pair<std::string, std::function<void(const fluxrnn::PipelineConfig&)>>>
      commands = {
          {"synth", {"Generate the synthetic site", fluxrnn::run_synth}},
          {"radiation", {"Write clear-sky radiation per site", fluxrnn::run_radiation}},
          {"preprocess", {"Filter, derive features, interpolate, PCA, scale", fluxrnn::run_preprocess}},
          {"extremes", {"Flag GPP extremes per site", fluxrnn::run_extremes}},
          {"train", {"Train the configured network", fluxrnn::run_train}},
          {"tune", {"HyperBand search over depth, width, learning rate", fluxrnn::run_tune}},
          {"evaluate", {"Per-regime NRMSE on the test years", fluxrnn::run_evaluate}},
          {"importance", {"Permutation feature importance", fluxrnn::run_importance}},
      };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    fluxrnn::PipelineConfig config;
    if (!config_path.empty()) config = fluxrnn::load_config(config_path);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    const std::string name = app.get_subcommands().front()->get_name();
    commands.at(name).second(config);
  } catch (const fluxrnn::Error& e) {
    std::cerr << "fluxrnn: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "fluxrnn: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
