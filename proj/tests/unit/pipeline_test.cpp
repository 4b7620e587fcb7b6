#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "fluxrnn/checkpoint.hpp"
#include "fluxrnn/errors.hpp"
#include "fluxrnn/features.hpp"
#include "fluxrnn/pipeline.hpp"

using namespace fluxrnn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fluxrnn_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig small_config(const fs::path& out) {
  PipelineConfig c;
  c.out_dir = out;
  c.window_length = 10;
  c.model.layers = {4};
  c.model.cell = CellType::kGRU;
  c.training.epochs = 2;
  c.importance.repetitions = 2;
  c.synth.droughts = {{3, 180, 10, 0.3}};
  return c;
}

// Adds Sentinel-2 band and Sentinel-1 backscatter columns to a synthetic site.
void write_banded_site(const PipelineConfig& c, const std::string& id, std::uint64_t seed) {
  SynthSpec spec = c.synth;
  spec.site_id = id;
  spec.seed = seed;
  const SynthResult r = synth_generate(spec);
  Rng rng(seed);
  // Raw bands replace the ready-made greenness component.
  FeatureTable t = r.table.select(std::vector<std::size_t>{0, 2});
  std::vector<double> g(t.rows()), red(t.rows()), re(t.rows()), nir(t.rows()), sw(t.rows()),
      vv(t.rows()), vh(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double green = 0.5 + 0.5 * std::sin(static_cast<double>(i) / 58.0);
    g[i] = 0.05 + 0.02 * green + 0.002 * rng.normal();
    red[i] = 0.06 - 0.03 * green + 0.002 * rng.normal();
    re[i] = 0.10 + 0.05 * green + 0.003 * rng.normal();
    nir[i] = 0.25 + 0.2 * green + 0.01 * rng.normal();
    sw[i] = 0.18 - 0.05 * green + 0.005 * rng.normal();
    vv[i] = 0.05 + 0.01 * rng.uniform();
    vh[i] = 0.01 + 0.005 * green + 0.001 * rng.uniform();
    if (i % 11 == 3) g[i] = red[i] = re[i] = nir[i] = sw[i] = kMissing;  // cloudy day
  }
  t = t.with_column(kBandGreen, g).with_column(kBandRed, red).with_column(kBandRedEdge1, re);
  t = t.with_column(kBandNir, nir).with_column(kBandSwir1, sw);
  t = t.with_column(kS1VvLinear, vv).with_column(kS1VhLinear, vh);
  write_feature_csv(c.out_dir / (id + ".csv"), r.series, t);
}

}  // namespace

TEST(DeriveFeatures, BandsBecomeIndices) {
  const auto raw = fixture::table({"B_G", "B_R", "B_RE1", "B_N", "B_S1", "S1_g0VV_lin", "S1_g0VH_lin", "X"},
                                  {{0.08}, {0.05}, {0.12}, {0.4}, {0.2}, {0.3}, {0.1}, {7.0}});
  const FeatureTable t = derive_features(raw);
  EXPECT_EQ(t.names(), (std::vector<std::string>{"X", "VI_kNDVI", "VI_NDMI", "VI_MCARI", "VI_DSWI",
                                                 "S1_g0VV_dB", "S1_g0VH_dB", "S1_DpRVI"}));
  const BandMeans b{0.08, 0.05, 0.12, 0.4, 0.2};
  EXPECT_EQ(t(0, 1), compute_vi(VegetationIndex::kKNDVI, b));
  EXPECT_EQ(t(0, 4), compute_vi(VegetationIndex::kDSWI, b));
  EXPECT_EQ(t(0, 5), s1_to_db(0.3));
  EXPECT_DOUBLE_EQ(t(0, 7), 1.0);
  EXPECT_EQ(t(0, 0), 7.0);
}

TEST(DeriveFeatures, PassThroughWithoutBands) {
  const auto raw = fixture::table({"RAD", "LST"}, {{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_EQ(derive_features(raw), raw);
  const auto half = fixture::table({"S1_g0VV_lin"}, {{1.0}});
  EXPECT_THROW(derive_features(half), MissingBand);
}

TEST(Pipeline, ResolvedSitesDefaultToSynth) {
  PipelineConfig c;
  c.out_dir = "o";
  const auto sites = resolved_sites(c);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].id, c.synth.site_id);
  EXPECT_EQ(sites[0].csv, fs::path("o") / (c.synth.site_id + ".csv"));
}

TEST(Pipeline, SynthToImportanceProducesEveryArtifact) {
  const PipelineConfig c = small_config(fresh_dir("e2e"));
  run_synth(c);
  run_radiation(c);
  run_preprocess(c);
  run_extremes(c);
  run_train(c);
  run_evaluate(c);
  run_importance(c);
  for (const char* f : {"SYN-01.csv", "SYN-01_truth.csv", "SYN-01_radiation.csv", "SYN-01_processed.csv",
                        "SYN-01_extremes.csv", "preprocess.json", "model.ckpt", "history.csv",
                        "evaluation.csv", "evaluation_summary.csv", "predictions.csv", "importance.csv",
                        "importance_summary.csv"}) {
    EXPECT_TRUE(fs::exists(c.out_dir / f)) << f;
  }
  const CheckpointFile ckpt = load_checkpoint(c.out_dir / "model.ckpt");
  EXPECT_EQ(ckpt.params.cell, CellType::kGRU);
  EXPECT_FALSE(ckpt.pca.has_value());
  EXPECT_EQ(read_file(c.out_dir / "evaluation.csv").substr(0, 28), "site,regime,nrmse,n_samples\n");
}

TEST(Pipeline, PreprocessFitsJointPcaAndScalesOnTrainYears) {
  PipelineConfig c = small_config(fresh_dir("pca"));
  c.sites = {{"A", 50.0, 10.0, {}}, {"B", 45.0, 5.0, {}}};
  write_banded_site(c, "A", 1);
  write_banded_site(c, "B", 2);
  run_preprocess(c);
  const PreprocessModel m = preprocess_model_from_json(read_file(c.out_dir / "preprocess.json"));
  ASSERT_TRUE(m.pca.has_value());
  EXPECT_EQ(m.pca_inputs.size(), 4u);
  EXPECT_EQ(m.sites, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(m.features.back().starts_with("S2_PC"));
  EXPECT_EQ(preprocess_model_from_json(preprocess_model_to_json(m)).features, m.features);

  // Pooled training-year rows have zero mean and unit sample variance.
  std::vector<double> sum(m.features.size(), 0.0), sq(m.features.size(), 0.0);
  std::size_t n = 0;
  for (const char* id : {"A", "B"}) {
    const SiteData d = load_feature_csv(c.out_dir / (std::string(id) + "_processed.csv"));
    EXPECT_EQ(d.table.names(), m.features);
    EXPECT_FALSE(d.table.has_missing());
    for (std::size_t i = 0; i < d.table.rows(); ++i) {
      if (!c.split.train_years.contains(d.series.date_at(i).year())) continue;
      ++n;
      for (std::size_t j = 0; j < m.features.size(); ++j) {
        sum[j] += d.table(i, j);
        sq[j] += d.table(i, j) * d.table(i, j);
      }
    }
  }
  for (std::size_t j = 0; j < m.features.size(); ++j) {
    EXPECT_NEAR(sum[j] / static_cast<double>(n), 0.0, 1e-9) << m.features[j];
    EXPECT_NEAR(sq[j] / static_cast<double>(n - 1), 1.0, 1e-9) << m.features[j];
  }

  run_train(c);
  const CheckpointFile ckpt = load_checkpoint(c.out_dir / "model.ckpt");
  ASSERT_TRUE(ckpt.pca.has_value());
  EXPECT_EQ(*ckpt.pca, *m.pca);
  EXPECT_EQ(ckpt.feature_names, m.features);
}

TEST(Pipeline, RejectedSitesAreSkipped) {
  PipelineConfig c = small_config(fresh_dir("reject"));
  c.sites = {{"GOOD", 50.0, 10.0, {}}, {"BAD", 50.0, 10.0, {}}};
  SynthSpec spec = c.synth;
  SynthResult r = synth_generate(spec);
  write_feature_csv(c.out_dir / "GOOD.csv", r.series, r.table);
  for (std::size_t i = 0; i < r.series.size(); i += 2) r.series.qc_fraction[i] = 0.1;
  write_feature_csv(c.out_dir / "BAD.csv", r.series, r.table);
  run_preprocess(c);
  EXPECT_TRUE(fs::exists(c.out_dir / "GOOD_processed.csv"));
  EXPECT_FALSE(fs::exists(c.out_dir / "BAD_processed.csv"));

  c.sites = {{"BAD", 50.0, 10.0, {}}};
  EXPECT_THROW(run_preprocess(c), DataError);
}

TEST(Pipeline, ModellingCommandsNeedPreprocessing) {
  const PipelineConfig c = small_config(fresh_dir("order"));
  EXPECT_THROW(run_train(c), DataError);
  EXPECT_THROW(run_evaluate(c), DataError);
}
