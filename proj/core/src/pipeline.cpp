#include "fluxrnn/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fluxrnn/checkpoint.hpp"
#include "fluxrnn/errors.hpp"
#include "fluxrnn/features.hpp"
#include "fluxrnn/radiation.hpp"
#include "fluxrnn/rng.hpp"

namespace fluxrnn {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kPreprocessFile = "preprocess.json";
constexpr const char* kModelFile = "model.ckpt";

std::uint64_t init_seed(const PipelineConfig& c) { return derive_seed(c.seed, 1); }
std::uint64_t shuffle_seed(const PipelineConfig& c) { return derive_seed(c.seed, 2); }
std::uint64_t importance_seed(const PipelineConfig& c) { return derive_seed(c.seed, 3); }
std::uint64_t hyperband_seed(const PipelineConfig& c) { return derive_seed(c.seed, 4); }

void note(const std::string& msg) { std::cerr << "fluxrnn: " << msg << '\n'; }

fs::path out_file(const PipelineConfig& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return c.out_dir / name;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string s;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0) s += '-';
    s += std::to_string(sizes[i]);
  }
  return s;
}

double band_or_nan(const FeatureTable& t, std::optional<std::size_t> col, std::size_t r) {
  return col ? t(r, *col) : kMissing;
}

// One site after preprocessing, as read back by the modelling commands.
struct ProcessedSite {
  SiteConfig site;
  SiteData data;
};

struct ProcessedInputs {
  PreprocessModel model;
  std::vector<ProcessedSite> sites;
};

ProcessedInputs load_processed(const PipelineConfig& c) {
  const fs::path model_path = c.out_dir / kPreprocessFile;
  if (!fs::exists(model_path)) {
    throw DataError("missing " + model_path.string() + "; run preprocess first");
  }
  ProcessedInputs in;
  in.model = preprocess_model_from_json(read_file(model_path));
  std::map<std::string, SiteConfig> by_id;
  for (const auto& s : resolved_sites(c)) by_id[s.id] = s;
  for (const auto& id : in.model.sites) {
    auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    ProcessedSite p{it->second, load_feature_csv(c.out_dir / (id + "_processed.csv"), id,
                                                 it->second.latitude, it->second.longitude)};
    if (p.data.table.names() != in.model.features) {
      throw DataError("processed features of site " + id + " differ from preprocess.json");
    }
    in.sites.push_back(std::move(p));
  }
  if (in.sites.empty()) throw DataError("no processed site matches the configured sites");
  return in;
}

WindowedDataset site_windows(const PipelineConfig& c, const SiteData& d, SplitPart part) {
  return build_windows(d.series, d.table, c.window_length, c.split, part);
}

struct PooledWindows {
  WindowedDataset train;
  WindowedDataset test;
};

PooledWindows pooled_windows(const PipelineConfig& c, const ProcessedInputs& in) {
  PooledWindows p;
  for (const auto& s : in.sites) {
    p.train.append(site_windows(c, s.data, SplitPart::kTrain));
    p.test.append(site_windows(c, s.data, SplitPart::kTest));
  }
  if (p.train.empty()) throw EmptySplit("no training windows");
  if (p.test.empty()) throw EmptySplit("no test windows");
  return p;
}

TrainResult fit(const PipelineConfig& c, const PooledWindows& w,
                const std::vector<std::size_t>& layers, double lr, std::size_t epochs) {
  const NetworkParams init = init_params(c.model.cell, layers, w.train.n_features, init_seed(c),
                                         c.model.dropout, c.model.init);
  TrainConfig tc = c.training;
  tc.learning_rate = lr;
  tc.epochs = epochs;
  tc.shuffle_seed = shuffle_seed(c);
  return train(init, w.train, w.test, tc);
}

CheckpointFile load_model(const PipelineConfig& c, const ProcessedInputs& in) {
  CheckpointFile f = load_checkpoint(c.out_dir / kModelFile);
  if (f.feature_names != in.model.features) {
    throw DataError("checkpoint features differ from the processed data");
  }
  return f;
}

}  // namespace

std::vector<SiteConfig> resolved_sites(const PipelineConfig& c) {
  std::vector<SiteConfig> out = c.sites;
  if (out.empty()) out.push_back({c.synth.site_id, c.synth.latitude, c.synth.longitude, {}});
  for (auto& s : out) {
    if (s.csv.empty()) s.csv = c.out_dir / (s.id + ".csv");
  }
  return out;
}

FeatureTable derive_features(const FeatureTable& raw) {
  const auto g = raw.index_of(kBandGreen);
  const auto r = raw.index_of(kBandRed);
  const auto re = raw.index_of(kBandRedEdge1);
  const auto n = raw.index_of(kBandNir);
  const auto s1 = raw.index_of(kBandSwir1);
  const auto vv = raw.index_of(kS1VvLinear);
  const auto vh = raw.index_of(kS1VhLinear);

  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < raw.cols(); ++j) {
    if (j != g && j != r && j != re && j != n && j != s1 && j != vv && j != vh) keep.push_back(j);
  }
  FeatureTable out = raw.select(keep);
  const std::size_t rows = raw.rows();

  if (g || r || re || n || s1) {
    for (auto vi : {VegetationIndex::kKNDVI, VegetationIndex::kNDMI, VegetationIndex::kMCARI,
                    VegetationIndex::kDSWI}) {
      std::vector<double> col(rows, kMissing);
      for (std::size_t i = 0; i < rows; ++i) {
        const BandMeans b{band_or_nan(raw, g, i), band_or_nan(raw, r, i),
                          band_or_nan(raw, re, i), band_or_nan(raw, n, i),
                          band_or_nan(raw, s1, i)};
        try {
          col[i] = compute_vi(vi, b);
        } catch (const MissingBand&) {
        } catch (const DivisionByZero&) {
        }
      }
      out = out.with_column("VI_" + std::string(vi_name(vi)), col);
    }
  }
  if (vv && vh) {
    std::vector<double> vv_db(rows, kMissing), vh_db(rows, kMissing), rvi(rows, kMissing);
    for (std::size_t i = 0; i < rows; ++i) {
      const double a = raw(i, *vv);
      const double b = raw(i, *vh);
      if (is_missing(a) || is_missing(b) || a <= 0.0 || b <= 0.0) continue;
      vv_db[i] = s1_to_db(a);
      vh_db[i] = s1_to_db(b);
      rvi[i] = dprvi({a, b});
    }
    out = out.with_column("S1_g0VV_dB", vv_db)
              .with_column("S1_g0VH_dB", vh_db)
              .with_column("S1_DpRVI", rvi);
  } else if (vv || vh) {
    throw MissingBand("DpRVI needs both " + std::string(kS1VvLinear) + " and " + kS1VhLinear);
  }
  return out;
}

std::string preprocess_model_to_json(const PreprocessModel& m) {
  json j;
  j["sites"] = m.sites;
  j["features"] = m.features;
  j["means"] = m.means;
  j["scales"] = m.scales;
  j["pca_inputs"] = m.pca_inputs;
  if (m.pca) {
    const PcaModel& p = *m.pca;
    j["pca"] = {{"standardized", p.standardized},
                {"means", p.means},
                {"scales", p.scales},
                {"k", p.n_components()},
                {"components", std::vector<double>(p.components.data().begin(),
                                                   p.components.data().end())},
                {"eigenvalues", p.eigenvalues},
                {"explained_variance_ratio", p.explained_variance_ratio}};
  } else {
    j["pca"] = nullptr;
  }
  return j.dump(2) + "\n";
}

PreprocessModel preprocess_model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    PreprocessModel m;
    m.sites = j.at("sites").get<std::vector<std::string>>();
    m.features = j.at("features").get<std::vector<std::string>>();
    m.means = j.at("means").get<std::vector<double>>();
    m.scales = j.at("scales").get<std::vector<double>>();
    m.pca_inputs = j.at("pca_inputs").get<std::vector<std::string>>();
    const json& p = j.at("pca");
    if (!p.is_null()) {
      PcaModel pca;
      pca.standardized = p.at("standardized").get<bool>();
      pca.means = p.at("means").get<std::vector<double>>();
      pca.scales = p.at("scales").get<std::vector<double>>();
      const auto k = p.at("k").get<std::size_t>();
      pca.components = Matrix(k, pca.means.size(), p.at("components").get<std::vector<double>>());
      pca.eigenvalues = p.at("eigenvalues").get<std::vector<double>>();
      pca.explained_variance_ratio = p.at("explained_variance_ratio").get<std::vector<double>>();
      m.pca = std::move(pca);
    }
    if (m.means.size() != m.features.size() || m.scales.size() != m.features.size()) {
      throw DataError("preprocess.json: scaler length differs from feature count");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("preprocess.json: ") + e.what());
  } catch (const ShapeMismatch& e) {
    throw DataError(std::string("preprocess.json: ") + e.what());
  }
}

void run_synth(const PipelineConfig& c) {
  const SynthResult r = synth_generate(c.synth);
  write_feature_csv(out_file(c, c.synth.site_id + ".csv"), r.series, r.table);
  write_file_atomic(out_file(c, c.synth.site_id + "_truth.csv"), format_mask_csv(r.truth));
}

void run_radiation(const PipelineConfig& c) {
  const auto days = static_cast<std::size_t>(days_between(c.radiation.start, c.radiation.end) + 1);
  for (const auto& s : resolved_sites(c)) {
    const RadiationSeries rad =
        clearsky_series(site_from_degrees(s.latitude, s.longitude), c.radiation.start, days,
                        c.radiation.tau);
    std::string text = "date,RAD\n";
    for (std::size_t i = 0; i < rad.values.size(); ++i) {
      text += rad.start.plus_days(static_cast<long>(i)).to_string() + "," +
              format_double(rad.values[i]) + "\n";
    }
    write_file_atomic(out_file(c, s.id + "_radiation.csv"), text);
  }
}

void run_preprocess(const PipelineConfig& c) {
  struct Kept {
    SiteConfig site;
    SiteSeries series;
    FeatureTable table;
  };
  std::vector<Kept> kept;
  for (const auto& s : resolved_sites(c)) {
    SiteData d = load_feature_csv(s.csv, s.id, s.latitude, s.longitude);
    SiteSeries filtered;
    try {
      filtered = filter_gpp_quality(d.series, c.quality.qc_min, c.quality.valid_min);
    } catch (const SiteRejected& e) {
      note("skipping site " + s.id + ": " + e.what());
      continue;
    }
    FeatureTable table = derive_features(d.table);
    if (!table.index_of(kRadiationColumn)) {
      const RadiationSeries rad = clearsky_series(site_from_degrees(s.latitude, s.longitude),
                                                  d.series.start, d.series.size(),
                                                  c.radiation.tau);
      table = table.with_column(kRadiationColumn, rad.values);
    }
    kept.push_back({s, std::move(filtered), interpolate_features(table)});
  }
  if (kept.empty()) throw DataError("no site passed quality filtering");
  for (const auto& k : kept) {
    if (k.table.names() != kept.front().table.names()) {
      throw DataError("site " + k.site.id + " has a different feature set than " +
                      kept.front().site.id);
    }
  }

  PreprocessModel model;
  const auto& names = kept.front().table.names();
  std::vector<std::size_t> pca_cols, other_cols;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j].starts_with(c.pca.input_prefix)) {
      pca_cols.push_back(j);
      model.pca_inputs.push_back(names[j]);
    } else {
      other_cols.push_back(j);
    }
  }
  if (!pca_cols.empty()) {
    for (std::size_t j : other_cols) {
      if (names[j].starts_with("S2_PC")) {
        throw DataError("column " + names[j] + " clashes with the PCA output names");
      }
    }
    std::size_t total = 0;
    for (const auto& k : kept) total += k.table.rows();
    Matrix stacked(total, pca_cols.size());
    std::size_t r = 0;
    for (const auto& k : kept) {
      for (std::size_t i = 0; i < k.table.rows(); ++i, ++r) {
        for (std::size_t j = 0; j < pca_cols.size(); ++j) stacked(r, j) = k.table(i, pca_cols[j]);
      }
    }
    PcaOptions opts = c.pca.options;
    if (opts.k) opts.k = std::min(*opts.k, pca_cols.size());
    model.pca = pca_fit(stacked, opts);
    for (auto& k : kept) {
      const Matrix scores = pca_transform(*model.pca, k.table.select(pca_cols).values());
      FeatureTable t = k.table.select(other_cols);
      for (std::size_t pc = 0; pc < scores.cols(); ++pc) {
        t = t.with_column("S2_PC" + std::to_string(pc + 1), scores.column(pc));
      }
      k.table = std::move(t);
    }
  }

  // Feature scaling from the pooled training-year rows.
  model.features = kept.front().table.names();
  const std::size_t nf = model.features.size();
  std::vector<double> sum(nf, 0.0), sq(nf, 0.0);
  std::size_t count = 0;
  for (const auto& k : kept) {
    for (std::size_t i = 0; i < k.table.rows(); ++i) {
      if (!c.split.train_years.contains(k.series.date_at(i).year())) continue;
      ++count;
      for (std::size_t j = 0; j < nf; ++j) sum[j] += k.table(i, j);
    }
  }
  if (count < 2) throw EmptySplit("fewer than two feature rows in the training years");
  model.means.resize(nf);
  model.scales.resize(nf);
  for (std::size_t j = 0; j < nf; ++j) model.means[j] = sum[j] / static_cast<double>(count);
  for (const auto& k : kept) {
    for (std::size_t i = 0; i < k.table.rows(); ++i) {
      if (!c.split.train_years.contains(k.series.date_at(i).year())) continue;
      for (std::size_t j = 0; j < nf; ++j) {
        const double d = k.table(i, j) - model.means[j];
        sq[j] += d * d;
      }
    }
  }
  for (std::size_t j = 0; j < nf; ++j) {
    const double sd = std::sqrt(sq[j] / static_cast<double>(count - 1));
    model.scales[j] = sd > 0.0 ? sd : 1.0;
  }
  for (auto& k : kept) {
    for (std::size_t i = 0; i < k.table.rows(); ++i) {
      for (std::size_t j = 0; j < nf; ++j) {
        k.table(i, j) = (k.table(i, j) - model.means[j]) / model.scales[j];
      }
    }
    write_feature_csv(out_file(c, k.site.id + "_processed.csv"), k.series, k.table);
    model.sites.push_back(k.site.id);
  }
  write_file_atomic(out_file(c, kPreprocessFile), preprocess_model_to_json(model));
}

void run_extremes(const PipelineConfig& c) {
  for (const auto& s : resolved_sites(c)) {
    const SiteData d = load_feature_csv(s.csv, s.id, s.latitude, s.longitude);
    SiteSeries filtered;
    try {
      filtered = filter_gpp_quality(d.series, c.quality.qc_min, c.quality.valid_min);
    } catch (const SiteRejected& e) {
      note("skipping site " + s.id + ": " + e.what());
      continue;
    }
    const ExtremeMask mask = detect_extremes(filtered, c.extremes);
    write_file_atomic(out_file(c, s.id + "_extremes.csv"), format_mask_csv(mask));
  }
}

void run_train(const PipelineConfig& c) {
  const ProcessedInputs in = load_processed(c);
  const PooledWindows w = pooled_windows(c, in);
  const TrainResult r = fit(c, w, c.model.layers, c.training.learning_rate, c.training.epochs);

  std::string history = "epoch,train_loss,monitored_nrmse\n";
  for (const auto& e : r.history) {
    history += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," +
               format_double(e.monitored_nrmse) + "\n";
  }
  write_file_atomic(out_file(c, "history.csv"), history);
  save_checkpoint(out_file(c, kModelFile),
                  CheckpointFile::from(r.best, in.model.features, in.model.pca));
  note("best epoch " + std::to_string(r.best.epoch) + ", monitored NRMSE " +
       format_double(r.best.monitored_score));
}

void run_tune(const PipelineConfig& c) {
  const ProcessedInputs in = load_processed(c);
  const PooledWindows w = pooled_windows(c, in);
  const HyperObjective objective = [&](const HyperParams& hp, std::size_t epochs) {
    return fit(c, w, hp.layer_sizes, hp.learning_rate, epochs).best.monitored_score;
  };
  const HyperBandResult r = hyperband_search(c.hyperband, objective, hyperband_seed(c));

  std::string trials = "bracket,rung,ordinal,epochs,layers,learning_rate,score\n";
  for (const auto& t : r.trials) {
    const HyperParams& hp = r.sampled[t.ordinal];
    trials += std::to_string(t.bracket) + "," + std::to_string(t.rung) + "," +
              std::to_string(t.ordinal) + "," + std::to_string(t.epochs) + "," +
              join_sizes(hp.layer_sizes) + "," + format_double(hp.learning_rate) + "," +
              format_double(t.score) + "\n";
  }
  write_file_atomic(out_file(c, "tune_trials.csv"), trials);
  json best = {{"layers", r.best.layer_sizes},
               {"learning_rate", r.best.learning_rate},
               {"score", r.best_score},
               {"total_epochs", r.total_epochs}};
  write_file_atomic(out_file(c, "tune_best.json"), best.dump(2) + "\n");
}

void run_evaluate(const PipelineConfig& c) {
  const ProcessedInputs in = load_processed(c);
  const CheckpointFile model = load_model(c, in);

  std::string rows = "site,regime,nrmse,n_samples\n";
  std::string preds_csv = "site,date,observed,predicted,extreme\n";
  std::array<std::vector<double>, 3> per_regime;
  for (const auto& s : in.sites) {
    const WindowedDataset test = site_windows(c, s.data, SplitPart::kTest);
    if (test.empty()) {
      note("site " + s.site.id + " has no test windows");
      continue;
    }
    const ExtremeMask mask = detect_extremes(s.data.series, c.extremes);
    const std::vector<double> preds = predict_dataset(model.params, test);
    const SiteEvaluation ev = score_regimes(preds, test, mask, s.site.id);
    for (auto regime : kAllRegimes) {
      const auto& score = ev.scores[static_cast<std::size_t>(regime)];
      if (!score) continue;
      rows += s.site.id + "," + std::string(regime_name(regime)) + "," +
              format_double(score->nrmse) + "," + std::to_string(score->n_samples) + "\n";
      per_regime[static_cast<std::size_t>(regime)].push_back(score->nrmse);
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      const Sample& smp = test.samples[i];
      preds_csv += s.site.id + "," + smp.target_date.to_string() + "," +
                   format_double(smp.target) + "," + format_double(preds[i]) + "," +
                   (mask.is_extreme(smp.target_date) ? "1" : "0") + "\n";
    }
  }
  std::string summary = "regime,median_nrmse,n_sites\n";
  for (auto regime : kAllRegimes) {
    const auto& v = per_regime[static_cast<std::size_t>(regime)];
    summary += std::string(regime_name(regime)) + "," + (v.empty() ? "" : format_double(median(v))) +
               "," + std::to_string(v.size()) + "\n";
  }
  write_file_atomic(out_file(c, "evaluation.csv"), rows);
  write_file_atomic(out_file(c, "evaluation_summary.csv"), summary);
  write_file_atomic(out_file(c, "predictions.csv"), preds_csv);
}

void run_importance(const PipelineConfig& c) {
  const ProcessedInputs in = load_processed(c);
  const CheckpointFile model = load_model(c, in);

  std::string rows = "site,feature,mean_fi,baseline_nrmse\n";
  std::map<std::string, std::vector<double>> by_feature;
  for (const auto& s : in.sites) {
    const WindowedDataset test = site_windows(c, s.data, SplitPart::kTest);
    if (test.size() < 2) {
      note("site " + s.site.id + " has fewer than two test windows");
      continue;
    }
    const FIReport r = permutation_importance(model.params, test, c.importance.repetitions,
                                              importance_seed(c), c.importance.granularity);
    for (const auto& f : r.features) {
      rows += s.site.id + "," + f.feature + "," + format_double(f.mean_fi) + "," +
              format_double(r.baseline_nrmse) + "\n";
      by_feature[f.feature].push_back(f.mean_fi);
    }
  }
  std::string summary = "feature,median_fi,n_sites\n";
  for (const auto& name : in.model.features) {
    const auto it = by_feature.find(name);
    if (it == by_feature.end()) continue;
    summary += name + "," + format_double(median(it->second)) + "," +
               std::to_string(it->second.size()) + "\n";
  }
  write_file_atomic(out_file(c, "importance.csv"), rows);
  write_file_atomic(out_file(c, "importance_summary.csv"), summary);
}

}  // namespace fluxrnn
