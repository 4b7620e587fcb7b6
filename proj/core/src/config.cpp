#include "fluxrnn/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "fluxrnn/csv.hpp"
#include "fluxrnn/errors.hpp"

namespace fluxrnn {

namespace {

using json = nlohmann::ordered_json;

// Reads the keys of one JSON object and rejects any key it was not asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  const json* find(const char* key) {
    if (!j_.contains(key)) return nullptr;
    used_.insert(key);
    return &j_.at(key);
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  template <typename T>
  void unsigned_int(const char* key, T& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<T>();
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename T>
  void unsigned_list(const char* key, std::vector<T>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number_unsigned()) fail(key, "expected non-negative integers");
        out.push_back(x.get<T>());
      }
    }
  }

  void year_set(const char* key, std::set<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array of years");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number_integer()) fail(key, "expected integer years");
        out.insert(x.get<int>());
      }
    }
  }

  void date(const char* key, Date& out) {
    std::string text;
    if (!j_.contains(key)) return;
    string(key, text);
    try {
      out = Date::parse(text);
    } catch (const PreconditionViolation& e) {
      fail(key, e.what());
    }
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  [[noreturn]] void fail(const char* key, const std::string& what) const {
    throw ConfigError(path(key) + ": " + what);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.contains(item.key())) throw ConfigError("unknown key " + path_ + "." + item.key());
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename Fn>
void with_section(Section& parent, const char* key, Fn&& fn) {
  if (const json* v = parent.find(key)) {
    Section s(*v, parent.path(key));
    fn(s);
    s.finish();
  }
}

CellType cell_from(const std::string& s) {
  if (auto c = parse_cell(s)) return *c;
  throw ConfigError("model.cell must be RNN, GRU or LSTM");
}

std::string init_name(InitScheme s) {
  return s == InitScheme::kSqrtFeatures ? "sqrt_n" : "inv_sqrt_n";
}

std::string tail_name(TailMode t) { return t == TailMode::kAll ? "all" : "negative_only"; }

std::string granularity_name(PermutationGranularity g) {
  return g == PermutationGranularity::kSampleBlock ? "block" : "timestep";
}

std::string selection_name(Selection s) { return s == Selection::kTest ? "test" : "validation"; }

std::string rounding_name(BracketRounding r) {
  return r == BracketRounding::kIntegerRatio ? "integer" : "real";
}

void read_synth(Section& s, SynthSpec& spec) {
  s.string("site_id", spec.site_id);
  s.integer("start_year", spec.start_year);
  s.unsigned_int("n_years", spec.n_years);
  s.number("latitude", spec.latitude);
  s.number("longitude", spec.longitude);
  s.number("amplitude", spec.amplitude);
  s.number("noise_std", spec.noise_std);
  s.number("tau", spec.tau);
  s.number("greenness_noise", spec.greenness_noise);
  s.number("stress_noise", spec.stress_noise);
  s.unsigned_int("nuisance_features", spec.nuisance_features);
  s.unsigned_int("seed", spec.seed);
  if (const json* v = s.find("droughts")) {
    if (!v->is_array()) s.fail("droughts", "expected an array");
    spec.droughts.clear();
    std::size_t i = 0;
    for (const auto& item : *v) {
      Section d(item, s.path("droughts") + "[" + std::to_string(i++) + "]");
      DroughtEvent ev;
      d.unsigned_int("year_offset", ev.year_offset);
      d.integer("start_doy", ev.start_doy);
      d.unsigned_int("length", ev.length);
      d.number("depth", ev.depth);
      d.finish();
      spec.droughts.push_back(ev);
    }
  }
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    split.validate();
  } catch (const PreconditionViolation& e) {
    throw ConfigError(std::string("split: ") + e.what());
  }
  if (window_length < 1) throw ConfigError("window_length must be >= 1");
  if (model.layers.empty() || model.layers.size() > kMaxLayers) {
    throw ConfigError("model.layers must list 1..5 layer sizes");
  }
  for (auto u : model.layers) {
    if (u < 1 || u > kMaxUnits) throw ConfigError("model.layers entries must be in 1..512");
  }
  if (!(model.dropout >= 0.0 && model.dropout < 1.0)) throw ConfigError("model.dropout in [0,1)");
  if (training.batch_size < 1) throw ConfigError("training.batch_size must be >= 1");
  if (!(training.learning_rate >= 0.0)) throw ConfigError("training.learning_rate must be >= 0");
  if (!(training.adam.beta1 >= 0.0 && training.adam.beta1 < 1.0) ||
      !(training.adam.beta2 >= 0.0 && training.adam.beta2 < 1.0) ||
      !(training.adam.epsilon > 0.0)) {
    throw ConfigError("training: invalid Adam constants");
  }
  if (!(training.validation_fraction > 0.0 && training.validation_fraction < 1.0)) {
    throw ConfigError("training.validation_fraction must lie in (0, 1)");
  }
  hyperband.validate();
  if (!(extremes.q > 0.0 && extremes.q < 0.5)) throw ConfigError("extremes.q must lie in (0, 0.5)");
  if (extremes.min_run < 1) throw ConfigError("extremes.min_run must be >= 1");
  if (!(quality.qc_min >= 0.0 && quality.qc_min <= 1.0) ||
      !(quality.valid_min >= 0.0 && quality.valid_min <= 1.0)) {
    throw ConfigError("quality thresholds must lie in [0, 1]");
  }
  if (pca.options.k && *pca.options.k < 1) throw ConfigError("pca.k must be >= 1");
  if (!(pca.options.variance_target > 0.0 && pca.options.variance_target <= 1.0)) {
    throw ConfigError("pca.variance_target must lie in (0, 1]");
  }
  if (!(radiation.tau > 0.0 && radiation.tau <= 1.0)) throw ConfigError("radiation.tau in (0,1]");
  if (radiation.end < radiation.start) throw ConfigError("radiation.end precedes start");
  if (importance.repetitions < 1) throw ConfigError("importance.repetitions must be >= 1");
  synth.validate();

  std::set<std::string> ids;
  std::set<std::filesystem::path> paths;
  for (const auto& s : sites) {
    if (s.id.empty()) throw ConfigError("site id must not be empty");
    if (!ids.insert(s.id).second) throw ConfigError("duplicate site id " + s.id);
    if (s.latitude < -90.0 || s.latitude > 90.0 || s.longitude < -180.0 || s.longitude > 180.0) {
      throw ConfigError("site " + s.id + " has coordinates out of range");
    }
    if (!s.csv.empty() && !paths.insert(s.csv.lexically_normal()).second) {
      throw ConfigError("site csv paths must be distinct");
    }
  }
  if (!out_dir.empty() && paths.contains(out_dir.lexically_normal())) {
    throw ConfigError("out_dir must differ from every site csv path");
  }
}

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  Section root(doc, "config");

  if (const json* v = root.find("sites")) {
    if (!v->is_array()) root.fail("sites", "expected an array");
    std::size_t i = 0;
    for (const auto& item : *v) {
      Section s(item, "config.sites[" + std::to_string(i++) + "]");
      SiteConfig site;
      std::string csv;
      s.string("id", site.id);
      s.number("latitude", site.latitude);
      s.number("longitude", site.longitude);
      s.string("csv", csv);
      s.finish();
      if (!csv.empty()) {
        site.csv = csv;
        if (site.csv.is_relative() && !base_dir.empty()) site.csv = base_dir / site.csv;
      }
      c.sites.push_back(std::move(site));
    }
  }
  with_section(root, "split", [&](Section& s) {
    s.year_set("train_years", c.split.train_years);
    s.year_set("test_years", c.split.test_years);
  });
  root.unsigned_int("window_length", c.window_length);
  with_section(root, "model", [&](Section& s) {
    std::string cell = std::string(cell_name(c.model.cell));
    std::string init = init_name(c.model.init);
    s.string("cell", cell);
    c.model.cell = cell_from(cell);
    s.unsigned_list("layers", c.model.layers);
    s.number("dropout", c.model.dropout);
    s.string("init", init);
    if (init == "sqrt_n") {
      c.model.init = InitScheme::kSqrtFeatures;
    } else if (init == "inv_sqrt_n") {
      c.model.init = InitScheme::kInvSqrtFeatures;
    } else {
      s.fail("init", "expected sqrt_n or inv_sqrt_n");
    }
  });
  with_section(root, "training", [&](Section& s) {
    s.unsigned_int("epochs", c.training.epochs);
    s.unsigned_int("batch_size", c.training.batch_size);
    s.number("learning_rate", c.training.learning_rate);
    s.number("beta1", c.training.adam.beta1);
    s.number("beta2", c.training.adam.beta2);
    s.number("epsilon", c.training.adam.epsilon);
    std::string selection = selection_name(c.training.selection);
    s.string("selection", selection);
    if (selection == "test") {
      c.training.selection = Selection::kTest;
    } else if (selection == "validation") {
      c.training.selection = Selection::kValidation;
    } else {
      s.fail("selection", "expected test or validation");
    }
    s.number("validation_fraction", c.training.validation_fraction);
  });
  with_section(root, "hyperband", [&](Section& s) {
    s.unsigned_int("max_resource", c.hyperband.max_resource);
    s.unsigned_int("eta", c.hyperband.eta);
    s.unsigned_int("min_layers", c.hyperband.min_layers);
    s.unsigned_int("max_layers", c.hyperband.max_layers);
    s.unsigned_list("units_grid", c.hyperband.units_grid);
    s.number("lr_min", c.hyperband.lr_min);
    s.number("lr_max", c.hyperband.lr_max);
    std::string rounding = rounding_name(c.hyperband.rounding);
    s.string("rounding", rounding);
    if (rounding == "integer") {
      c.hyperband.rounding = BracketRounding::kIntegerRatio;
    } else if (rounding == "real") {
      c.hyperband.rounding = BracketRounding::kRealCeil;
    } else {
      s.fail("rounding", "expected integer or real");
    }
  });
  with_section(root, "extremes", [&](Section& s) {
    s.number("q", c.extremes.q);
    s.unsigned_int("min_run", c.extremes.min_run);
    std::string tail = tail_name(c.extremes.tail);
    s.string("tail_mode", tail);
    if (tail == "all") {
      c.extremes.tail = TailMode::kAll;
    } else if (tail == "negative_only") {
      c.extremes.tail = TailMode::kNegativeOnly;
    } else {
      s.fail("tail_mode", "expected all or negative_only");
    }
  });
  with_section(root, "quality", [&](Section& s) {
    s.number("qc_min", c.quality.qc_min);
    s.number("valid_min", c.quality.valid_min);
  });
  with_section(root, "pca", [&](Section& s) {
    s.boolean("standardize", c.pca.options.standardize);
    if (const json* k = s.find("k")) {
      if (k->is_null()) {
        c.pca.options.k.reset();
      } else if (k->is_number_unsigned()) {
        c.pca.options.k = k->get<std::size_t>();
      } else {
        s.fail("k", "expected null or a positive integer");
      }
    }
    s.number("variance_target", c.pca.options.variance_target);
    s.unsigned_int("max_components", c.pca.options.max_components);
    s.string("input_prefix", c.pca.input_prefix);
  });
  with_section(root, "radiation", [&](Section& s) {
    s.number("tau", c.radiation.tau);
    s.date("start", c.radiation.start);
    s.date("end", c.radiation.end);
  });
  with_section(root, "importance", [&](Section& s) {
    s.unsigned_int("repetitions", c.importance.repetitions);
    std::string g = granularity_name(c.importance.granularity);
    s.string("granularity", g);
    if (g == "block") {
      c.importance.granularity = PermutationGranularity::kSampleBlock;
    } else if (g == "timestep") {
      c.importance.granularity = PermutationGranularity::kTimestep;
    } else {
      s.fail("granularity", "expected block or timestep");
    }
  });
  with_section(root, "synth", [&](Section& s) { read_synth(s, c.synth); });
  root.unsigned_int("seed", c.seed);
  with_section(root, "paths", [&](Section& s) {
    std::string out = c.out_dir.string();
    s.string("out_dir", out);
    c.out_dir = out;
    if (c.out_dir.is_relative() && !base_dir.empty()) c.out_dir = base_dir / c.out_dir;
  });
  root.finish();

  try {
    c.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return parse_config(text, path.parent_path());
}

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["sites"] = json::array();
  for (const auto& s : c.sites) {
    j["sites"].push_back({{"id", s.id},
                          {"latitude", s.latitude},
                          {"longitude", s.longitude},
                          {"csv", s.csv.string()}});
  }
  j["split"] = {{"train_years", c.split.train_years}, {"test_years", c.split.test_years}};
  j["window_length"] = c.window_length;
  j["model"] = {{"cell", std::string(cell_name(c.model.cell))},
                {"layers", c.model.layers},
                {"dropout", c.model.dropout},
                {"init", init_name(c.model.init)}};
  j["training"] = {{"epochs", c.training.epochs},
                   {"batch_size", c.training.batch_size},
                   {"learning_rate", c.training.learning_rate},
                   {"beta1", c.training.adam.beta1},
                   {"beta2", c.training.adam.beta2},
                   {"epsilon", c.training.adam.epsilon},
                   {"selection", selection_name(c.training.selection)},
                   {"validation_fraction", c.training.validation_fraction}};
  j["hyperband"] = {{"max_resource", c.hyperband.max_resource},
                    {"eta", c.hyperband.eta},
                    {"min_layers", c.hyperband.min_layers},
                    {"max_layers", c.hyperband.max_layers},
                    {"units_grid", c.hyperband.units_grid},
                    {"lr_min", c.hyperband.lr_min},
                    {"lr_max", c.hyperband.lr_max},
                    {"rounding", rounding_name(c.hyperband.rounding)}};
  j["extremes"] = {{"q", c.extremes.q},
                   {"min_run", c.extremes.min_run},
                   {"tail_mode", tail_name(c.extremes.tail)}};
  j["quality"] = {{"qc_min", c.quality.qc_min}, {"valid_min", c.quality.valid_min}};
  j["pca"] = {{"standardize", c.pca.options.standardize},
              {"k", c.pca.options.k ? json(*c.pca.options.k) : json(nullptr)},
              {"variance_target", c.pca.options.variance_target},
              {"max_components", c.pca.options.max_components},
              {"input_prefix", c.pca.input_prefix}};
  j["radiation"] = {{"tau", c.radiation.tau},
                    {"start", c.radiation.start.to_string()},
                    {"end", c.radiation.end.to_string()}};
  j["importance"] = {{"repetitions", c.importance.repetitions},
                     {"granularity", granularity_name(c.importance.granularity)}};
  json droughts = json::array();
  for (const auto& d : c.synth.droughts) {
    droughts.push_back({{"year_offset", d.year_offset},
                        {"start_doy", d.start_doy},
                        {"length", d.length},
                        {"depth", d.depth}});
  }
  j["synth"] = {{"site_id", c.synth.site_id},
                {"start_year", c.synth.start_year},
                {"n_years", c.synth.n_years},
                {"latitude", c.synth.latitude},
                {"longitude", c.synth.longitude},
                {"amplitude", c.synth.amplitude},
                {"noise_std", c.synth.noise_std},
                {"tau", c.synth.tau},
                {"droughts", droughts},
                {"greenness_noise", c.synth.greenness_noise},
                {"stress_noise", c.synth.stress_noise},
                {"nuisance_features", c.synth.nuisance_features},
                {"seed", c.synth.seed}};
  j["seed"] = c.seed;
  j["paths"] = {{"out_dir", c.out_dir.string()}};
  return j.dump(2);
}

}  // namespace fluxrnn
