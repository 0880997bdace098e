#include "mbsts/config.hpp"

#include "mbsts/csv.hpp"
#include "mbsts/error.hpp"

#include <cstdio>
#include <set>

namespace mbsts {
namespace fs = std::filesystem;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v, where);
  out = v;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return fs::absolute(path.is_absolute() ? path : base / path).lexically_normal();
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json spec_to_json(const ModelSpec& spec) {
  json series = json::array();
  for (const auto& s : spec.series) {
    json e;
    e["trend"] = s.has_trend;
    e["slope"] = s.has_slope;
    if (s.has_slope) {
      e["slope_learning_rate"] = s.slope_learning_rate;
      e["long_term_slope"] = s.long_term_slope;
    }
    if (s.seasonal_period) e["seasonal_period"] = *s.seasonal_period;
    if (s.cycle_frequency) {
      e["cycle_frequency"] = *s.cycle_frequency;
      e["cycle_damping"] = *s.cycle_damping;
    }
    series.push_back(e);
  }
  return json{{"series", series}, {"predictor_counts", spec.predictor_counts}};
}

ModelSpec spec_from_json(const json& j, const std::optional<std::vector<int>>& predictor_counts) {
  check_keys(j, "model", {"series", "predictor_counts"});
  if (!j.contains("series") || !j.at("series").is_array()) throw ConfigError("model.series must be a list");
  ModelSpec spec;
  int i = 0;
  for (const auto& e : j.at("series")) {
    const std::string where = "model.series[" + std::to_string(i++) + "]";
    check_keys(e, where,
               {"trend", "slope", "slope_learning_rate", "long_term_slope", "seasonal_period", "cycle_frequency",
                "cycle_damping"});
    ComponentConfig c;
    read(e, "trend", c.has_trend, where);
    read(e, "slope", c.has_slope, where);
    read(e, "slope_learning_rate", c.slope_learning_rate, where);
    read(e, "long_term_slope", c.long_term_slope, where);
    read_opt(e, "seasonal_period", c.seasonal_period, where);
    read_opt(e, "cycle_frequency", c.cycle_frequency, where);
    read_opt(e, "cycle_damping", c.cycle_damping, where);
    spec.series.push_back(c);
  }
  if (predictor_counts) {
    spec.predictor_counts = *predictor_counts;
  } else {
    read(j, "predictor_counts", spec.predictor_counts, "model");
  }
  spec.validate();
  return spec;
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"seed", "model", "data", "priors", "initial_state", "train", "simulate", "forecast", "evaluate",
              "report", "target"});
  RunConfig cfg;
  read(j, "seed", cfg.seed, "config");
  if (j.contains("model")) cfg.model = j.at("model");

  if (j.contains("data")) {
    const auto& d = j.at("data");
    check_keys(d, "data", {"date_column", "targets", "target_columns", "predictors"});
    cfg.has_data = true;
    read(d, "date_column", cfg.data.date_column, "data");
    std::string targets;
    read(d, "targets", targets, "data");
    if (targets.empty()) throw ConfigError("data.targets is required");
    cfg.data.targets_path = resolve(base_dir, targets);
    read(d, "target_columns", cfg.data.target_columns, "data");
    if (d.contains("predictors")) {
      int i = 0;
      for (const auto& p : d.at("predictors")) {
        const std::string where = "data.predictors[" + std::to_string(i++) + "]";
        check_keys(p, where, {"path", "columns"});
        std::string path;
        read(p, "path", path, where);
        cfg.data.predictor_paths.push_back(resolve(base_dir, path));
        std::vector<PredictorColumn> cols;
        if (p.contains("columns")) {
          for (const auto& c : p.at("columns")) {
            if (c.is_string()) {
              cols.push_back({c.get<std::string>(), 0});
            } else {
              check_keys(c, where + ".columns", {"name", "lag"});
              PredictorColumn pc;
              read(c, "name", pc.name, where);
              read(c, "lag", pc.lag, where);
              cols.push_back(pc);
            }
          }
        }
        cfg.data.predictor_columns.push_back(std::move(cols));
      }
    }
    if (cfg.data.predictor_columns.empty()) {
      cfg.data.predictor_columns.resize(cfg.data.target_columns.size());
      cfg.data.predictor_paths.resize(cfg.data.target_columns.size());
    }
  }

  if (j.contains("priors")) {
    const auto& p = j.at("priors");
    check_keys(p, "priors",
               {"expected_model_size", "expected_r2", "v0_excess", "kappa", "omega", "component_sigma_fraction",
                "component_sample_size"});
    read(p, "expected_model_size", cfg.priors.expected_model_size, "priors");
    read(p, "expected_r2", cfg.priors.expected_r2, "priors");
    read(p, "v0_excess", cfg.priors.v0_excess, "priors");
    read(p, "kappa", cfg.priors.kappa, "priors");
    read(p, "omega", cfg.priors.omega, "priors");
    read(p, "component_sigma_fraction", cfg.priors.component_sigma_fraction, "priors");
    read(p, "component_sample_size", cfg.priors.component_sample_size, "priors");
  }
  if (j.contains("initial_state")) {
    const auto& p = j.at("initial_state");
    check_keys(p, "initial_state", {"mean", "variance"});
    read(p, "mean", cfg.initial_state.mean, "initial_state");
    read(p, "variance", cfg.initial_state.variance, "initial_state");
  }
  if (j.contains("train")) {
    const auto& p = j.at("train");
    check_keys(p, "train", {"total_draws", "burn_in", "chains", "keep_state_paths"});
    read(p, "total_draws", cfg.train.total_draws, "train");
    read(p, "burn_in", cfg.train.burn_in, "train");
    read(p, "chains", cfg.train.chains, "train");
    read(p, "keep_state_paths", cfg.train.keep_state_paths, "train");
  }
  if (j.contains("simulate")) {
    const auto& p = j.at("simulate");
    check_keys(p, "simulate", {"model", "n", "correlation", "shuffle_fraction", "holdout"});
    read(p, "model", cfg.simulate.model, "simulate");
    read(p, "n", cfg.simulate.n, "simulate");
    read_opt(p, "correlation", cfg.simulate.correlation, "simulate");
    read(p, "shuffle_fraction", cfg.simulate.shuffle_fraction, "simulate");
    read(p, "holdout", cfg.simulate.holdout, "simulate");
  }
  if (j.contains("forecast")) {
    const auto& p = j.at("forecast");
    check_keys(p, "forecast", {"draws", "horizon", "levels", "future_predictors"});
    std::string draws;
    read(p, "draws", draws, "forecast");
    cfg.forecast.draws = resolve(base_dir, draws);
    read(p, "horizon", cfg.forecast.horizon, "forecast");
    read(p, "levels", cfg.forecast.levels, "forecast");
    std::vector<std::string> fut;
    read(p, "future_predictors", fut, "forecast");
    for (const auto& f : fut) cfg.forecast.future_predictors.push_back(resolve(base_dir, f));
  }
  if (j.contains("evaluate")) {
    const auto& p = j.at("evaluate");
    check_keys(p, "evaluate", {"initial_train_len", "initial_train_fraction", "horizon_steps", "variants", "warm_start"});
    read_opt(p, "initial_train_len", cfg.evaluate.initial_train_len, "evaluate");
    read(p, "initial_train_fraction", cfg.evaluate.initial_train_fraction, "evaluate");
    read_opt(p, "horizon_steps", cfg.evaluate.horizon_steps, "evaluate");
    if (p.contains("variants")) {
      std::vector<std::string> names;
      read(p, "variants", names, "evaluate");
      cfg.evaluate.variants.clear();
      for (const auto& n : names) cfg.evaluate.variants.push_back(parse_variant(n));
    }
    read(p, "warm_start", cfg.evaluate.warm_start, "evaluate");
  }
  if (j.contains("report")) {
    const auto& p = j.at("report");
    check_keys(p, "report", {"inputs", "credible_level"});
    std::vector<std::string> in;
    read(p, "inputs", in, "report");
    for (const auto& f : in) cfg.report.inputs.push_back(resolve(base_dir, f));
    read(p, "credible_level", cfg.report.credible_level, "report");
  }
  if (j.contains("target")) {
    const auto& p = j.at("target");
    check_keys(p, "target", {"prices", "k", "column"});
    std::string prices;
    read(p, "prices", prices, "target");
    cfg.target.prices = resolve(base_dir, prices);
    read(p, "k", cfg.target.k, "target");
    read(p, "column", cfg.target.column, "target");
  }
  cfg.train.seed = cfg.seed;
  cfg.train.initial_state = cfg.initial_state;
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(j, fs::absolute(path).parent_path());
}

json to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  if (!cfg.model.is_null()) j["model"] = cfg.model;
  if (cfg.has_data) {
    json preds = json::array();
    for (std::size_t i = 0; i < cfg.data.predictor_columns.size(); ++i) {
      json cols = json::array();
      for (const auto& c : cfg.data.predictor_columns[i]) cols.push_back({{"name", c.name}, {"lag", c.lag}});
      const auto path = i < cfg.data.predictor_paths.size() ? cfg.data.predictor_paths[i].string() : std::string();
      preds.push_back({{"path", path}, {"columns", cols}});
    }
    j["data"] = {{"date_column", cfg.data.date_column},
                 {"targets", cfg.data.targets_path.string()},
                 {"target_columns", cfg.data.target_columns},
                 {"predictors", preds}};
  }
  j["priors"] = {{"expected_model_size", cfg.priors.expected_model_size},
                 {"expected_r2", cfg.priors.expected_r2},
                 {"v0_excess", cfg.priors.v0_excess},
                 {"kappa", cfg.priors.kappa},
                 {"omega", cfg.priors.omega},
                 {"component_sigma_fraction", cfg.priors.component_sigma_fraction},
                 {"component_sample_size", cfg.priors.component_sample_size}};
  j["initial_state"] = {{"mean", cfg.initial_state.mean}, {"variance", cfg.initial_state.variance}};
  j["train"] = {{"total_draws", cfg.train.total_draws},
                {"burn_in", cfg.train.burn_in},
                {"chains", cfg.train.chains},
                {"keep_state_paths", cfg.train.keep_state_paths}};
  j["simulate"] = {{"model", cfg.simulate.model},
                   {"n", cfg.simulate.n},
                   {"shuffle_fraction", cfg.simulate.shuffle_fraction},
                   {"holdout", cfg.simulate.holdout}};
  if (cfg.simulate.correlation) j["simulate"]["correlation"] = *cfg.simulate.correlation;
  json fut = json::array();
  for (const auto& f : cfg.forecast.future_predictors) fut.push_back(f.string());
  j["forecast"] = {{"draws", cfg.forecast.draws.string()},
                   {"horizon", cfg.forecast.horizon},
                   {"levels", cfg.forecast.levels},
                   {"future_predictors", fut}};
  json variants = json::array();
  for (auto v : cfg.evaluate.variants) variants.push_back(variant_name(v));
  j["evaluate"] = {{"initial_train_fraction", cfg.evaluate.initial_train_fraction},
                   {"variants", variants},
                   {"warm_start", cfg.evaluate.warm_start}};
  if (cfg.evaluate.initial_train_len) j["evaluate"]["initial_train_len"] = *cfg.evaluate.initial_train_len;
  if (cfg.evaluate.horizon_steps) j["evaluate"]["horizon_steps"] = *cfg.evaluate.horizon_steps;
  json inputs = json::array();
  for (const auto& f : cfg.report.inputs) inputs.push_back(f.string());
  j["report"] = {{"inputs", inputs}, {"credible_level", cfg.report.credible_level}};
  j["target"] = {{"prices", cfg.target.prices.string()}, {"k", cfg.target.k}, {"column", cfg.target.column}};
  return j;
}

}  // namespace mbsts
