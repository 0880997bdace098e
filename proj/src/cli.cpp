#include "mbsts/cli.hpp"

#include "mbsts/bench.hpp"
#include "mbsts/csv.hpp"
#include "mbsts/draw_store.hpp"
#include "mbsts/error.hpp"
#include "mbsts/forecast.hpp"
#include "mbsts/format.hpp"
#include "mbsts/ingest.hpp"
#include "mbsts/simgen.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <iostream>
#include <map>
#include <set>

namespace mbsts {
namespace fs = std::filesystem;

namespace {

// Stream identifiers for the master seed.
constexpr std::uint64_t kForecastStream = 0x666f7265ull;

class Staging {
 public:
  explicit Staging(fs::path out) : out_(fs::absolute(std::move(out)).lexically_normal()) {
    if (out_.filename().empty()) out_ = out_.parent_path();
    if (fs::exists(out_) && !replaceable(out_)) {
      throw IoError(out_.string() + " exists and is not an earlier artifact directory; refusing to overwrite");
    }
    stage_ = out_.parent_path() / ("." + out_.filename().string() + ".tmp");
    fs::remove_all(stage_);
    fs::create_directories(stage_);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(stage_, ec);
    }
  }

  const fs::path& dir() const { return stage_; }

  void commit() {
    if (fs::exists(out_)) fs::remove_all(out_);
    fs::rename(stage_, out_);
    committed_ = true;
  }

 private:
  static bool replaceable(const fs::path& p) {
    return fs::is_directory(p) && (fs::is_empty(p) || fs::exists(p / "manifest.json"));
  }

  fs::path out_;
  fs::path stage_;
  bool committed_ = false;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg, json details,
                    json wall_clock) {
  const json resolved = to_json(cfg);
  json m;
  m["tool"] = "mbsts";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = cfg.seed;
  m["config_hash"] = fnv1a_hex(resolved.dump());
  m["config"] = resolved;
  m["details"] = std::move(details);
  m["wall_clock"] = std::move(wall_clock);
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

struct TrainingData {
  Panel panel;
  ModelSpec spec;
  std::vector<std::vector<std::string>> names;
};

TrainingData load_training_data(const RunConfig& cfg) {
  if (!cfg.has_data) throw ConfigError("no data section: pass --data or a config with a data section");
  if (cfg.model.is_null()) throw ConfigError("no model section in the configuration");
  TrainingData td;
  td.panel = load_csv_panel(cfg.data);
  std::vector<int> counts;
  for (const auto& cols : cfg.data.predictor_columns) {
    counts.push_back(static_cast<int>(cols.size()));
    std::vector<std::string> names;
    for (const auto& c : cols) names.push_back(c.lag > 0 ? c.name + "_lag" + std::to_string(c.lag) : c.name);
    td.names.push_back(std::move(names));
  }
  td.spec = spec_from_json(cfg.model, counts);
  if (td.spec.m() != static_cast<int>(cfg.data.target_columns.size())) {
    throw ConfigError("model lists " + std::to_string(td.spec.m()) + " series but the data declares " +
                      std::to_string(cfg.data.target_columns.size()) + " target columns");
  }
  return td;
}

json dims(const TrainingData& td) {
  return {{"n", td.panel.y.rows()},
          {"m", td.spec.m()},
          {"predictors", td.spec.total_predictors()},
          {"state_dim", td.spec.state_dim()},
          {"rows_dropped_for_lags", td.panel.dropped_for_lags}};
}

void write_dataset_files(const fs::path& dir, const SyntheticDataset& ds, Eigen::Index begin, Eigen::Index rows) {
  std::vector<std::string> dates;
  for (Eigen::Index t = begin; t < begin + rows; ++t) dates.push_back(std::to_string(t + 1));
  auto header = numbered("y", ds.spec.m());
  header.insert(header.begin(), "date");
  write_text(dir / "targets.csv", matrix_to_csv(header, ds.y.middleRows(begin, rows), dates));
  for (int i = 0; i < ds.spec.m(); ++i) {
    auto h = ds.predictor_names[static_cast<std::size_t>(i)];
    h.insert(h.begin(), "date");
    write_text(dir / ("predictors_" + std::to_string(i + 1) + ".csv"),
               matrix_to_csv(h, ds.x_blocks[static_cast<std::size_t>(i)].middleRows(begin, rows), dates));
  }
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

void run_simulate(const RunConfig& cfg, const fs::path& dir, json& details) {
  const auto& s = cfg.simulate;
  if (s.n < 2) throw ConfigError("simulate.n must be at least 2");
  if (s.holdout < 0) throw ConfigError("simulate.holdout must be non-negative");
  SimOptions opt;
  opt.correlation = s.correlation;
  opt.shuffle_fraction = s.shuffle_fraction;
  const auto ds = generate_model(s.model, s.n + s.holdout, cfg.seed, opt);
  write_dataset_files(dir, ds, 0, s.n);
  if (s.holdout > 0) {
    fs::create_directories(dir / "future");
    write_dataset_files(dir / "future", ds, s.n, s.holdout);
  }

  json truth;
  truth["model_id"] = ds.model_id;
  truth["seed"] = ds.seed;
  truth["model"] = spec_to_json(ds.spec);
  truth["predictor_names"] = ds.predictor_names;
  truth["beta"] = std::vector<double>(ds.beta.data(), ds.beta.data() + ds.beta.size());
  truth["sigma_eps"] = matrix_json(ds.sigma_eps);
  json theta = json::object();
  for (const auto& p : variance_parameters(ds.spec)) {
    theta[std::string(component_name(p.kind)) + "_" + std::to_string(p.series + 1)] = *ds.theta.at(p.series, p.kind);
  }
  truth["theta"] = theta;
  json gamma = json::array();
  for (const auto& b : ds.gamma_true.bits) gamma.push_back(std::vector<int>(b.begin(), b.end()));
  truth["gamma_true"] = gamma;
  write_text(dir / "truth.json", truth.dump(2) + "\n");

  // A ready-to-train configuration with paths relative to this directory.
  json model = spec_to_json(ds.spec);
  model.erase("predictor_counts");
  json preds = json::array();
  json future = json::array();
  for (int i = 0; i < ds.spec.m(); ++i) {
    preds.push_back({{"path", "predictors_" + std::to_string(i + 1) + ".csv"},
                     {"columns", ds.predictor_names[static_cast<std::size_t>(i)]}});
    future.push_back("future/predictors_" + std::to_string(i + 1) + ".csv");
  }
  json train_cfg{{"seed", cfg.seed},
                 {"model", model},
                 {"data", {{"targets", "targets.csv"}, {"target_columns", numbered("y", ds.spec.m())}, {"predictors", preds}}}};
  if (s.holdout > 0) train_cfg["forecast"] = {{"horizon", s.holdout}, {"future_predictors", future}};
  write_text(dir / "config.json", train_cfg.dump(2) + "\n");
  details = {{"model_id", s.model}, {"n", s.n}, {"holdout", s.holdout}, {"m", ds.spec.m()},
             {"predictors", ds.spec.total_predictors()}};
}

void run_train(const RunConfig& cfg, const fs::path& dir, json& details) {
  const auto td = load_training_data(cfg);
  const PriorSet priors = make_priors(td.spec, td.panel.y, cfg.priors);
  const auto draws = train(td.panel.y, td.panel.x_blocks, td.spec, priors, cfg.train);
  write_draw_store(dir, draws, td.names);
  details = dims(td);
  details["retained_draws"] = draws.size();
}

std::vector<fs::path> future_files(const ForecastSettings& f, int m) {
  if (f.future_predictors.size() == 1 && fs::is_directory(f.future_predictors.front())) {
    std::vector<fs::path> out;
    for (int i = 0; i < m; ++i) out.push_back(f.future_predictors.front() / ("predictors_" + std::to_string(i + 1) + ".csv"));
    return out;
  }
  return f.future_predictors;
}

void run_forecast(const RunConfig& cfg, const fs::path& dir, json& details) {
  const auto& f = cfg.forecast;
  if (f.draws.empty()) throw ConfigError("forecast needs a draw store (--draws)");
  if (f.horizon < 1) throw ConfigError("forecast horizon must be at least 1");
  const auto stored = read_draw_store(f.draws);
  const auto& spec = stored.draws.spec;
  const auto files = future_files(f, spec.m());
  std::vector<MatrixXd> x_future;
  for (int i = 0; i < spec.m(); ++i) {
    const auto& names = stored.predictor_names[static_cast<std::size_t>(i)];
    if (names.empty()) {
      x_future.emplace_back(f.horizon, 0);
      continue;
    }
    if (static_cast<int>(files.size()) <= i) {
      throw ConfigError("future predictors missing for series " + std::to_string(i + 1) + " (--future)");
    }
    x_future.push_back(read_csv(files[static_cast<std::size_t>(i)]).numeric(names));
  }
  Rng rng(derive_seed(cfg.seed, kForecastStream));
  const auto result = summarize(predict(stored.draws, spec, x_future, f.horizon, rng), f.levels);

  const int m = spec.m();
  std::string samples = "draw,step,series,value\n";
  for (std::size_t r = 0; r < result.samples.size(); ++r) {
    for (int h = 0; h < f.horizon; ++h) {
      for (int i = 0; i < m; ++i) {
        samples += std::to_string(r) + "," + std::to_string(h + 1) + "," + std::to_string(i + 1) + "," +
                   format_double(result.samples[r](h, i)) + "\n";
      }
    }
  }
  write_text(dir / "forecast_samples.csv", samples);

  std::string summary = "step,series,mean";
  for (double level : f.levels) summary += ",lower_" + format_double(level) + ",upper_" + format_double(level);
  summary += "\n";
  for (int h = 0; h < f.horizon; ++h) {
    for (int i = 0; i < m; ++i) {
      summary += std::to_string(h + 1) + "," + std::to_string(i + 1) + "," + format_double(result.mean(h, i));
      for (double level : f.levels) {
        summary += "," + format_double(result.quantiles.at(0.5 * (1.0 - level))(h, i));
        summary += "," + format_double(result.quantiles.at(0.5 * (1.0 + level))(h, i));
      }
      summary += "\n";
    }
  }
  write_text(dir / "forecast_summary.csv", summary);
  details = {{"draws", stored.draws.size()}, {"horizon", f.horizon}, {"m", m}};
}

void run_evaluate(const RunConfig& cfg, const fs::path& dir, json& details, json& wall) {
  const auto td = load_training_data(cfg);
  const auto n = td.panel.y.rows();
  EvalConfig ec;
  ec.initial_train_len = cfg.evaluate.initial_train_len
                             ? *cfg.evaluate.initial_train_len
                             : static_cast<int>(std::floor(cfg.evaluate.initial_train_fraction * static_cast<double>(n)));
  ec.horizon_steps = cfg.evaluate.horizon_steps ? *cfg.evaluate.horizon_steps : static_cast<int>(n) - ec.initial_train_len;
  ec.variants = cfg.evaluate.variants;
  ec.train = cfg.train;
  ec.priors = cfg.priors;
  ec.warm_start = cfg.evaluate.warm_start;
  const auto report = growing_window_eval(td.panel.y, td.panel.x_blocks, td.spec, ec);

  write_text(dir / "eval.csv", report.to_csv());
  write_text(dir / "comparison.csv", compare_report({report}).to_csv());
  std::string fc = "step,row,variant";
  for (int i = 0; i < td.spec.m(); ++i) fc += ",y" + std::to_string(i + 1);
  fc += "\n";
  for (const auto& v : report.variants) {
    for (int s = 0; s < report.steps(); ++s) {
      fc += std::to_string(s + 1) + "," + td.panel.dates[static_cast<std::size_t>(report.target_rows[static_cast<std::size_t>(s)])] + "," + v.name;
      for (Eigen::Index i = 0; i < v.forecasts.cols(); ++i) fc += "," + format_double(v.forecasts(s, i));
      fc += "\n";
    }
  }
  write_text(dir / "forecasts.csv", fc);
  details = dims(td);
  details["initial_train_len"] = ec.initial_train_len;
  details["horizon_steps"] = ec.horizon_steps;
  json refits = json::object();
  for (const auto& v : report.variants) refits[v.name] = v.refit_seconds;
  wall["refit_seconds"] = refits;
}

EvalReport read_eval_csv(const fs::path& path) {
  const auto table = read_csv(path);
  const auto variant = table.strings("variant");
  const MatrixXd vals = table.numeric({"step", "pe"});
  EvalReport report;
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> pe;
  for (std::size_t r = 0; r < variant.size(); ++r) {
    if (!pe.count(variant[r])) order.push_back(variant[r]);
    pe[variant[r]].push_back(vals(static_cast<Eigen::Index>(r), 1));
  }
  if (!order.empty()) {
    for (std::size_t s = 0; s < pe[order.front()].size(); ++s) report.target_rows.push_back(static_cast<int>(s));
  }
  for (const auto& name : order) report.add_external(name, pe[name]);
  return report;
}

std::string posterior_summary(const StoredDraws& stored, double level) {
  const auto& d = stored.draws;
  std::string out = "parameter,mean,sd,lower,upper,inclusion\n";
  const double lo = 0.5 * (1.0 - level);
  const double hi = 0.5 * (1.0 + level);
  auto add = [&](const std::string& name, const VectorXd& v, const std::string& inclusion) {
    const double mean = v.size() ? v.mean() : 0.0;
    const double sd = v.size() > 1 ? std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1)) : 0.0;
    std::vector<double> vals(v.data(), v.data() + v.size());
    out += name + "," + format_double(mean) + "," + format_double(sd) + "," + format_double(quantile(vals, lo)) + "," +
           format_double(quantile(vals, hi)) + "," + inclusion + "\n";
  };
  const auto names = beta_column_names(stored.predictor_names);
  for (Eigen::Index k = 0; k < d.beta.cols(); ++k) {
    add("beta:" + names[static_cast<std::size_t>(k)], d.beta.col(k), format_double(d.gamma.col(k).mean()));
  }
  const auto tnames = theta_column_names(d.spec);
  for (Eigen::Index p = 0; p < d.theta.cols(); ++p) add("theta:" + tnames[static_cast<std::size_t>(p)], d.theta.col(p), "");
  const int m = d.spec.m();
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      VectorXd v(d.size());
      for (int r = 0; r < d.size(); ++r) v(r) = d.sigma_eps[static_cast<std::size_t>(r)](i, j);
      add("sigma_eps:" + std::to_string(i + 1) + "_" + std::to_string(j + 1), v, "");
    }
  }
  return out;
}

void run_report(const RunConfig& cfg, const fs::path& dir, json& details) {
  if (cfg.report.inputs.empty()) throw ConfigError("report needs at least one input directory");
  if (!(cfg.report.credible_level > 0.0 && cfg.report.credible_level < 1.0)) {
    throw ConfigError("credible_level must lie in (0, 1)");
  }
  std::vector<EvalReport> evals;
  int summaries = 0;
  for (const auto& in : cfg.report.inputs) {
    if (fs::exists(in / "eval.csv")) {
      evals.push_back(read_eval_csv(in / "eval.csv"));
    } else if (fs::exists(in / "model.json")) {
      const auto stored = read_draw_store(in);
      if (stored.draws.size() == 0) throw ConfigError(in.string() + ": draw store is empty");
      write_text(dir / ("posterior_summary_" + std::to_string(++summaries) + ".csv"),
                 posterior_summary(stored, cfg.report.credible_level));
    } else {
      throw IoError(in.string() + " holds neither eval.csv nor a draw store");
    }
  }
  if (!evals.empty()) {
    const auto table = compare_report(evals);
    write_text(dir / "comparison.csv", table.to_csv());
    std::cout << table.to_text();
  }
  details = {{"evaluations", evals.size()}, {"posterior_summaries", summaries}};
}

void run_target(const RunConfig& cfg, const fs::path& dir, json& details) {
  if (cfg.target.prices.empty()) throw ConfigError("target needs a prices file (--prices)");
  const auto panel = load_price_panel(cfg.target.prices);
  const auto ts = max_log_return(panel, cfg.target.k);
  write_text(dir / "targets.csv", matrix_to_csv({"date", cfg.target.column}, ts.values, ts.dates));
  std::cerr << "target: dropped " << ts.dropped << " trailing rows without a full " << cfg.target.k << "-day window\n";
  details = {{"rows", ts.values.size()}, {"dropped_rows", ts.dropped}, {"k", cfg.target.k}};
}

}  // namespace

void execute(const std::string& command, const RunConfig& cfg, const fs::path& out) {
  static const std::set<std::string> known{"simulate", "train", "forecast", "evaluate", "report", "target"};
  if (!known.count(command)) throw ConfigError("unknown command '" + command + "'");
  cfg.train.validate();
  cfg.priors.validate();

  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Staging stage(out);
  json details = json::object();
  json wall = json::object();
  try {
    if (command == "simulate") run_simulate(cfg, stage.dir(), details);
    if (command == "train") run_train(cfg, stage.dir(), details);
    if (command == "forecast") run_forecast(cfg, stage.dir(), details);
    if (command == "evaluate") run_evaluate(cfg, stage.dir(), details, wall);
    if (command == "report") run_report(cfg, stage.dir(), details);
    if (command == "target") run_target(cfg, stage.dir(), details);
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
  wall["started_utc"] = started;
  wall["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(stage.dir(), command, cfg, std::move(details), std::move(wall));
  stage.commit();
}

namespace {

struct Flags {
  std::string config, data, out, draws_dir, future, manifest, prices, column;
  std::uint64_t seed = 0;
  int model = 0, n = 0, holdout = 0, total_draws = 0, burn_in = 0, chains = 0, horizon = 0;
  int initial_train_len = 0, steps = 0, k = 0;
  double correlation = 0.0, shuffle_fraction = 0.0, credible_level = 0.0;
  bool no_state_paths = false, warm_start = false;
  std::vector<double> levels;
  std::vector<std::string> variants, inputs;
};

bool given(const CLI::App& sub, const std::string& name) {
  const auto* opt = sub.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RunConfig base_config(const Flags& f, const CLI::App& sub) {
  RunConfig cfg;
  json j = json::object();
  fs::path base = fs::current_path();
  if (!f.config.empty()) {
    try {
      j = json::parse(read_text(f.config));
    } catch (const json::parse_error& e) {
      throw ConfigError(f.config + ": " + e.what());
    }
    base = fs::absolute(f.config).parent_path();
  }
  cfg = parse_run_config(j, base);
  if (given(sub, "--data")) {
    const fs::path data_cfg_path = fs::path(f.data) / "config.json";
    const RunConfig dcfg = load_run_config(data_cfg_path);
    if (!dcfg.has_data) throw ConfigError(data_cfg_path.string() + " has no data section");
    cfg.has_data = true;
    cfg.data = dcfg.data;
    if (cfg.model.is_null()) cfg.model = dcfg.model;
    if (cfg.forecast.future_predictors.empty()) cfg.forecast.future_predictors = dcfg.forecast.future_predictors;
    if (f.config.empty()) {
      cfg.seed = dcfg.seed;
      if (!given(sub, "--horizon")) cfg.forecast.horizon = dcfg.forecast.horizon;
    }
  }
  if (given(sub, "--seed")) cfg.seed = f.seed;
  if (given(sub, "--model")) cfg.simulate.model = f.model;
  if (given(sub, "--n")) cfg.simulate.n = f.n;
  if (given(sub, "--correlation")) cfg.simulate.correlation = f.correlation;
  if (given(sub, "--shuffle-fraction")) cfg.simulate.shuffle_fraction = f.shuffle_fraction;
  if (given(sub, "--holdout")) cfg.simulate.holdout = f.holdout;
  if (given(sub, "--total-draws")) cfg.train.total_draws = f.total_draws;
  if (given(sub, "--burn-in")) cfg.train.burn_in = f.burn_in;
  if (given(sub, "--chains")) cfg.train.chains = f.chains;
  if (given(sub, "--no-state-paths")) cfg.train.keep_state_paths = false;
  if (given(sub, "--draws")) cfg.forecast.draws = fs::absolute(f.draws_dir).lexically_normal();
  if (given(sub, "--horizon")) cfg.forecast.horizon = f.horizon;
  if (given(sub, "--levels")) cfg.forecast.levels = f.levels;
  if (given(sub, "--future")) cfg.forecast.future_predictors = {fs::absolute(f.future).lexically_normal()};
  if (given(sub, "--initial-train-len")) cfg.evaluate.initial_train_len = f.initial_train_len;
  if (given(sub, "--steps")) cfg.evaluate.horizon_steps = f.steps;
  if (given(sub, "--variants")) {
    cfg.evaluate.variants.clear();
    for (const auto& v : f.variants) cfg.evaluate.variants.push_back(parse_variant(v));
  }
  if (given(sub, "--warm-start")) cfg.evaluate.warm_start = true;
  if (given(sub, "--inputs")) {
    cfg.report.inputs.clear();
    for (const auto& i : f.inputs) cfg.report.inputs.push_back(fs::absolute(i).lexically_normal());
  }
  if (given(sub, "--credible-level")) cfg.report.credible_level = f.credible_level;
  if (given(sub, "--prices")) cfg.target.prices = fs::absolute(f.prices).lexically_normal();
  if (given(sub, "--k")) cfg.target.k = f.k;
  if (given(sub, "--column")) cfg.target.column = f.column;
  cfg.train.seed = cfg.seed;
  cfg.train.initial_state = cfg.initial_state;
  // Round-trip through the serialized form so a replayed manifest resolves
  // to exactly the same configuration.
  return parse_run_config(to_json(cfg), "/");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Multivariate Bayesian structural time series: simulate, train, forecast, evaluate"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    s->add_option("--seed", f.seed, "master seed (overrides the config)");
    s->add_option("--out", f.out, "output directory")->required();
  };
  auto training = [&](CLI::App* s) {
    s->add_option("--data", f.data, "dataset directory containing config.json (e.g. simulate output)")
        ->check(CLI::ExistingDirectory);
    s->add_option("--total-draws", f.total_draws, "Gibbs iterations including burn-in");
    s->add_option("--burn-in", f.burn_in, "iterations discarded");
    s->add_option("--chains", f.chains, "independent chains");
  };

  auto* sim = app.add_subcommand("simulate", "generate a dataset from simulation Model 1-7");
  common(sim);
  sim->add_option("--model", f.model, "model id 1-7");
  sim->add_option("--n", f.n, "number of training rows");
  sim->add_option("--correlation", f.correlation, "override the off-diagonal correlation of Sigma_eps");
  sim->add_option("--shuffle-fraction", f.shuffle_fraction, "Model 7: shuffled share of starred predictors");
  sim->add_option("--holdout", f.holdout, "extra rows written to future/ for forecasting");

  auto* tr = app.add_subcommand("train", "run the Gibbs sampler and write a draw store");
  common(tr);
  training(tr);
  tr->add_flag("--no-state-paths", f.no_state_paths, "do not store full state paths");

  auto* fc = app.add_subcommand("forecast", "posterior-predictive forecast from a draw store");
  common(fc);
  fc->add_option("--draws", f.draws_dir, "draw store directory")->check(CLI::ExistingDirectory);
  fc->add_option("--data", f.data, "dataset directory whose config.json lists future predictors")
      ->check(CLI::ExistingDirectory);
  fc->add_option("--horizon", f.horizon, "steps ahead");
  fc->add_option("--future", f.future, "directory with predictors_<i>.csv for the forecast rows");
  fc->add_option("--levels", f.levels, "central band levels, e.g. 0.4 0.9");

  auto* ev = app.add_subcommand("evaluate", "growing-window one-step-ahead comparison");
  common(ev);
  training(ev);
  ev->add_option("--initial-train-len", f.initial_train_len, "rows in the first training window");
  ev->add_option("--steps", f.steps, "number of one-step forecasts");
  ev->add_option("--variants", f.variants, "joint and/or independent");
  ev->add_flag("--warm-start", f.warm_start, "start each refit from the previous final draw");

  auto* rp = app.add_subcommand("report", "comparison tables and posterior summaries");
  common(rp);
  rp->add_option("--inputs", f.inputs, "evaluation or draw-store directories");
  rp->add_option("--credible-level", f.credible_level, "posterior interval level");

  auto* tg = app.add_subcommand("target", "max log-return target from a price file");
  common(tg);
  tg->add_option("--prices", f.prices, "CSV with date, open, high, low, close")->check(CLI::ExistingFile);
  tg->add_option("--k", f.k, "look-ahead window in rows");
  tg->add_option("--column", f.column, "name of the output column");

  auto* rep = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  rep->add_option("--manifest", f.manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", f.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  std::string command;
  try {
    if (rep->parsed()) {
      json m;
      try {
        m = json::parse(read_text(f.manifest));
        command = m.at("command").get<std::string>();
        const auto cfg = parse_run_config(m.at("config"), "/");
        execute(command, cfg, f.out);
      } catch (const json::exception& e) {
        throw ConfigError(f.manifest + ": " + e.what());
      }
      return 0;
    }
    for (auto* s : {sim, tr, fc, ev, rp, tg}) {
      if (!s->parsed()) continue;
      command = s->get_name();
      execute(command, base_config(f, *s), f.out);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "mbsts " << command << ": configuration error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  } catch (const DimensionError& e) {
    std::cerr << "mbsts " << command << ": configuration error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  } catch (const NumericError& e) {
    std::cerr << "mbsts " << command << ": numerical failure: " << e.what() << "\n";
    return static_cast<int>(ExitCode::numeric);
  } catch (const IoError& e) {
    std::cerr << "mbsts " << command << ": I/O error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::io);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "mbsts " << command << ": I/O error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::io);
  }
}

}  // namespace mbsts
