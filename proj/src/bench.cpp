#include "mbsts/bench.hpp"

#include "mbsts/error.hpp"
#include "mbsts/forecast.hpp"
#include "mbsts/format.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace mbsts {

const char* variant_name(Variant v) { return v == Variant::joint ? "joint" : "independent"; }

Variant parse_variant(const std::string& name) {
  if (name == "joint") return Variant::joint;
  if (name == "independent") return Variant::independent;
  throw ConfigError("unknown model variant '" + name + "'");
}

void EvalConfig::validate(Eigen::Index n) const {
  if (initial_train_len < 1) throw ConfigError("initial_train_len must be at least 1");
  if (horizon_steps < 0) throw ConfigError("horizon_steps must be non-negative");
  if (initial_train_len + horizon_steps > n) {
    throw ConfigError("initial_train_len + horizon_steps exceeds the series length " + std::to_string(n));
  }
  if (variants.empty()) throw ConfigError("at least one model variant required");
  train.validate();
  priors.validate();
}

void EvalReport::add_external(const std::string& name, const std::vector<double>& pe) {
  if (static_cast<int>(pe.size()) != steps()) throw DimensionError("external PE column length differs from the report");
  VariantReport v;
  v.name = name;
  v.pe = pe;
  double acc = 0.0;
  for (double e : pe) v.cumulative.push_back(acc += e);
  variants.push_back(std::move(v));
}

std::string EvalReport::to_csv() const {
  std::string out = "step,variant,pe,cumulative_pe\n";
  for (const auto& v : variants) {
    for (std::size_t s = 0; s < v.pe.size(); ++s) {
      out += std::to_string(s + 1) + "," + v.name + "," + format_double(v.pe[s]) + "," +
             format_double(v.cumulative[s]) + "\n";
    }
  }
  return out;
}

MbstsForecaster::MbstsForecaster(ModelSpec spec, EvalConfig cfg)
    : spec_(std::move(spec)), cfg_(std::move(cfg)), warm_(static_cast<std::size_t>(spec_.m() + 1)) {}

VectorXd MbstsForecaster::fit_one(const ModelSpec& spec, int slot, int step, const MatrixXd& y_train,
                                  const std::vector<MatrixXd>& x_train, const std::vector<MatrixXd>& x_next) {
  TrainConfig tc = cfg_.train;
  tc.keep_state_paths = false;
  tc.seed = derive_seed(cfg_.train.seed, static_cast<std::uint64_t>(step) * 1024u + static_cast<std::uint64_t>(slot));
  if (cfg_.warm_start && warm_[static_cast<std::size_t>(slot)]) tc.warm_start = warm_[static_cast<std::size_t>(slot)];
  const PriorSet priors = make_priors(spec, y_train, cfg_.priors);
  PosteriorDraws draws;
  try {
    draws = train(y_train, x_train, spec, priors, tc);
  } catch (const NumericError& e) {
    throw NumericError("refit at step " + std::to_string(step + 1) + ": " + e.what());
  }
  if (cfg_.warm_start) warm_[static_cast<std::size_t>(slot)] = draws.state_at(draws.size() - 1);
  Rng rng(derive_seed(tc.seed, 0xF0CA57ull));
  return predict(draws, spec, x_next, 1, rng).mean.row(0).transpose();
}

VectorXd MbstsForecaster::operator()(Variant variant, int step, const MatrixXd& y_train,
                                     const std::vector<MatrixXd>& x_train, const std::vector<MatrixXd>& x_next) {
  if (variant == Variant::joint) return fit_one(spec_, 0, step, y_train, x_train, x_next);
  VectorXd out(spec_.m());
  for (int i = 0; i < spec_.m(); ++i) {
    const auto& xi = x_train[static_cast<std::size_t>(i)];
    const auto& xn = x_next[static_cast<std::size_t>(i)];
    out(i) = fit_one(spec_.restrict_to(i), i + 1, step, y_train.col(i), {xi}, {xn})(0);
  }
  return out;
}

EvalReport growing_window_eval(const MatrixXd& y, const std::vector<MatrixXd>& x_blocks, const ModelSpec& spec,
                               const EvalConfig& cfg, Forecaster forecaster) {
  cfg.validate(y.rows());
  if (static_cast<int>(x_blocks.size()) != spec.m() || y.cols() != spec.m()) {
    throw DimensionError("dataset does not match the model specification");
  }
  if (!forecaster) forecaster = MbstsForecaster(spec, cfg);

  EvalReport report;
  for (int s = 0; s < cfg.horizon_steps; ++s) report.target_rows.push_back(cfg.initial_train_len + s);
  for (auto v : cfg.variants) {
    VariantReport vr;
    vr.name = variant_name(v);
    vr.forecasts = MatrixXd(cfg.horizon_steps, spec.m());
    double acc = 0.0;
    for (int s = 0; s < cfg.horizon_steps; ++s) {
      const int len = cfg.initial_train_len + s;
      std::vector<MatrixXd> x_train, x_next;
      for (const auto& x : x_blocks) {
        x_train.push_back(x.topRows(len));
        x_next.push_back(x.middleRows(len, 1));
      }
      const auto start = std::chrono::steady_clock::now();
      const VectorXd f = forecaster(v, s, y.topRows(len), x_train, x_next);
      vr.refit_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      if (f.size() != spec.m()) throw DimensionError("forecaster returned the wrong number of series");
      vr.forecasts.row(s) = f.transpose();
      const double pe = one_step_error(y.row(len).transpose(), f);
      vr.pe.push_back(pe);
      vr.cumulative.push_back(acc += pe);
    }
    report.variants.push_back(std::move(vr));
  }
  return report;
}

ComparisonTable compare_report(const std::vector<EvalReport>& reports) {
  ComparisonTable table;
  if (reports.empty()) return table;
  const int steps = reports.front().steps();
  std::vector<const VariantReport*> cols;
  for (std::size_t r = 0; r < reports.size(); ++r) {
    if (reports[r].steps() != steps) throw DimensionError("reports cover different numbers of steps");
    for (const auto& v : reports[r].variants) {
      cols.push_back(&v);
      table.names.push_back(reports.size() > 1 ? "r" + std::to_string(r + 1) + ":" + v.name : v.name);
    }
  }
  const auto c = static_cast<Eigen::Index>(cols.size());
  table.cumulative = MatrixXd::Zero(steps, c);
  table.totals = VectorXd::Zero(c);
  table.relative_gap = VectorXd::Zero(c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (int s = 0; s < steps; ++s) table.cumulative(s, j) = cols[static_cast<std::size_t>(j)]->cumulative[static_cast<std::size_t>(s)];
    table.totals(j) = steps > 0 ? table.cumulative(steps - 1, j) : 0.0;
  }
  for (Eigen::Index j = 0; j < c; ++j) {
    const double base = table.totals(0);
    const double diff = table.totals(j) - base;
    table.relative_gap(j) = diff == 0.0 ? 0.0 : diff / base;
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::string out = "step";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (Eigen::Index s = 0; s < cumulative.rows(); ++s) {
    out += std::to_string(s + 1);
    for (Eigen::Index j = 0; j < cumulative.cols(); ++j) out += "," + format_double(cumulative(s, j));
    out += "\n";
  }
  out += "total";
  for (Eigen::Index j = 0; j < totals.size(); ++j) out += "," + format_double(totals(j));
  out += "\nrelative_gap";
  for (Eigen::Index j = 0; j < relative_gap.size(); ++j) out += "," + format_double(relative_gap(j));
  out += "\n";
  return out;
}

std::string ComparisonTable::to_text() const {
  std::ostringstream os;
  os << std::setw(8) << "step";
  for (const auto& n : names) os << std::setw(16) << n;
  os << "\n" << std::fixed << std::setprecision(4);
  for (Eigen::Index s = 0; s < cumulative.rows(); ++s) {
    os << std::setw(8) << s + 1;
    for (Eigen::Index j = 0; j < cumulative.cols(); ++j) os << std::setw(16) << cumulative(s, j);
    os << "\n";
  }
  os << std::setw(8) << "total";
  for (Eigen::Index j = 0; j < totals.size(); ++j) os << std::setw(16) << totals(j);
  os << "\n" << std::setw(8) << "gap";
  for (Eigen::Index j = 0; j < relative_gap.size(); ++j) os << std::setw(16) << relative_gap(j);
  os << "\n";
  return os.str();
}

}  // namespace mbsts
