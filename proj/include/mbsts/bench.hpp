#pragma once

#include "mbsts/gibbs.hpp"
#include "mbsts/priors.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mbsts {

enum class Variant { joint, independent };
const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct EvalConfig {
  int initial_train_len = 0;
  int horizon_steps = 0;
  std::vector<Variant> variants{Variant::joint, Variant::independent};
  TrainConfig train;
  PriorConfig priors;
  bool warm_start = false;

  void validate(Eigen::Index n) const;
};

struct VariantReport {
  std::string name;
  std::vector<double> pe;
  std::vector<double> cumulative;
  MatrixXd forecasts;                // steps x m point forecasts
  std::vector<double> refit_seconds; // wall clock per refit
};

struct EvalReport {
  std::vector<int> target_rows;  // 0-based row forecast at each step
  std::vector<VariantReport> variants;

  int steps() const { return static_cast<int>(target_rows.size()); }
  /// Appends an externally computed PE column (e.g. a baseline model).
  void add_external(const std::string& name, const std::vector<double>& pe);
  std::string to_csv() const;  // step, variant, pe, cumulative_pe
};

/// Returns the one-step point forecast (length m) of `variant` trained on
/// `y_train` / `x_train`, with `x_next` holding the next predictor row per
/// series.
using Forecaster = std::function<VectorXd(Variant variant, int step, const MatrixXd& y_train,
                                          const std::vector<MatrixXd>& x_train,
                                          const std::vector<MatrixXd>& x_next)>;

/// MBSTS forecaster: posterior-predictive mean of a fresh training run. The
/// independent variant fits each series alone.
class MbstsForecaster {
 public:
  MbstsForecaster(ModelSpec spec, EvalConfig cfg);
  VectorXd operator()(Variant variant, int step, const MatrixXd& y_train, const std::vector<MatrixXd>& x_train,
                      const std::vector<MatrixXd>& x_next);

 private:
  VectorXd fit_one(const ModelSpec& spec, int slot, int step, const MatrixXd& y_train,
                   const std::vector<MatrixXd>& x_train, const std::vector<MatrixXd>& x_next);

  ModelSpec spec_;
  EvalConfig cfg_;
  std::vector<std::optional<ChainState>> warm_;  // slot 0 joint, 1.. independent series
};

EvalReport growing_window_eval(const MatrixXd& y, const std::vector<MatrixXd>& x_blocks, const ModelSpec& spec,
                               const EvalConfig& cfg, Forecaster forecaster = {});

struct ComparisonTable {
  std::vector<std::string> names;
  MatrixXd cumulative;    // steps x columns
  VectorXd totals;
  VectorXd relative_gap;  // (total_j - total_0) / total_0

  std::string to_csv() const;
  std::string to_text() const;
};

ComparisonTable compare_report(const std::vector<EvalReport>& reports);

}  // namespace mbsts
