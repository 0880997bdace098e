#pragma once

#include "mbsts/csv.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace mbsts {

struct PricePanel {
  std::string ticker;
  std::vector<std::string> dates;
  Eigen::VectorXd open, high, low, close;

  Eigen::Index size() const { return close.size(); }
  /// Increasing dates, positive prices, H >= max(O, C) >= min(O, C) >= L.
  void validate() const;
};

/// Columns date, open, high, low, close (case-sensitive).
PricePanel load_price_panel(const std::filesystem::path& path, const std::string& ticker = "");
PricePanel price_panel_from_table(const CsvTable& table, const std::string& ticker = "");

struct TargetSeries {
  std::vector<std::string> dates;
  Eigen::VectorXd values;
  int dropped = 0;  // trailing rows without a full k-day window
};

/// y_t = max_{j=1..k} log(Pbar_{t+j} / C_t) with Pbar = (C + H + L) / 3.
TargetSeries max_log_return(const PricePanel& panel, int k);

struct PredictorColumn {
  std::string name;
  int lag = 0;  // use the value from `lag` rows earlier
};

struct PanelSchema {
  std::string date_column = "date";
  std::filesystem::path targets_path;
  std::vector<std::string> target_columns;
  // One entry per series: its predictor file (empty -> targets file) and columns.
  std::vector<std::filesystem::path> predictor_paths;
  std::vector<std::vector<PredictorColumn>> predictor_columns;
};

struct Panel {
  std::vector<std::string> dates;
  Eigen::MatrixXd y;
  std::vector<Eigen::MatrixXd> x_blocks;
  int dropped_for_lags = 0;
};

/// Aligned targets and lagged predictors. Predictor files must list the same
/// dates as the targets file. Rows lost to lags are dropped from the front.
Panel load_csv_panel(const PanelSchema& schema);

}  // namespace mbsts
