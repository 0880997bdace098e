#include "mbsts/ingest.hpp"

#include "mbsts/error.hpp"

#include <algorithm>
#include <cmath>

namespace mbsts {

void PricePanel::validate() const {
  const auto n = close.size();
  if (open.size() != n || high.size() != n || low.size() != n || static_cast<Eigen::Index>(dates.size()) != n) {
    throw ConfigError("price panel columns differ in length");
  }
  for (Eigen::Index t = 0; t < n; ++t) {
    const std::string where = "price panel " + ticker + " row " + std::to_string(t + 1);
    if (!(open(t) > 0.0 && high(t) > 0.0 && low(t) > 0.0 && close(t) > 0.0)) {
      throw ConfigError(where + ": prices must be positive");
    }
    if (high(t) < std::max(open(t), close(t)) || std::min(open(t), close(t)) < low(t)) {
      throw ConfigError(where + ": violates high >= open, close >= low");
    }
    if (t > 0 && !(dates[static_cast<std::size_t>(t - 1)] < dates[static_cast<std::size_t>(t)])) {
      throw ConfigError(where + ": dates must be strictly increasing");
    }
  }
}

PricePanel price_panel_from_table(const CsvTable& table, const std::string& ticker) {
  PricePanel p;
  p.ticker = ticker.empty() ? table.source : ticker;
  p.dates = table.strings("date");
  const auto m = table.numeric({"open", "high", "low", "close"});
  p.open = m.col(0);
  p.high = m.col(1);
  p.low = m.col(2);
  p.close = m.col(3);
  p.validate();
  return p;
}

PricePanel load_price_panel(const std::filesystem::path& path, const std::string& ticker) {
  return price_panel_from_table(read_csv(path), ticker);
}

TargetSeries max_log_return(const PricePanel& panel, int k) {
  if (k < 1) throw ConfigError("max_log_return needs k >= 1");
  panel.validate();
  const auto n = panel.size();
  if (n < k + 1) throw ConfigError("max_log_return needs at least k + 1 rows");
  TargetSeries out;
  const auto rows = n - k;
  out.values.resize(rows);
  for (Eigen::Index t = 0; t < rows; ++t) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 1; j <= k; ++j) {
      const double avg = (panel.close(t + j) + panel.high(t + j) + panel.low(t + j)) / 3.0;
      best = std::max(best, std::log(avg / panel.close(t)));
    }
    out.values(t) = best;
    out.dates.push_back(panel.dates[static_cast<std::size_t>(t)]);
  }
  out.dropped = k;
  return out;
}

Panel load_csv_panel(const PanelSchema& schema) {
  const auto m = schema.target_columns.size();
  if (m == 0) throw ConfigError("no target columns declared");
  if (schema.predictor_columns.size() != m) throw ConfigError("predictor columns needed for every target series");

  const CsvTable targets = read_csv(schema.targets_path);
  Panel panel;
  const auto dates = targets.strings(schema.date_column);
  const Eigen::MatrixXd y = targets.numeric(schema.target_columns);
  const auto n = y.rows();

  int max_lag = 0;
  for (const auto& cols : schema.predictor_columns) {
    for (const auto& c : cols) {
      if (c.lag < 0) throw ConfigError("predictor '" + c.name + "' has a negative lag");
      max_lag = std::max(max_lag, c.lag);
    }
  }
  if (max_lag >= n) throw ConfigError("lags leave no usable rows");

  for (std::size_t i = 0; i < m; ++i) {
    const auto path = i < schema.predictor_paths.size() && !schema.predictor_paths[i].empty()
                          ? schema.predictor_paths[i]
                          : schema.targets_path;
    const CsvTable table = path == schema.targets_path ? targets : read_csv(path);
    if (table.rows.size() != static_cast<std::size_t>(n) || table.strings(schema.date_column) != dates) {
      throw ConfigError(table.source + ": dates do not match the targets file");
    }
    const auto& cols = schema.predictor_columns[i];
    std::vector<std::string> names;
    for (const auto& c : cols) names.push_back(c.name);
    const Eigen::MatrixXd raw = table.numeric(names);
    Eigen::MatrixXd x(n - max_lag, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      x.col(static_cast<Eigen::Index>(c)) = raw.col(static_cast<Eigen::Index>(c)).segment(max_lag - cols[c].lag, n - max_lag);
    }
    panel.x_blocks.push_back(std::move(x));
  }
  panel.y = y.bottomRows(n - max_lag);
  panel.dates.assign(dates.begin() + max_lag, dates.end());
  panel.dropped_for_lags = max_lag;
  return panel;
}

}  // namespace mbsts
