#pragma once

#include "mbsts/bench.hpp"
#include "mbsts/gibbs.hpp"
#include "mbsts/ingest.hpp"
#include "mbsts/priors.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mbsts {

using nlohmann::json;

struct SimulateSettings {
  int model = 1;
  int n = 100;
  std::optional<double> correlation;
  double shuffle_fraction = 0.5;
  int holdout = 0;  // trailing rows written to future/ instead of the training files
};

struct ForecastSettings {
  std::filesystem::path draws;
  int horizon = 1;
  std::vector<double> levels{0.4, 0.9};
  std::vector<std::filesystem::path> future_predictors;  // one file per series
};

struct EvaluateSettings {
  std::optional<int> initial_train_len;
  double initial_train_fraction = 0.8;
  std::optional<int> horizon_steps;  // default: every remaining row
  std::vector<Variant> variants{Variant::joint, Variant::independent};
  bool warm_start = false;
};

struct ReportSettings {
  std::vector<std::filesystem::path> inputs;  // evaluation or draw-store directories
  double credible_level = 0.9;
};

struct TargetSettings {
  std::filesystem::path prices;
  int k = 5;
  std::string column = "y";
};

/// Everything a command needs, with paths made absolute.
struct RunConfig {
  std::uint64_t seed = 0;
  json model;  // series list; predictor counts come from the data
  bool has_data = false;
  PanelSchema data;
  PriorConfig priors;
  InitialStatePrior initial_state;
  TrainConfig train;
  SimulateSettings simulate;
  ForecastSettings forecast;
  EvaluateSettings evaluate;
  ReportSettings report;
  TargetSettings target;
};

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
json to_json(const RunConfig& cfg);

json spec_to_json(const ModelSpec& spec);
/// Reads {"series": [...], "predictor_counts": [...]}; counts may be omitted
/// and supplied instead.
ModelSpec spec_from_json(const json& j, const std::optional<std::vector<int>>& predictor_counts = std::nullopt);

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace mbsts
