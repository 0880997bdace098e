#pragma once

#include "mbsts/gibbs.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mbsts {

/// Writes retained draws as flat CSV column files plus model.json:
/// beta.csv, gamma.csv, sigma_eps.csv, theta.csv, final_state.csv,
/// diagnostics.csv (draw, chain, log_joint), ssvs.csv and, when kept,
/// states.csv (draw, t, state columns).
void write_draw_store(const std::filesystem::path& dir, const PosteriorDraws& draws,
                      const std::vector<std::vector<std::string>>& predictor_names);

struct StoredDraws {
  PosteriorDraws draws;
  std::vector<std::vector<std::string>> predictor_names;
};

StoredDraws read_draw_store(const std::filesystem::path& dir);

std::vector<std::string> beta_column_names(const std::vector<std::vector<std::string>>& predictor_names);
std::vector<std::string> theta_column_names(const ModelSpec& spec);

}  // namespace mbsts
