#include "mbsts/draw_store.hpp"

#include "mbsts/config.hpp"
#include "mbsts/csv.hpp"
#include "mbsts/error.hpp"

namespace mbsts {
namespace fs = std::filesystem;

std::vector<std::string> beta_column_names(const std::vector<std::vector<std::string>>& predictor_names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < predictor_names.size(); ++i) {
    for (const auto& n : predictor_names[i]) out.push_back("y" + std::to_string(i + 1) + ":" + n);
  }
  return out;
}

std::vector<std::string> theta_column_names(const ModelSpec& spec) {
  std::vector<std::string> out;
  for (const auto& p : variance_parameters(spec)) {
    out.push_back(std::string(component_name(p.kind)) + "_" + std::to_string(p.series + 1));
  }
  return out;
}

namespace {

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

std::vector<std::string> sigma_names(int m) {
  std::vector<std::string> out;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) out.push_back("s" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  }
  return out;
}

MatrixXd read_matrix(const fs::path& path, Eigen::Index expected_cols) {
  const auto table = read_csv(path);
  if (static_cast<Eigen::Index>(table.header.size()) != expected_cols) {
    throw ConfigError(path.filename().string() + ": unexpected column count");
  }
  return table.numeric(table.header);
}

}  // namespace

void write_draw_store(const fs::path& dir, const PosteriorDraws& draws,
                      const std::vector<std::vector<std::string>>& predictor_names) {
  const auto& spec = draws.spec;
  const int m = spec.m();
  json model{{"model", spec_to_json(spec)},
             {"initial_state", {{"mean", draws.initial_state.mean}, {"variance", draws.initial_state.variance}}},
             {"predictor_names", predictor_names},
             {"draws", draws.size()},
             {"state_dim", spec.state_dim()},
             {"has_state_paths", !draws.state_paths.empty()}};
  write_text(dir / "model.json", model.dump(2) + "\n");

  const auto names = beta_column_names(predictor_names);
  write_text(dir / "beta.csv", matrix_to_csv(names, draws.beta));
  write_text(dir / "gamma.csv", matrix_to_csv(names, draws.gamma));
  MatrixXd sig(draws.size(), m * m);
  for (int r = 0; r < draws.size(); ++r) {
    const auto& s = draws.sigma_eps[static_cast<std::size_t>(r)];
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) sig(r, i * m + j) = s(i, j);
    }
  }
  write_text(dir / "sigma_eps.csv", matrix_to_csv(sigma_names(m), sig));
  write_text(dir / "theta.csv", matrix_to_csv(theta_column_names(spec), draws.theta));
  write_text(dir / "final_state.csv", matrix_to_csv(numbered("a", spec.state_dim()), draws.final_state));

  MatrixXd diag(draws.size(), 3);
  for (int r = 0; r < draws.size(); ++r) {
    diag(r, 0) = r;
    diag(r, 1) = draws.chain[static_cast<std::size_t>(r)];
    diag(r, 2) = draws.log_joint(r);
  }
  write_text(dir / "diagnostics.csv", matrix_to_csv({"draw", "chain", "log_joint"}, diag));
  MatrixXd ssvs(static_cast<Eigen::Index>(draws.ssvs.size()), 3);
  for (std::size_t c = 0; c < draws.ssvs.size(); ++c) {
    ssvs(static_cast<Eigen::Index>(c), 0) = static_cast<double>(c);
    ssvs(static_cast<Eigen::Index>(c), 1) = static_cast<double>(draws.ssvs[c].proposals);
    ssvs(static_cast<Eigen::Index>(c), 2) = static_cast<double>(draws.ssvs[c].flips);
  }
  write_text(dir / "ssvs.csv", matrix_to_csv({"chain", "proposals", "flips"}, ssvs));

  if (!draws.state_paths.empty()) {
    const auto n = draws.state_paths.front().rows();
    const auto d = draws.state_paths.front().cols();
    MatrixXd st(static_cast<Eigen::Index>(draws.state_paths.size()) * n, d + 2);
    Eigen::Index row = 0;
    for (std::size_t r = 0; r < draws.state_paths.size(); ++r) {
      for (Eigen::Index t = 0; t < n; ++t, ++row) {
        st(row, 0) = static_cast<double>(r);
        st(row, 1) = static_cast<double>(t);
        st.row(row).tail(d) = draws.state_paths[r].row(t);
      }
    }
    auto header = numbered("a", d);
    header.insert(header.begin(), {"draw", "t"});
    write_text(dir / "states.csv", matrix_to_csv(header, st));
  }
}

StoredDraws read_draw_store(const fs::path& dir) {
  if (!fs::exists(dir / "model.json")) throw IoError(dir.string() + " is not a draw store (model.json missing)");
  json model;
  try {
    model = json::parse(read_text(dir / "model.json"));
  } catch (const json::exception& e) {
    throw ConfigError("model.json: " + std::string(e.what()));
  }
  StoredDraws out;
  auto& draws = out.draws;
  try {
    draws.spec = spec_from_json(model.at("model"));
    draws.initial_state.mean = model.at("initial_state").at("mean").get<double>();
    draws.initial_state.variance = model.at("initial_state").at("variance").get<double>();
    out.predictor_names = model.at("predictor_names").get<std::vector<std::vector<std::string>>>();
  } catch (const json::exception& e) {
    throw ConfigError("model.json: " + std::string(e.what()));
  }
  const auto& spec = draws.spec;
  const int m = spec.m();
  const auto k = spec.total_predictors();
  draws.beta = read_matrix(dir / "beta.csv", k);
  draws.gamma = read_matrix(dir / "gamma.csv", k);
  const MatrixXd sig = read_matrix(dir / "sigma_eps.csv", m * m);
  for (Eigen::Index r = 0; r < sig.rows(); ++r) {
    MatrixXd s(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) s(i, j) = sig(r, i * m + j);
    }
    draws.sigma_eps.push_back(std::move(s));
  }
  draws.theta = read_matrix(dir / "theta.csv", static_cast<Eigen::Index>(variance_parameters(spec).size()));
  draws.final_state = read_matrix(dir / "final_state.csv", spec.state_dim());
  const MatrixXd diag = read_matrix(dir / "diagnostics.csv", 3);
  draws.log_joint = diag.col(2);
  for (Eigen::Index r = 0; r < diag.rows(); ++r) draws.chain.push_back(static_cast<int>(diag(r, 1)));
  const MatrixXd ssvs = read_matrix(dir / "ssvs.csv", 3);
  for (Eigen::Index c = 0; c < ssvs.rows(); ++c) {
    draws.ssvs.push_back({static_cast<long>(ssvs(c, 1)), static_cast<long>(ssvs(c, 2))});
  }
  const auto rows = draws.beta.rows();
  if (draws.gamma.rows() != rows || static_cast<Eigen::Index>(draws.sigma_eps.size()) != rows ||
      draws.theta.rows() != rows || draws.final_state.rows() != rows || diag.rows() != rows) {
    throw ConfigError(dir.string() + ": draw files disagree on the number of draws");
  }
  if (fs::exists(dir / "states.csv")) {
    const auto d = spec.state_dim();
    const MatrixXd st = read_matrix(dir / "states.csv", d + 2);
    if (rows > 0) {
      const auto n = st.rows() / rows;
      for (Eigen::Index r = 0; r < rows; ++r) draws.state_paths.push_back(st.block(r * n, 2, n, d));
    }
  }
  return out;
}

}  // namespace mbsts
