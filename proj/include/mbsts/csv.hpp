#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace mbsts {

struct CsvTable {
  std::string source;  // file name used in error messages
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ConfigError if absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;

  /// Numeric matrix of the named columns. Empty or non-numeric cells raise
  /// ConfigError naming the 1-based data row and the column.
  Eigen::MatrixXd numeric(const std::vector<std::string>& names) const;
  std::vector<std::string> strings(const std::string& name) const;
};

/// Parses comma-separated text with a header row. Accepts \n, \r\n and \r
/// line endings; a trailing newline is optional. No quoting support.
CsvTable parse_csv(const std::string& text, const std::string& source = "<text>");
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Header plus rows of full-precision numbers; `first` is an optional
/// leading label column.
std::string matrix_to_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values,
                          const std::vector<std::string>& first = {});

}  // namespace mbsts
