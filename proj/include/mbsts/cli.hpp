#pragma once

#include "mbsts/config.hpp"

#include <filesystem>
#include <string>

namespace mbsts {

inline constexpr const char* kVersion = "1.0.0";

/// Runs one command from a fully resolved configuration, writing artifacts
/// and manifest.json into `out`. Outputs are staged in a sibling directory
/// and moved into place only on success.
void execute(const std::string& command, const RunConfig& cfg, const std::filesystem::path& out);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace mbsts
