#pragma once

#include <filesystem>
#include <string>

#include "garner/trainer.hpp"

namespace garner::cli {

// Training configuration plus the paths a run touches, loaded from a
// JSON document. Keys mirror the TrainConfig fields; unknown keys are
// rejected by name.
struct RunConfig {
  TrainConfig train;
  std::filesystem::path data;
  std::filesystem::path out;
};

RunConfig load_run_config(const std::filesystem::path& path);

Task parse_task(const std::string& name);

// Full argument-vector entry point; returns the process exit code.
// Diagnostics go to stderr, reports to stdout.
int run_cli(int argc, const char* const* argv);

}  // namespace garner::cli
