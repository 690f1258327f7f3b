#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/config.hpp"
#include "mfldp/report.hpp"

namespace mfldp {

struct RunOptions {
  bool trace = false;  // extra per-iteration / per-node tables
};

struct ExperimentOutput {
  nlohmann::json summary;
  std::vector<Table> tables;
  std::vector<PlotSpec> plots;
  /// Non-fatal numerical problems (non-converged solves, violated checks).
  std::vector<std::string> numerical_failures;
  /// Concatenated binary frames, written to frames.bin when non-empty.
  std::string frames;
};

ExperimentOutput run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// report.json content: version, kind, config hash, seed, config and summary.
nlohmann::json make_manifest(const ExperimentConfig& config, const ExperimentOutput& output);

void write_report(const ExperimentConfig& config, const ExperimentOutput& output, const std::filesystem::path& dir);

}  // namespace mfldp
