#pragma once

#include <map>
#include <string>
#include <vector>

#include "hybridrl/config.hpp"

namespace hybridrl {

// Resolved experiment description. Environment- and agent-specific
// hyperparameters stay in the raw document under the [env] and [agent]
// sections.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string environment;
  std::string agent;
  std::vector<std::string> behavior_policies;  // tabular runs; tetris is uniform
  int n_off = 0;
  int n_on = 1;
  int trials = 1;
  std::uint64_t base_seed = 1;
  double partition_threshold = -1.0;  // <= 0 selects 1/(S*A)
  int projector_rank = 60;
  int offline_rank = 5;
  std::vector<std::string> metrics;
  std::string out_dir;
  ConfigDoc raw;
};

struct RunOptions {
  int parallel = 1;
  enum class Format { kCsv, kSvg, kBoth } format = Format::kBoth;
};

struct ExperimentResult {
  std::string out_dir;
  std::string manifest_path;
  std::vector<std::string> csv_files;              // relative to out_dir
  std::map<std::string, std::string> csv_hashes;   // file -> fnv1a64 hex
};

std::vector<std::string> registered_environments();
std::vector<std::string> registered_agents();

ExperimentConfig parse_experiment_config(const ConfigDoc& doc);
ExperimentConfig load_experiment_config(const std::string& path);

// Throws std::invalid_argument naming the offending entry.
void validate_experiment(const ExperimentConfig& config);

// Runs every (behavior policy, trial) cell with a paired online-only arm,
// aggregates the requested metrics, and writes CSV/SVG plus a manifest.
// Fully deterministic given base_seed; trials may execute in parallel.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Re-runs the experiment recorded in a manifest and checks that the emitted
// CSVs hash to the recorded values. Throws std::runtime_error on mismatch.
ExperimentResult replay_manifest(const std::string& manifest_path, const std::string& out_dir,
                                 const RunOptions& options = {});

}  // namespace hybridrl
