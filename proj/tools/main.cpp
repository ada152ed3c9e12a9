#include <cstdio>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "hybridrl/harness.hpp"

namespace {

hybridrl::RunOptions::Format parse_format(const std::string& name) {
  if (name == "csv") return hybridrl::RunOptions::Format::kCsv;
  if (name == "svg") return hybridrl::RunOptions::Format::kSvg;
  if (name == "both") return hybridrl::RunOptions::Format::kBoth;
  throw std::invalid_argument("unknown format: " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid RL experiment runner"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, out_dir, format = "both";
  int trials_override = -1;
  long long seed_override = -1;
  int parallel = 1;

  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "TOML or JSON experiment config")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--trials", trials_override, "Override the trial count");
  run->add_option("--seed", seed_override, "Override the base seed");
  run->add_option("--parallel", parallel, "Worker threads for trials");
  run->add_option("--format", format, "Outputs to write: csv, svg or both");

  CLI::App* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "TOML or JSON experiment config")->required();

  CLI::App* replay = app.add_subcommand("replay", "Re-run a manifest and verify CSV hashes");
  replay->add_option("manifest", manifest_path, "manifest.json from a previous run")->required();
  replay->add_option("--out", out_dir, "Output directory for the replayed run");
  replay->add_option("--parallel", parallel, "Worker threads for trials");

  app.add_subcommand("list-envs", "List registered environments");
  app.add_subcommand("list-agents", "List registered agents");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("list-envs")) {
      for (const auto& name : hybridrl::registered_environments()) std::cout << name << '\n';
      return 0;
    }
    if (app.got_subcommand("list-agents")) {
      for (const auto& name : hybridrl::registered_agents()) std::cout << name << '\n';
      return 0;
    }

    if (app.got_subcommand("validate")) {
      try {
        hybridrl::validate_experiment(hybridrl::load_experiment_config(config_path));
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
      }
      std::cout << "ok\n";
      return 0;
    }

    if (app.got_subcommand("run")) {
      hybridrl::ExperimentConfig config;
      hybridrl::RunOptions options;
      try {
        config = hybridrl::load_experiment_config(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (trials_override > 0) config.trials = trials_override;
        if (seed_override >= 0) config.base_seed = static_cast<std::uint64_t>(seed_override);
        options.parallel = parallel;
        options.format = parse_format(format);
        hybridrl::validate_experiment(config);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
      }
      const auto result = hybridrl::run_experiment(config, options);
      std::cout << result.manifest_path << '\n';
      return 0;
    }

    if (app.got_subcommand("replay")) {
      hybridrl::RunOptions options;
      options.parallel = parallel;
      if (out_dir.empty()) {
        const auto slash = manifest_path.find_last_of('/');
        out_dir = (slash == std::string::npos ? std::string(".")
                                              : manifest_path.substr(0, slash)) +
                  "/replay";
      }
      const auto result = hybridrl::replay_manifest(manifest_path, out_dir, options);
      std::cout << "replay ok: " << result.out_dir << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
