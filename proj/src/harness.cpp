#include "hybridrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hybridrl/agents.hpp"
#include "hybridrl/diagnostics.hpp"
#include "hybridrl/environments.hpp"
#include "hybridrl/report.hpp"
#include "hybridrl/tetris.hpp"
#include "json.hpp"

namespace hybridrl {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kCoverageCap = 1e6;  // plotted stand-in for infinite ratios

// Substream tags for the per-trial seed derivation; the scheme is echoed in
// the manifest so replays can reproduce it.
constexpr std::uint64_t kDatasetStream = 1;
constexpr std::uint64_t kEnvStream = 2;

std::uint64_t trial_seed(const ExperimentConfig& c, int trial) {
  return c.base_seed + static_cast<std::uint64_t>(trial);
}

const std::vector<std::string> kEnvironments = {"forest", "tetris", "random", "block"};
const std::vector<std::string> kAgents = {"ucbvi", "lsvi_ucb", "disc_golf"};

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Per-trial series keyed by "<metric-series>_<arm>".
using TrialOutput = std::map<std::string, std::vector<double>>;

std::vector<double> capped(const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = std::isinf(xs[i]) ? kCoverageCap : std::min(xs[i], kCoverageCap);
  return out;
}

// ---------------------------------------------------------------------------
// Config plumbing

std::vector<std::string> default_metrics(const std::string& environment) {
  if (environment == "tetris") return {"eig_coverage", "avg_reward"};
  if (environment == "block") return {"visits", "avg_reward"};
  return {"visits", "coverage", "avg_reward"};
}

ConfigDoc canonical_doc(const ExperimentConfig& c) {
  ConfigDoc doc;
  ConfigSection& ex = doc.sections["experiment"];
  ex["name"] = ConfigValue::of_string(c.name);
  ex["environment"] = ConfigValue::of_string(c.environment);
  ex["agent"] = ConfigValue::of_string(c.agent);
  {
    std::vector<ConfigValue> items;
    for (const auto& b : c.behavior_policies) items.push_back(ConfigValue::of_string(b));
    ex["behavior_policies"] = ConfigValue::of_array(std::move(items));
  }
  ex["n_off"] = ConfigValue::of_int(c.n_off);
  ex["n_on"] = ConfigValue::of_int(c.n_on);
  ex["trials"] = ConfigValue::of_int(c.trials);
  ex["base_seed"] = ConfigValue::of_int(static_cast<std::int64_t>(c.base_seed));
  ex["partition_threshold"] = ConfigValue::of_float(c.partition_threshold);
  ex["projector_rank"] = ConfigValue::of_int(c.projector_rank);
  ex["offline_rank"] = ConfigValue::of_int(c.offline_rank);
  {
    std::vector<ConfigValue> items;
    for (const auto& m : c.metrics) items.push_back(ConfigValue::of_string(m));
    ex["metrics"] = ConfigValue::of_array(std::move(items));
  }
  ex["out_dir"] = ConfigValue::of_string(c.out_dir);
  for (const char* section : {"env", "agent"}) {
    const auto it = c.raw.sections.find(section);
    doc.sections[section] = it == c.raw.sections.end() ? ConfigSection{} : it->second;
  }
  return doc;
}

}  // namespace

std::vector<std::string> registered_environments() { return kEnvironments; }
std::vector<std::string> registered_agents() { return kAgents; }

ExperimentConfig parse_experiment_config(const ConfigDoc& doc) {
  // accept the schema either under [experiment] or at the top level
  const std::string sec = doc.sections.count("experiment") != 0 ? "experiment" : "";
  ExperimentConfig c;
  c.name = doc.get_string(sec, "name", "experiment");
  c.environment = doc.get_string(sec, "environment", "");
  c.agent = doc.get_string(sec, "agent", "");
  c.behavior_policies = doc.get_string_array(sec, "behavior_policies");
  if (c.behavior_policies.empty() && doc.has(sec, "behavior_policy"))
    c.behavior_policies = {doc.get_string(sec, "behavior_policy", "uniform")};
  c.n_off = static_cast<int>(doc.get_int(sec, "n_off", 0));
  c.n_on = static_cast<int>(doc.get_int(sec, "n_on", 1));
  c.trials = static_cast<int>(doc.get_int(sec, "trials", 1));
  c.base_seed = static_cast<std::uint64_t>(doc.get_int(sec, "base_seed", 1));
  c.partition_threshold = doc.get_double(sec, "partition_threshold", -1.0);
  c.projector_rank = static_cast<int>(doc.get_int(sec, "projector_rank", 60));
  c.offline_rank = static_cast<int>(doc.get_int(sec, "offline_rank", 5));
  c.metrics = doc.get_string_array(sec, "metrics");
  c.out_dir = doc.get_string(sec, "out_dir", "");
  c.raw = doc;
  if (c.behavior_policies.empty())
    c.behavior_policies = {c.environment == "tetris" ? "uniform" : "uniform"};
  if (c.metrics.empty()) c.metrics = default_metrics(c.environment);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(load_config_file(path));
}

void validate_experiment(const ExperimentConfig& c) {
  if (!contains(kEnvironments, c.environment))
    throw std::invalid_argument("unknown environment: \"" + c.environment + "\"");
  if (!contains(kAgents, c.agent))
    throw std::invalid_argument("unknown agent: \"" + c.agent + "\"");
  if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (c.n_on < 1) throw std::invalid_argument("n_on must be >= 1");
  if (c.n_off < 0) throw std::invalid_argument("n_off must be >= 0");

  const bool tabular = c.environment != "tetris";
  if (c.agent == "lsvi_ucb" && tabular)
    throw std::invalid_argument("agent lsvi_ucb runs on the tetris environment");
  if (c.agent != "lsvi_ucb" && !tabular)
    throw std::invalid_argument("environment tetris requires the lsvi_ucb agent");
  if (c.agent == "disc_golf" && c.environment == "block")
    throw std::invalid_argument("agent disc_golf requires a fully observed tabular environment");

  for (const auto& b : c.behavior_policies) behavior_kind_from_string(b);
  if (c.environment == "tetris")
    for (const auto& b : c.behavior_policies)
      if (b != "uniform")
        throw std::invalid_argument("tetris offline data use the uniform behavior policy");

  const std::vector<std::string> tabular_metrics = {"visits", "coverage", "avg_reward", "regret",
                                                    "confidence"};
  const std::vector<std::string> tetris_metrics = {"eig_coverage", "avg_reward"};
  const std::vector<std::string> block_metrics = {"visits", "avg_reward", "regret"};
  for (const auto& m : c.metrics) {
    const auto& allowed = c.environment == "tetris"
                              ? tetris_metrics
                              : (c.environment == "block" ? block_metrics : tabular_metrics);
    if (!contains(allowed, m))
      throw std::invalid_argument("metric \"" + m + "\" is not available for environment " +
                                  c.environment);
    if (m == "confidence" && c.agent != "disc_golf")
      throw std::invalid_argument("metric confidence requires the disc_golf agent");
  }
  if (c.environment == "tetris") {
    if (c.offline_rank < 1 || c.offline_rank >= c.projector_rank)
      throw std::invalid_argument("offline_rank must lie in [1, projector_rank)");
  }
}

namespace {

// ---------------------------------------------------------------------------
// Tabular experiments (forest, random, block)

struct TabularSetup {
  std::string environment;
  TabularMDP mdp;  // observed-space MDP for forest/random; latent MDP for block
  double reward_scale = 1.0;
  BlockEmission emission;  // block only
  bool is_block = false;
  OptimalValues opt;  // over the latent/tabular chain
  double v_star_raw = 0.0;

  int obs_states = 0;  // observation count seen by the agent
};

TabularSetup build_tabular_setup(const ExperimentConfig& c) {
  TabularSetup setup;
  setup.environment = c.environment;
  const ConfigDoc& raw = c.raw;
  if (c.environment == "forest") {
    ForestParams p;
    p.num_states = static_cast<int>(raw.get_int("env", "num_states", p.num_states));
    p.horizon = static_cast<int>(raw.get_int("env", "horizon", p.horizon));
    p.fire_probability = raw.get_double("env", "fire_probability", p.fire_probability);
    p.wait_reward_at_max = raw.get_double("env", "wait_reward_at_max", p.wait_reward_at_max);
    ScaledMdp built = build_forest(p);
    setup.mdp = std::move(built.mdp);
    setup.reward_scale = built.reward_scale;
  } else if (c.environment == "random") {
    setup.mdp = build_random_tabular(
        static_cast<std::uint64_t>(raw.get_int("env", "seed", 1)),
        static_cast<int>(raw.get_int("env", "num_states", 3)),
        static_cast<int>(raw.get_int("env", "num_actions", 2)),
        static_cast<int>(raw.get_int("env", "horizon", 4)),
        raw.get_double("env", "sparsity", 0.0));
  } else if (c.environment == "block") {
    setup.is_block = true;
    TabularMDP latent = build_random_tabular(
        static_cast<std::uint64_t>(raw.get_int("env", "latent_seed", 1)),
        static_cast<int>(raw.get_int("env", "latent_states", 2)),
        static_cast<int>(raw.get_int("env", "num_actions", 2)),
        static_cast<int>(raw.get_int("env", "horizon", 4)),
        raw.get_double("env", "sparsity", 0.0));
    const int per_state = static_cast<int>(raw.get_int("env", "contexts_per_state", 3));
    if (per_state < 1) throw std::invalid_argument("contexts_per_state must be >= 1");
    BlockEmission e;
    const int U = latent.num_states;
    e.latent = std::move(latent);
    const int X = U * per_state;
    e.emission.assign(U, std::vector<double>(X, 0.0));
    e.decoder.resize(X);
    for (int u = 0; u < U; ++u)
      for (int j = 0; j < per_state; ++j) {
        const int x = u * per_state + j;
        e.emission[u][x] = 1.0 / per_state;
        e.decoder[x] = u;
      }
    validate(e);
    setup.mdp = e.latent;
    setup.emission = std::move(e);
  } else {
    throw std::invalid_argument("unknown tabular environment: " + c.environment);
  }
  setup.opt = optimal_values(setup.mdp);
  setup.v_star_raw = setup.opt.v_at(0, setup.mdp.initial_state) * setup.reward_scale;
  setup.obs_states = setup.is_block ? setup.emission.num_contexts() : setup.mdp.num_states;
  return setup;
}

struct BehaviorSetup {
  BehaviorKind kind;
  StochasticPolicy policy_chain;    // over the latent/tabular chain
  StochasticPolicy policy_obs;      // over observations (lifted for block)
  OccupancyTensor mu_obs;           // behavior occupancy over observations
  Partition partition;              // over observations
  double all_policy_c_off = 0.0;    // tabular only; latent variant for block
  double single_policy_c_off = 0.0;
};

BehaviorSetup build_behavior(const TabularSetup& setup, const std::string& name,
                             double threshold) {
  BehaviorSetup b;
  b.kind = behavior_kind_from_string(name);
  b.policy_chain = make_behavior_policy(b.kind, setup.opt);

  if (!setup.is_block) {
    b.policy_obs = b.policy_chain;
    b.mu_obs = policy_occupancy(setup.mdp, b.policy_chain);
    b.partition = partition_from_occupancy(b.mu_obs, threshold);
    b.all_policy_c_off = partial_offline_concentrability(setup.mdp, b.mu_obs, b.partition);
    const StochasticPolicy comparator =
        make_behavior_policy(BehaviorKind::kOptimal, setup.opt);
    b.single_policy_c_off =
        single_policy_concentrability(setup.mdp, b.mu_obs, b.partition, comparator);
    return b;
  }

  // block: lift the latent behavior policy through the decoder and push the
  // latent occupancy through the emission
  const BlockEmission& e = setup.emission;
  const int X = e.num_contexts(), A = setup.mdp.num_actions, H = setup.mdp.horizon;
  b.policy_obs.num_states = X;
  b.policy_obs.num_actions = A;
  b.policy_obs.horizon = H;
  b.policy_obs.probs.assign(static_cast<std::size_t>(H) * X * A, 0.0);
  for (int h = 0; h < H; ++h)
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a)
        b.policy_obs.at(h, x, a) = b.policy_chain.at(h, e.decoder[x], a);

  const OccupancyTensor latent_mu = policy_occupancy(setup.mdp, b.policy_chain);
  b.mu_obs.num_states = X;
  b.mu_obs.num_actions = A;
  b.mu_obs.horizon = H;
  b.mu_obs.density.assign(static_cast<std::size_t>(H) * X * A, 0.0);
  for (int h = 0; h < H; ++h)
    for (int x = 0; x < X; ++x) {
      const int u = e.decoder[x];
      for (int a = 0; a < A; ++a)
        b.mu_obs.at(h, x, a) = latent_mu.at(h, u, a) * e.emission[u][x];
    }
  b.partition = partition_from_occupancy(b.mu_obs, threshold);

  // latent-space coverage diagnostics (the observed chain has a random start)
  const Partition latent_partition = partition_from_occupancy(latent_mu, -1.0);
  b.all_policy_c_off = block_latent_coverage(e, latent_mu, latent_partition);
  const StochasticPolicy comparator = make_behavior_policy(BehaviorKind::kOptimal, setup.opt);
  b.single_policy_c_off =
      single_policy_concentrability(setup.mdp, latent_mu, latent_partition, comparator);
  return b;
}

struct DiscGolfSettings {
  FiniteFunctionClass fclass;
  double beta = 0.0;
};

DiscGolfSettings build_disc_golf(const ExperimentConfig& c, const TabularSetup& setup) {
  DiscGolfSettings out;
  const ConfigDoc& raw = c.raw;
  const int variants = static_cast<int>(raw.get_int("agent", "variants_per_step", 4));
  out.fclass = build_bellman_complete_class(
      setup.mdp, variants, static_cast<std::uint64_t>(raw.get_int("agent", "class_seed", 1)),
      raw.get_double("agent", "bump", 0.5));
  if (raw.has("agent", "beta")) {
    out.beta = raw.get_double("agent", "beta", 1.0);
  } else {
    out.beta = beta_schedule(static_cast<double>(c.n_off) + c.n_on, setup.mdp.horizon,
                             out.fclass.size(), raw.get_double("agent", "delta", 0.1),
                             raw.get_double("agent", "c1", 1.0));
  }
  return out;
}

TrialOutput run_tabular_trial(const ExperimentConfig& c, const TabularSetup& setup,
                              const BehaviorSetup& behavior,
                              const DiscGolfSettings* golf_settings, int trial) {
  const std::uint64_t seed = trial_seed(c, trial);
  const std::uint64_t dataset_seed = Rng::derive(seed, kDatasetStream);
  const std::uint64_t env_seed = Rng::derive(seed, kEnvStream);

  Dataset offline;
  {
    Rng rng(dataset_seed);
    if (setup.is_block) {
      BlockEnv env(setup.emission, setup.reward_scale);
      offline.source_tag = SourceTag::kOffline;
      for (int i = 0; i < c.n_off; ++i) {
        Trajectory t;
        t.episode_index = i;
        int x = env.reset(rng);
        for (int h = 0; h < setup.mdp.horizon; ++h) {
          const int a = rng.categorical(behavior.policy_obs.row(h, x));
          const auto [xp, r] = env.step(a, rng);
          t.steps.push_back({x, a, r, xp});
          x = xp;
        }
        offline.trajectories.push_back(std::move(t));
      }
    } else {
      offline = generate_offline_dataset(setup.mdp, behavior.policy_obs, c.n_off, rng);
    }
  }

  TrialOutput out;
  struct ArmResult {
    RunRecord rec;
    ConfidenceSetTrace trace;
    bool has_trace = false;
  };

  auto run_arm = [&](bool hybrid) {
    std::unique_ptr<TabularEnv> env;
    if (setup.is_block)
      env = std::make_unique<BlockEnv>(setup.emission, setup.reward_scale);
    else
      env = std::make_unique<MdpEnv>(setup.mdp, setup.reward_scale);
    Rng rng(env_seed);
    ArmResult result;
    if (c.agent == "ucbvi") {
      UcbviParams params;
      params.bonus_scale = c.raw.get_double("agent", "bonus_scale", 1.0);
      params.delta = c.raw.get_double("agent", "delta", 0.1);
      UcbviHybrid agent(setup.obs_states, setup.mdp.num_actions, setup.mdp.horizon, params);
      if (hybrid) agent.warm_start(offline);
      result.rec = agent.run(*env, c.n_on, rng);
    } else {
      DiscGolfParams params;
      params.beta = golf_settings->beta;
      params.reference_member = 0;  // class builder places Q* first
      DiscGolfFinite agent(golf_settings->fclass, params);
      if (hybrid) agent.warm_start(offline);
      auto [rec, trace] = agent.run(*env, c.n_on, rng);
      result.rec = std::move(rec);
      result.trace = std::move(trace);
      result.has_trace = true;
    }
    result.rec.env_name = c.environment;
    result.rec.seed = env_seed;
    if (!hybrid) result.rec.n_off = 0;
    return result;
  };

  const ArmResult hybrid = run_arm(true);
  const ArmResult online = run_arm(false);

  for (const auto* arm : {&hybrid, &online}) {
    const std::string tag = arm == &hybrid ? "hybrid" : "online";
    const RunRecord& rec = arm->rec;
    for (const auto& metric : c.metrics) {
      if (metric == "visits") {
        const VisitCurves v = partition_visit_curves(rec, behavior.partition);
        out["visits_off_" + tag] = v.off_curve;
        out["visits_on_" + tag] = v.on_curve;
      } else if (metric == "coverage") {
        const MixtureCoverageCurves m =
            empirical_partition_concentrability(rec, setup.mdp, behavior.mu_obs,
                                                behavior.partition);
        out["coverage_full_" + tag] = m.full;
        out["coverage_off_" + tag] = m.off_side;
        out["coverage_on_" + tag] = m.on_side;
      } else if (metric == "avg_reward" || metric == "regret") {
        const RegretCurves r = regret_curve(rec, setup.v_star_raw);
        if (metric == "avg_reward")
          out["avg_reward_" + tag] = r.per_episode_avg_reward;
        else
          out["regret_" + tag] = r.cumulative_regret;
      } else if (metric == "confidence" && arm->has_trace) {
        std::vector<double> survived(arm->trace.reference_survived.begin(),
                                     arm->trace.reference_survived.end());
        out["qstar_in_set_" + tag] = std::move(survived);
        out["insample_mse_" + tag] = arm->trace.selected_insample_mse;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tetris / LSVI-UCB experiments

TetrisConfig tetris_config_from(const ConfigDoc& raw) {
  TetrisConfig cfg;
  cfg.board_width = static_cast<int>(raw.get_int("env", "board_width", cfg.board_width));
  cfg.episode_length = static_cast<int>(raw.get_int("env", "episode_length", cfg.episode_length));
  cfg.height_penalty_threshold =
      static_cast<int>(raw.get_int("env", "height_penalty_threshold", cfg.height_penalty_threshold));
  cfg.game_over_height =
      static_cast<int>(raw.get_int("env", "game_over_height", cfg.game_over_height));
  cfg.num_state_buckets =
      static_cast<int>(raw.get_int("env", "num_state_buckets", cfg.num_state_buckets));
  cfg.encode_height_cap =
      static_cast<int>(raw.get_int("env", "encode_height_cap", cfg.encode_height_cap));
  return cfg;
}

TrialOutput run_tetris_trial(const ExperimentConfig& c, const TetrisConfig& cfg, int trial) {
  const std::uint64_t seed = trial_seed(c, trial);
  const std::uint64_t dataset_seed = Rng::derive(seed, kDatasetStream);
  const std::uint64_t env_seed = Rng::derive(seed, kEnvStream);
  const int A = cfg.num_rotations, H = cfg.episode_length;

  Dataset offline;
  {
    TetrisEnv env(cfg);
    Rng rng(dataset_seed);
    offline = generate_offline_dataset(static_cast<CodedEnv&>(env), c.n_off, rng);
  }

  // Offline one-hot sample matrix (columns are samples) -> SVD subspace.
  const int d_raw = cfg.feature_dim();
  Eigen::MatrixXd data = Eigen::MatrixXd::Zero(
      d_raw, std::max<std::size_t>(1, offline.trajectories.size() * H));
  {
    Eigen::Index col = 0;
    for (const auto& t : offline.trajectories)
      for (const auto& s : t.steps) data(one_hot_index(cfg, s.state, s.action), col++) = 1.0;
  }
  const Projector subspace = svd_projector(data, c.projector_rank);
  const FeatureMap features = projected_feature_map(tetris_one_hot_features(cfg), subspace.basis);
  const Projector p_off = axis_projector(c.projector_rank, 0, c.offline_rank);
  const Projector p_on =
      axis_projector(c.projector_rank, c.offline_rank, c.projector_rank - c.offline_rank);

  LsviParams params;
  params.lambda = c.raw.get_double("agent", "lambda", 1.0);
  params.beta = c.raw.get_double("agent", "beta_lin", 1.0);

  auto run_arm = [&](bool hybrid) {
    TetrisEnv env(cfg);
    Rng rng(env_seed);
    LsviUcbHybrid agent(features, cfg.num_state_buckets, A, H, params);
    if (hybrid) agent.warm_start(offline);
    RunRecord rec = agent.run(env, c.n_on, rng);
    rec.env_name = "tetris";
    rec.seed = env_seed;
    return rec;
  };

  const RunRecord hybrid = run_arm(true);
  const RunRecord online = run_arm(false);

  TrialOutput out;
  for (const auto* rec : {&hybrid, &online}) {
    const std::string tag = rec == &hybrid ? "hybrid" : "online";
    for (const auto& metric : c.metrics) {
      if (metric == "eig_coverage") {
        std::vector<std::vector<Eigen::VectorXd>> feats;
        feats.reserve(rec->episodes.size());
        for (const auto& ep : rec->episodes) {
          std::vector<Eigen::VectorXd> phis;
          phis.reserve(ep.trajectory.steps.size());
          for (const auto& s : ep.trajectory.steps)
            phis.push_back(features.embed(s.state, s.action));
          feats.push_back(std::move(phis));
        }
        const EigCoverageCurves eig =
            covariance_eig_curves(feats, p_off, p_on, c.offline_rank);
        out["eig_full_" + tag] = eig.inv_full;
        out["eig_off_" + tag] = eig.inv_off;
        out["eig_on_" + tag] = eig.inv_on;
      } else if (metric == "avg_reward") {
        std::vector<double> avg;
        avg.reserve(rec->episodes.size());
        for (const auto& ep : rec->episodes)
          avg.push_back(ep.raw_return / static_cast<double>(H));
        out["avg_reward_" + tag] = std::move(avg);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output emission

bool coverage_like(const std::string& series) {
  return series.rfind("coverage_", 0) == 0 || series.rfind("eig_", 0) == 0;
}

void emit_series(const std::string& out_dir, const std::string& prefix,
                 const std::vector<TrialOutput>& trials, const RunOptions& options,
                 std::vector<std::string>& csv_files,
                 std::map<std::string, std::string>& hashes) {
  if (trials.empty()) return;
  std::vector<std::string> series_names;
  for (const auto& [name, _] : trials.front()) series_names.push_back(name);

  const bool want_csv = options.format != RunOptions::Format::kSvg;
  const bool want_svg = options.format != RunOptions::Format::kCsv;

  // base name -> per-arm aggregated curves, for the paired SVG chart
  std::map<std::string, std::vector<std::pair<std::string, CoverageCurve>>> chart_groups;

  for (const auto& name : series_names) {
    std::vector<std::vector<double>> raw;
    raw.reserve(trials.size());
    for (const auto& t : trials) raw.push_back(t.at(name));

    // infinities are kept verbatim per trial but capped before aggregation
    std::vector<std::vector<double>> for_mean = raw;
    if (coverage_like(name))
      for (auto& r : for_mean) r = capped(r);
    const CoverageCurve curve = aggregate_trials(for_mean);

    if (want_csv) {
      const std::string agg_name = prefix + "_" + name + ".csv";
      const std::string wide_name = prefix + "_" + name + "_trials.csv";
      const std::string agg = curve_csv(curve);
      const std::string wide = trials_csv(raw);
      write_file(out_dir + "/" + agg_name, agg);
      write_file(out_dir + "/" + wide_name, wide);
      csv_files.push_back(agg_name);
      csv_files.push_back(wide_name);
      hashes[agg_name] = hash_hex(agg);
      hashes[wide_name] = hash_hex(wide);
    }
    if (want_svg) {
      std::string base = name;
      std::string arm = "series";
      for (const char* suffix : {"_hybrid", "_online"}) {
        const std::size_t pos = base.rfind(suffix);
        if (pos != std::string::npos && pos + std::string(suffix).size() == base.size()) {
          arm = suffix + 1;
          base = base.substr(0, pos);
          break;
        }
      }
      chart_groups[base].emplace_back(arm, curve);
    }
  }

  if (want_svg) {
    for (auto& [base, arms] : chart_groups) {
      std::sort(arms.begin(), arms.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<SvgSeries> series;
      for (const auto& [arm, curve] : arms)
        series.push_back({arm, curve.mean, curve.lo, curve.hi});
      SvgStyle style;
      style.title = prefix + " " + base;
      style.y_label = base;
      write_file(out_dir + "/" + prefix + "_" + base + ".svg", render_svg(series, style));
    }
  }
}

std::string resolve_out_dir(const ExperimentConfig& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  const char* root = std::getenv("HYBRID_RL_OUT");
  return std::string(root != nullptr ? root : "out") + "/" + c.name;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate_experiment(config);
  const auto t_start = std::chrono::steady_clock::now();

  ExperimentResult result;
  result.out_dir = resolve_out_dir(config);
  std::filesystem::create_directories(result.out_dir);

  nlohmann::json manifest;
  manifest["tool"] = "hybrid_rl";
  manifest["version"] = kVersion;
  manifest["config"] = nlohmann::json::parse(config_to_json_text(canonical_doc(config)));
  manifest["seed_derivation"] =
      "trial_seed = base_seed + trial; dataset_seed = derive(trial_seed, 1); "
      "env_seed = derive(trial_seed, 2); both arms share env_seed (SplitMix64)";
  manifest["coverage_cap"] = kCoverageCap;

  nlohmann::json trials_json = nlohmann::json::array();
  for (int t = 0; t < config.trials; ++t) {
    const std::uint64_t seed = trial_seed(config, t);
    const std::uint64_t env_seed = Rng::derive(seed, kEnvStream);
    nlohmann::json j;
    j["trial"] = t;
    j["trial_seed"] = seed;
    j["dataset_seed"] = Rng::derive(seed, kDatasetStream);
    j["env_seed_hybrid"] = env_seed;
    j["env_seed_online"] = env_seed;
    trials_json.push_back(std::move(j));
  }
  manifest["trials"] = std::move(trials_json);

  if (config.environment == "tetris") {
    const TetrisConfig cfg = tetris_config_from(config.raw);
    std::vector<TrialOutput> trials(config.trials);
    parallel_for(config.trials, options.parallel,
                 [&](int t) { trials[t] = run_tetris_trial(config, cfg, t); });
    emit_series(result.out_dir, config.name + "_uniform_" + config.agent, trials, options,
                result.csv_files, result.csv_hashes);
  } else {
    const TabularSetup setup = build_tabular_setup(config);
    DiscGolfSettings golf;
    const bool is_golf = config.agent == "disc_golf";
    if (is_golf) golf = build_disc_golf(config, setup);

    nlohmann::json behaviors_json = nlohmann::json::object();
    for (const auto& behavior_name : config.behavior_policies) {
      const BehaviorSetup behavior =
          build_behavior(setup, behavior_name, config.partition_threshold);

      nlohmann::json bj;
      bj["v_star_raw"] = format_double(setup.v_star_raw);
      bj["partition_off_cells"] = behavior.partition.off_size();
      bj["partition_on_cells"] = behavior.partition.on_size();
      bj["all_policy_c_off"] = format_double(behavior.all_policy_c_off);
      bj["single_policy_c_off"] = format_double(behavior.single_policy_c_off);
      if (is_golf) bj["beta"] = format_double(golf.beta);
      behaviors_json[behavior_name] = std::move(bj);

      std::vector<TrialOutput> trials(config.trials);
      parallel_for(config.trials, options.parallel, [&](int t) {
        trials[t] =
            run_tabular_trial(config, setup, behavior, is_golf ? &golf : nullptr, t);
      });
      emit_series(result.out_dir, config.name + "_" + behavior_name + "_" + config.agent,
                  trials, options, result.csv_files, result.csv_hashes);
    }
    manifest["behaviors"] = std::move(behaviors_json);
  }

  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& [file, hash] : result.csv_hashes) hashes[file] = hash;
  manifest["csv"] = std::move(hashes);
  manifest["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t_start)
                              .count();

  result.manifest_path = result.out_dir + "/manifest.json";
  write_file(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

ExperimentResult replay_manifest(const std::string& manifest_path, const std::string& out_dir,
                                 const RunOptions& options) {
  const nlohmann::json manifest = nlohmann::json::parse(read_file(manifest_path));
  ExperimentConfig config =
      parse_experiment_config(parse_json_config(manifest.at("config").dump()));
  if (out_dir.empty()) throw std::invalid_argument("replay needs an output directory");
  config.out_dir = out_dir;

  const ExperimentResult rerun = run_experiment(config, options);

  const auto& recorded = manifest.at("csv");
  for (const auto& [file, hash] : recorded.items()) {
    const auto it = rerun.csv_hashes.find(file);
    if (it == rerun.csv_hashes.end())
      throw std::runtime_error("replay did not produce recorded file " + file);
    if (it->second != hash.get<std::string>())
      throw std::runtime_error("replay hash mismatch for " + file);
  }
  if (recorded.size() != rerun.csv_hashes.size())
    throw std::runtime_error("replay produced a different set of CSV files");
  return rerun;
}

}  // namespace hybridrl
