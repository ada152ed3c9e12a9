#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "hybridrl/environments.hpp"
#include "hybridrl/linear.hpp"
#include "hybridrl/mdp.hpp"

namespace hybridrl {

// ---------------------------------------------------------------------------
// Behavior policies and offline data

enum class BehaviorKind { kOptimal, kUniform, kAdversarial };

BehaviorKind behavior_kind_from_string(const std::string& name);
std::string to_string(BehaviorKind kind);

// optimal: greedy w.r.t. q_star. uniform: 1/A everywhere. adversarial: with
// probability 0.6 the lowest-index non-greedy action, with probability 0.4 a
// uniform action.
StochasticPolicy make_behavior_policy(BehaviorKind kind, const OptimalValues& q_star);

Dataset generate_offline_dataset(const TabularMDP& mdp, const StochasticPolicy& policy,
                                 int n_episodes, Rng& rng);

// Uniform-action rollouts on a coded environment.
Dataset generate_offline_dataset(CodedEnv& env, int n_episodes, Rng& rng);

// ---------------------------------------------------------------------------
// Replay buffer: immutable offline portion, append-only online portion.

class ReplayState {
 public:
  ReplayState() = default;
  ReplayState(int horizon, const Dataset& offline);

  void append_episode(const Trajectory& trajectory);

  int horizon() const { return horizon_; }
  std::size_t offline_size(int h) const { return offline_[h].size(); }
  std::size_t total_size(int h) const { return offline_[h].size() + online_[h].size(); }
  const std::vector<TransitionStep>& offline(int h) const { return offline_[h]; }
  const std::vector<TransitionStep>& online(int h) const { return online_[h]; }
  int offline_episodes() const { return offline_episodes_; }

  template <typename F>
  void for_each(int h, F&& f) const {
    for (const auto& t : offline_[h]) f(t);
    for (const auto& t : online_[h]) f(t);
  }

 private:
  int horizon_ = 0;
  int offline_episodes_ = 0;
  std::vector<std::vector<TransitionStep>> offline_;
  std::vector<std::vector<TransitionStep>> online_;
};

// ---------------------------------------------------------------------------
// Run records consumed by diagnostics and the harness.

struct EpisodeLog {
  Trajectory trajectory;       // rewards on the [0,1] scale
  DeterministicPolicy policy;  // greedy snapshot over (h, state/code)
  double value_estimate = 0.0; // optimistic value at the initial state
  double mean_bonus = 0.0;     // mean exploration bonus along the path
  double raw_return = 0.0;     // episode return on the raw reward scale
};

struct RunRecord {
  std::string env_name;
  std::string agent_name;
  std::uint64_t seed = 0;
  int n_off = 0;
  int n_on = 0;
  std::vector<EpisodeLog> episodes;
};

// ---------------------------------------------------------------------------
// Warm-started UCBVI (model-based, tabular)

struct UcbviParams {
  double bonus_scale = 1.0;
  double delta = 0.1;
};

class UcbviHybrid {
 public:
  UcbviHybrid(int S, int A, int H, UcbviParams params);

  // Digests the offline dataset into the count/model tables.
  void warm_start(const Dataset& offline);

  RunRecord run(TabularEnv& env, int n_on, Rng& rng);

  long long visit_count(int h, int s, int a) const { return count_[idx(h, s, a)]; }
  int offline_episodes() const { return n_off_; }

 private:
  std::size_t idx(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
  }
  void absorb(const Trajectory& t);
  // Optimistic backward induction over the empirical model; fills q_, v_,
  // bonus_. n_total is the episode budget entering the bonus logarithm.
  void plan(long long n_total);

  int S_, A_, H_;
  UcbviParams params_;
  std::vector<long long> count_;        // (h,s,a)
  std::vector<long long> trans_count_;  // (h,s,a,s')
  std::vector<double> reward_sum_;      // (h,s,a)
  std::vector<double> q_, v_, bonus_;
  int n_off_ = 0;
};

// ---------------------------------------------------------------------------
// Warm-started LSVI-UCB (ridge regression over a feature map)

struct LsviParams {
  double lambda = 1.0;
  double beta = 1.0;
};

class LsviUcbHybrid {
 public:
  LsviUcbHybrid(const FeatureMap& features, int num_codes, int num_actions, int H,
                LsviParams params);

  void warm_start(const Dataset& offline);

  RunRecord run(CodedEnv& env, int n_on, Rng& rng);

  const Eigen::MatrixXd& gram(int h) const { return gram_[h]; }
  Eigen::VectorXd weights(int h) const { return weights_[h]; }

 private:
  void append(const Trajectory& t);
  // Recomputes all weights from the unioned buffer, back to front, and
  // refreshes the per-(code, action) value and bonus tables.
  void refit();

  int num_codes_, num_actions_, horizon_, dim_;
  LsviParams params_;
  Eigen::MatrixXd feat_;  // (codes*actions) x dim feature table
  ReplayState replay_;
  std::vector<Eigen::MatrixXd> gram_;
  std::vector<Eigen::VectorXd> weights_;
  std::vector<Eigen::VectorXd> q_table_;      // capped optimistic Q per (code, action)
  std::vector<Eigen::VectorXd> bonus_table_;  // beta * ||phi||_{Gram^-1}
};

// ---------------------------------------------------------------------------
// DISC-GOLF over an explicitly enumerated function class

// Explicit list of Q-function tuples f = (f_1..f_H); values live in [0,H].
struct FiniteFunctionClass {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<std::vector<double>> members;  // member -> (h,s,a) row-major
  bool completeness_closure = false;

  int size() const { return static_cast<int>(members.size()); }
  double value(int member, int h, int s, int a) const {
    return members[member][(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
};

// Range check; throws on values outside [0,H].
void validate(const FiniteFunctionClass& fclass);

// Verifies the Bellman closure against the given MDP: for every member f and
// every step, T_h f_{h+1} must match some member's h-slice within tol.
void check_bellman_closure(const FiniteFunctionClass& fclass, const TabularMDP& mdp,
                           double tol = 1e-9);

// Builds a Bellman-complete class containing Q* as member 0: the last-step
// slices are the reward plus seeded bumps, earlier slices are their exact
// Bellman backups, and members enumerate all per-step combinations.
FiniteFunctionClass build_bellman_complete_class(const TabularMDP& mdp, int variants_per_step,
                                                 std::uint64_t seed, double bump_size = 0.5,
                                                 int member_limit = 10000);

// Theorem-style confidence width: c1 * log(n_total * horizon * class_size / delta).
double beta_schedule(double n_total, int horizon, double class_size, double delta,
                     double c1 = 1.0);

struct ConfidenceSetTrace {
  std::vector<std::vector<int>> surviving;        // per episode, after the update
  std::vector<std::uint8_t> reference_survived;   // tracks the designated member
  std::vector<int> selected_member;               // member picked by optimism
  std::vector<double> selected_insample_mse;      // mean squared TD residual over the
                                                  // pre-episode buffer
};

struct DiscGolfParams {
  double beta = 1.0;
  int reference_member = -1;  // member whose survival is traced (e.g. Q*)
};

class DiscGolfFinite {
 public:
  DiscGolfFinite(FiniteFunctionClass fclass, DiscGolfParams params);

  void warm_start(const Dataset& offline);

  std::pair<RunRecord, ConfidenceSetTrace> run(TabularEnv& env, int n_on, Rng& rng);

  const ReplayState& replay() const { return replay_; }
  const FiniteFunctionClass& function_class() const { return fclass_; }

  // Surviving member indices under width beta for the current buffer.
  std::vector<int> confidence_set(double beta) const;

 private:
  // L_h(f_h of member i, f_{h+1} of member j) summed over the buffer at h.
  double pair_loss(int h, int member_i, int member_j) const;
  double insample_mse(int member) const;

  FiniteFunctionClass fclass_;
  DiscGolfParams params_;
  ReplayState replay_;
};

}  // namespace hybridrl
