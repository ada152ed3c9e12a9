#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hybridrl/rng.hpp"

namespace hybridrl {

// Finite episodic MDP, dense representation. Steps are indexed h in [0,H),
// states s in [0,S), actions a in [0,A). Transition rows are probability
// vectors over next states, rewards live in [0,1], and every episode starts
// deterministically in initial_state.
struct TabularMDP {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  int initial_state = 0;
  std::vector<double> transition;  // (h, s, a, s') row-major
  std::vector<double> reward;      // (h, s, a) row-major

  std::size_t sa_index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states + s) * num_actions + a;
  }
  std::span<const double> transition_row(int h, int s, int a) const {
    return {transition.data() + sa_index(h, s, a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  std::span<double> transition_row(int h, int s, int a) {
    return {transition.data() + sa_index(h, s, a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  double reward_at(int h, int s, int a) const { return reward[sa_index(h, s, a)]; }
  double& reward_at(int h, int s, int a) { return reward[sa_index(h, s, a)]; }

  std::string to_json() const;
  static TabularMDP from_json(const std::string& text);
};

// Throws std::invalid_argument naming the first violated invariant
// (row sums within 1e-12 of 1, no negative mass, rewards in [0,1],
// indices in range).
void validate(const TabularMDP& mdp);

struct DeterministicPolicy {
  int num_states = 0;
  int horizon = 0;
  std::vector<int> action;  // (h, s)

  int at(int h, int s) const { return action[static_cast<std::size_t>(h) * num_states + s]; }
  int& at(int h, int s) { return action[static_cast<std::size_t>(h) * num_states + s]; }
};

struct StochasticPolicy {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<double> probs;  // (h, s, a)

  double at(int h, int s, int a) const {
    return probs[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  double& at(int h, int s, int a) {
    return probs[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  std::span<const double> row(int h, int s) const {
    return {probs.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions,
            static_cast<std::size_t>(num_actions)};
  }

  static StochasticPolicy uniform(int S, int A, int H);
  static StochasticPolicy from_deterministic(const DeterministicPolicy& p, int num_actions);
};

// d_h(s,a): probability of being at (s,a) on step h under some policy.
// Every per-h slice sums to one.
struct OccupancyTensor {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<double> density;  // (h, s, a)

  double at(int h, int s, int a) const {
    return density[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  double& at(int h, int s, int a) {
    return density[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
};

struct TransitionStep {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
};

struct Trajectory {
  std::vector<TransitionStep> steps;  // exactly H entries, chained states
  int episode_index = 0;
};

enum class SourceTag { kOffline, kOnline };

struct Dataset {
  std::vector<Trajectory> trajectories;
  SourceTag source_tag = SourceTag::kOffline;
};

struct OptimalValues {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<double> q;  // (h, s, a)
  std::vector<double> v;  // (h, s)

  double q_at(int h, int s, int a) const {
    return q[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  double v_at(int h, int s) const { return v[static_cast<std::size_t>(h) * num_states + s]; }
};

// Backward induction: Q*_h = R_h + P_h V*_{h+1}, V*_{H} = 0.
OptimalValues optimal_values(const TabularMDP& mdp);

// Greedy policy w.r.t. a Q table; ties break to the lowest action index.
DeterministicPolicy greedy_policy(const OptimalValues& values);

// Forward recursion for d^pi; each per-h slice sums to one.
OccupancyTensor policy_occupancy(const TabularMDP& mdp, const StochasticPolicy& policy);

// sup over all policies of d^pi_h(s,a), computed by dynamic programming on
// the auxiliary objective that pays 1 exactly at (h,s,a). The maximizer can
// be taken deterministic, which the tests check against exhaustive
// enumeration.
double max_occupancy(const TabularMDP& mdp, int h, int s, int a);

// One episode of length H; deterministic given the generator state.
Trajectory sample_episode(const TabularMDP& mdp, const StochasticPolicy& policy, Rng& rng,
                          int episode_index = 0);

// V^pi_1(s_init) by backward policy evaluation.
double policy_value(const TabularMDP& mdp, const StochasticPolicy& policy);

}  // namespace hybridrl
