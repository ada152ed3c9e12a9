#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "hybridrl/mdp.hpp"

namespace hybridrl {

// Episodic environment with finite observations. Instances hold per-episode
// mutable state and are meant to be driven by one thread at a time.
class TabularEnv {
 public:
  virtual ~TabularEnv() = default;
  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;
  // Starts a new episode, returns the initial observation.
  virtual int reset(Rng& rng) = 0;
  // Takes an action, returns (next observation, reward in [0,1]).
  virtual std::pair<int, double> step(int action, Rng& rng) = 0;
  // Multiplier from the [0,1] agent reward back to the raw scale.
  virtual double raw_from_scaled(double r) const { return r; }
};

// Simulates a TabularMDP directly.
class MdpEnv : public TabularEnv {
 public:
  explicit MdpEnv(TabularMDP mdp, double reward_scale = 1.0)
      : mdp_(std::move(mdp)), reward_scale_(reward_scale) {}

  int num_states() const override { return mdp_.num_states; }
  int num_actions() const override { return mdp_.num_actions; }
  int horizon() const override { return mdp_.horizon; }
  int reset(Rng&) override {
    step_ = 0;
    state_ = mdp_.initial_state;
    return state_;
  }
  std::pair<int, double> step(int action, Rng& rng) override {
    const double r = mdp_.reward_at(step_, state_, action);
    state_ = rng.categorical(mdp_.transition_row(step_, state_, action));
    ++step_;
    return {state_, r};
  }
  double raw_from_scaled(double r) const override { return r * reward_scale_; }
  const TabularMDP& mdp() const { return mdp_; }

 private:
  TabularMDP mdp_;
  double reward_scale_;
  int state_ = 0;
  int step_ = 0;
};

// Forest management chain: states are forest ages 0..S-1, action 0 waits
// (age advances, capped) and action 1 cuts (age resets). Fire burns the
// forest back to age zero with the given probability each year, whatever the
// action. Rewards are earned from the age at decision time and rescaled into
// [0,1]; reward_scale records the divisor.
struct ForestParams {
  int num_states = 4;
  int horizon = 20;
  double fire_probability = 0.1;
  double wait_reward_at_max = 4.0;
  // Raw reward for cutting at each age; empty selects the default schedule
  // (0 at age 0, 1 for ages 1..S-2, 2 at the oldest age).
  std::vector<double> cut_rewards;
};

struct ScaledMdp {
  TabularMDP mdp;
  double reward_scale = 1.0;  // raw = scaled * reward_scale
};

ScaledMdp build_forest(const ForestParams& params);

// Dirichlet-sampled transitions and uniform rewards; deterministic per seed.
// sparsity in [0,1] concentrates the rows, 1 yields one-hot transitions.
TabularMDP build_random_tabular(std::uint64_t seed, int S, int A, int H, double sparsity = 0.0);

// Latent tabular MDP observed through per-state context emissions. Every
// context in the support of emission[u] must decode back to u.
struct BlockEmission {
  TabularMDP latent;
  std::vector<std::vector<double>> emission;  // per latent state: dist over contexts
  std::vector<int> decoder;                   // context -> latent state

  int num_contexts() const { return static_cast<int>(decoder.size()); }
};

// Throws std::invalid_argument if shapes disagree or some supported context
// does not decode to its emitting latent state.
void validate(const BlockEmission& emission);

// Identity emission over the given MDP (contexts == latent states).
BlockEmission identity_emission(TabularMDP latent);

// Episodic environment over observed contexts whose hidden dynamics follow
// the latent MDP. The decoder is exposed for diagnostics only.
class BlockEnv : public TabularEnv {
 public:
  explicit BlockEnv(BlockEmission emission, double reward_scale = 1.0);

  int num_states() const override { return emission_.num_contexts(); }
  int num_actions() const override { return emission_.latent.num_actions; }
  int horizon() const override { return emission_.latent.horizon; }
  int reset(Rng& rng) override;
  std::pair<int, double> step(int action, Rng& rng) override;
  double raw_from_scaled(double r) const override { return r * reward_scale_; }

  const BlockEmission& emission() const { return emission_; }
  int decode(int context) const { return emission_.decoder[context]; }

 private:
  BlockEmission emission_;
  double reward_scale_;
  int latent_state_ = 0;
  int step_ = 0;
};

}  // namespace hybridrl
