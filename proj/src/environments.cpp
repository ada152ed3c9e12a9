#include "hybridrl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridrl {

ScaledMdp build_forest(const ForestParams& params) {
  const int S = params.num_states, H = params.horizon;
  if (S < 2) throw std::invalid_argument("forest needs at least 2 ages");
  if (H < 1) throw std::invalid_argument("forest horizon must be positive");
  if (params.fire_probability < 0.0 || params.fire_probability > 1.0)
    throw std::invalid_argument("fire_probability outside [0,1]");

  std::vector<double> cut = params.cut_rewards;
  if (cut.empty()) {
    cut.assign(S, 0.0);
    for (int age = 1; age < S - 1; ++age) cut[age] = 1.0;
    cut[S - 1] = 2.0;
  }
  if (static_cast<int>(cut.size()) != S)
    throw std::invalid_argument("cut_rewards must have one entry per age");

  double max_raw = params.wait_reward_at_max;
  for (double r : cut) max_raw = std::max(max_raw, r);
  if (max_raw <= 0.0) max_raw = 1.0;

  const int A = 2;
  TabularMDP m;
  m.num_states = S;
  m.num_actions = A;
  m.horizon = H;
  m.initial_state = 0;
  m.transition.assign(static_cast<std::size_t>(H) * S * A * S, 0.0);
  m.reward.assign(static_cast<std::size_t>(H) * S * A, 0.0);

  const double p = params.fire_probability;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      // wait: earn the top reward only at the oldest age, then grow or burn
      m.reward_at(h, s, 0) = (s == S - 1 ? params.wait_reward_at_max : 0.0) / max_raw;
      auto wait_row = m.transition_row(h, s, 0);
      wait_row[0] += p;
      wait_row[std::min(s + 1, S - 1)] += 1.0 - p;
      // cut: earn the age-dependent reward and reset to age zero
      m.reward_at(h, s, 1) = cut[s] / max_raw;
      m.transition_row(h, s, 1)[0] = 1.0;
    }
  }
  validate(m);
  return {std::move(m), max_raw};
}

TabularMDP build_random_tabular(std::uint64_t seed, int S, int A, int H, double sparsity) {
  if (S < 1 || A < 1 || H < 1) throw std::invalid_argument("S, A, H must be positive");
  if (sparsity < 0.0 || sparsity > 1.0) throw std::invalid_argument("sparsity outside [0,1]");

  Rng rng(Rng::derive(seed, 0x7ab));
  TabularMDP m;
  m.num_states = S;
  m.num_actions = A;
  m.horizon = H;
  m.initial_state = 0;
  m.transition.assign(static_cast<std::size_t>(H) * S * A * S, 0.0);
  m.reward.assign(static_cast<std::size_t>(H) * S * A, 0.0);

  const double alpha = 1.0 - sparsity;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        auto row = m.transition_row(h, s, a);
        if (alpha <= 1e-9) {
          row[rng.uniform_int(S)] = 1.0;  // degenerate Dirichlet: one-hot
        } else {
          double sum = 0.0;
          for (int sp = 0; sp < S; ++sp) {
            row[sp] = rng.gamma(alpha);
            sum += row[sp];
          }
          if (sum <= 0.0) {
            row[rng.uniform_int(S)] = 1.0;
          } else {
            for (int sp = 0; sp < S; ++sp) row[sp] /= sum;
            // push rounding slack into the largest entry so the row sums to 1
            double total = 0.0;
            int arg = 0;
            for (int sp = 0; sp < S; ++sp) {
              total += row[sp];
              if (row[sp] > row[arg]) arg = sp;
            }
            row[arg] += 1.0 - total;
          }
        }
        m.reward_at(h, s, a) = rng.uniform01();
      }
    }
  }
  validate(m);
  return m;
}

void validate(const BlockEmission& e) {
  validate(e.latent);
  const int U = e.latent.num_states;
  if (static_cast<int>(e.emission.size()) != U)
    throw std::invalid_argument("emission needs one distribution per latent state");
  const int X = e.num_contexts();
  if (X < 1) throw std::invalid_argument("decoder is empty");
  for (int u = 0; u < U; ++u) {
    if (static_cast<int>(e.emission[u].size()) != X)
      throw std::invalid_argument("emission row " + std::to_string(u) + " has wrong length");
    double sum = 0.0;
    for (int x = 0; x < X; ++x) {
      const double q = e.emission[u][x];
      if (q < 0.0) throw std::invalid_argument("negative emission probability");
      if (q > 0.0 && e.decoder[x] != u)
        throw std::invalid_argument("context " + std::to_string(x) + " emitted by latent " +
                                    std::to_string(u) + " but decodes to " +
                                    std::to_string(e.decoder[x]));
      sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("emission row " + std::to_string(u) + " does not sum to 1");
  }
  for (int x = 0; x < X; ++x)
    if (e.decoder[x] < 0 || e.decoder[x] >= U)
      throw std::invalid_argument("decoder maps context " + std::to_string(x) + " out of range");
}

BlockEmission identity_emission(TabularMDP latent) {
  BlockEmission e;
  const int U = latent.num_states;
  e.latent = std::move(latent);
  e.emission.assign(U, std::vector<double>(U, 0.0));
  e.decoder.resize(U);
  for (int u = 0; u < U; ++u) {
    e.emission[u][u] = 1.0;
    e.decoder[u] = u;
  }
  return e;
}

BlockEnv::BlockEnv(BlockEmission emission, double reward_scale)
    : emission_(std::move(emission)), reward_scale_(reward_scale) {
  validate(emission_);
}

int BlockEnv::reset(Rng& rng) {
  step_ = 0;
  latent_state_ = emission_.latent.initial_state;
  return rng.categorical(emission_.emission[latent_state_]);
}

std::pair<int, double> BlockEnv::step(int action, Rng& rng) {
  const double r = emission_.latent.reward_at(step_, latent_state_, action);
  latent_state_ = rng.categorical(emission_.latent.transition_row(step_, latent_state_, action));
  ++step_;
  return {rng.categorical(emission_.emission[latent_state_]), r};
}

}  // namespace hybridrl
