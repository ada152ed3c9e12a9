#include "hybridrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace hybridrl {

namespace {

constexpr double kRowSumTol = 1e-12;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

void validate(const TabularMDP& mdp) {
  if (mdp.num_states < 1) fail("num_states must be positive");
  if (mdp.num_actions < 1) fail("num_actions must be positive");
  if (mdp.horizon < 1) fail("horizon must be positive");
  if (mdp.initial_state < 0 || mdp.initial_state >= mdp.num_states)
    fail("initial_state out of range");

  const std::size_t cells = static_cast<std::size_t>(mdp.horizon) * mdp.num_states * mdp.num_actions;
  if (mdp.reward.size() != cells) fail("reward array has wrong size");
  if (mdp.transition.size() != cells * mdp.num_states) fail("transition array has wrong size");

  for (int h = 0; h < mdp.horizon; ++h) {
    for (int s = 0; s < mdp.num_states; ++s) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        const double r = mdp.reward_at(h, s, a);
        if (!(r >= 0.0 && r <= 1.0))
          fail("reward " + std::to_string(r) + " outside [0,1] at (h=" + std::to_string(h) +
               ", s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")");
        double sum = 0.0;
        for (double p : mdp.transition_row(h, s, a)) {
          if (p < 0.0)
            fail("negative transition probability at (h=" + std::to_string(h) +
                 ", s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")");
          sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
          fail("transition row sums to " + std::to_string(sum) + " at (h=" + std::to_string(h) +
               ", s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")");
      }
    }
  }
}

StochasticPolicy StochasticPolicy::uniform(int S, int A, int H) {
  StochasticPolicy p;
  p.num_states = S;
  p.num_actions = A;
  p.horizon = H;
  p.probs.assign(static_cast<std::size_t>(H) * S * A, 1.0 / A);
  return p;
}

StochasticPolicy StochasticPolicy::from_deterministic(const DeterministicPolicy& d, int num_actions) {
  StochasticPolicy p;
  p.num_states = d.num_states;
  p.num_actions = num_actions;
  p.horizon = d.horizon;
  p.probs.assign(static_cast<std::size_t>(d.horizon) * d.num_states * num_actions, 0.0);
  for (int h = 0; h < d.horizon; ++h)
    for (int s = 0; s < d.num_states; ++s) p.at(h, s, d.at(h, s)) = 1.0;
  return p;
}

OptimalValues optimal_values(const TabularMDP& mdp) {
  const int S = mdp.num_states, A = mdp.num_actions, H = mdp.horizon;
  OptimalValues out;
  out.num_states = S;
  out.num_actions = A;
  out.horizon = H;
  out.q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  out.v.assign(static_cast<std::size_t>(H) * S, 0.0);

  std::vector<double> v_next(S, 0.0);  // V_{h+1}, zero beyond the horizon
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double best = -1.0;
      for (int a = 0; a < A; ++a) {
        double q = mdp.reward_at(h, s, a);
        const auto row = mdp.transition_row(h, s, a);
        for (int sp = 0; sp < S; ++sp) q += row[sp] * v_next[sp];
        out.q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
        if (q > best) best = q;
      }
      out.v[static_cast<std::size_t>(h) * S + s] = best;
    }
    for (int s = 0; s < S; ++s) v_next[s] = out.v[static_cast<std::size_t>(h) * S + s];
  }
  return out;
}

DeterministicPolicy greedy_policy(const OptimalValues& values) {
  DeterministicPolicy p;
  p.num_states = values.num_states;
  p.horizon = values.horizon;
  p.action.assign(static_cast<std::size_t>(values.horizon) * values.num_states, 0);
  for (int h = 0; h < values.horizon; ++h) {
    for (int s = 0; s < values.num_states; ++s) {
      int best_a = 0;
      double best = values.q_at(h, s, 0);
      for (int a = 1; a < values.num_actions; ++a) {
        const double q = values.q_at(h, s, a);
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      p.at(h, s) = best_a;
    }
  }
  return p;
}

OccupancyTensor policy_occupancy(const TabularMDP& mdp, const StochasticPolicy& policy) {
  const int S = mdp.num_states, A = mdp.num_actions, H = mdp.horizon;
  OccupancyTensor d;
  d.num_states = S;
  d.num_actions = A;
  d.horizon = H;
  d.density.assign(static_cast<std::size_t>(H) * S * A, 0.0);

  std::vector<double> state_dist(S, 0.0);
  state_dist[mdp.initial_state] = 1.0;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      if (state_dist[s] == 0.0) continue;
      for (int a = 0; a < A; ++a) d.at(h, s, a) = state_dist[s] * policy.at(h, s, a);
    }
    if (h + 1 == H) break;
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double mass = d.at(h, s, a);
        if (mass == 0.0) continue;
        const auto row = mdp.transition_row(h, s, a);
        for (int sp = 0; sp < S; ++sp) next[sp] += mass * row[sp];
      }
    }
    state_dist.swap(next);
  }
  return d;
}

double max_occupancy(const TabularMDP& mdp, int h, int s, int a) {
  const int S = mdp.num_states, A = mdp.num_actions;
  if (h < 0 || h >= mdp.horizon || s < 0 || s >= S || a < 0 || a >= A)
    fail("max_occupancy: index out of range");

  // Value-to-go for the reach objective: V_h(state) = P(hit (s,a) at step h
  // | at state on step h) under the best continuation.
  std::vector<double> v(S, 0.0);
  v[s] = 1.0;  // at step h, being in s and playing a pays 1
  for (int step = h - 1; step >= 0; --step) {
    std::vector<double> prev(S, 0.0);
    for (int st = 0; st < S; ++st) {
      double best = 0.0;
      for (int act = 0; act < A; ++act) {
        const auto row = mdp.transition_row(step, st, act);
        double val = 0.0;
        for (int sp = 0; sp < S; ++sp) val += row[sp] * v[sp];
        if (val > best) best = val;
      }
      prev[st] = best;
    }
    v.swap(prev);
  }
  return v[mdp.initial_state];
}

Trajectory sample_episode(const TabularMDP& mdp, const StochasticPolicy& policy, Rng& rng,
                          int episode_index) {
  Trajectory traj;
  traj.episode_index = episode_index;
  traj.steps.reserve(mdp.horizon);
  int s = mdp.initial_state;
  for (int h = 0; h < mdp.horizon; ++h) {
    const int a = rng.categorical(policy.row(h, s));
    const double r = mdp.reward_at(h, s, a);
    const int sp = rng.categorical(mdp.transition_row(h, s, a));
    traj.steps.push_back({s, a, r, sp});
    s = sp;
  }
  return traj;
}

double policy_value(const TabularMDP& mdp, const StochasticPolicy& policy) {
  const int S = mdp.num_states, A = mdp.num_actions, H = mdp.horizon;
  std::vector<double> v(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    std::vector<double> prev(S, 0.0);
    for (int s = 0; s < S; ++s) {
      double val = 0.0;
      for (int a = 0; a < A; ++a) {
        const double p = policy.at(h, s, a);
        if (p == 0.0) continue;
        double q = mdp.reward_at(h, s, a);
        const auto row = mdp.transition_row(h, s, a);
        for (int sp = 0; sp < S; ++sp) q += row[sp] * v[sp];
        val += p * q;
      }
      prev[s] = val;
    }
    v.swap(prev);
  }
  return v[mdp.initial_state];
}

std::string TabularMDP::to_json() const {
  nlohmann::json j;
  j["S"] = num_states;
  j["A"] = num_actions;
  j["H"] = horizon;
  j["s0"] = initial_state;
  auto& P = j["P"] = nlohmann::json::array();
  auto& R = j["R"] = nlohmann::json::array();
  for (int h = 0; h < horizon; ++h) {
    nlohmann::json ph = nlohmann::json::array(), rh = nlohmann::json::array();
    for (int s = 0; s < num_states; ++s) {
      nlohmann::json ps = nlohmann::json::array(), rs = nlohmann::json::array();
      for (int a = 0; a < num_actions; ++a) {
        const auto row = transition_row(h, s, a);
        ps.push_back(std::vector<double>(row.begin(), row.end()));
        rs.push_back(reward_at(h, s, a));
      }
      ph.push_back(std::move(ps));
      rh.push_back(std::move(rs));
    }
    P.push_back(std::move(ph));
    R.push_back(std::move(rh));
  }
  return j.dump();
}

TabularMDP TabularMDP::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TabularMDP m;
  m.num_states = j.at("S").get<int>();
  m.num_actions = j.at("A").get<int>();
  m.horizon = j.at("H").get<int>();
  m.initial_state = j.at("s0").get<int>();
  const std::size_t cells =
      static_cast<std::size_t>(m.horizon) * m.num_states * m.num_actions;
  m.transition.assign(cells * m.num_states, 0.0);
  m.reward.assign(cells, 0.0);
  const auto& P = j.at("P");
  const auto& R = j.at("R");
  for (int h = 0; h < m.horizon; ++h) {
    for (int s = 0; s < m.num_states; ++s) {
      for (int a = 0; a < m.num_actions; ++a) {
        const auto row = P.at(h).at(s).at(a).get<std::vector<double>>();
        if (static_cast<int>(row.size()) != m.num_states)
          fail("P row has wrong length in JSON document");
        std::copy(row.begin(), row.end(), m.transition_row(h, s, a).begin());
        m.reward_at(h, s, a) = R.at(h).at(s).at(a).get<double>();
      }
    }
  }
  validate(m);
  return m;
}

}  // namespace hybridrl
