#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "hybridrl/environments.hpp"
#include "hybridrl/mdp.hpp"

using namespace hybridrl;

namespace {

// Independent forward evaluation: propagate the state distribution and
// accumulate expected reward. Deliberately a different computation path from
// policy_value's backward pass.
double forward_policy_value(const TabularMDP& mdp, const StochasticPolicy& policy) {
  std::vector<double> dist(mdp.num_states, 0.0);
  dist[mdp.initial_state] = 1.0;
  double total = 0.0;
  for (int h = 0; h < mdp.horizon; ++h) {
    std::vector<double> next(mdp.num_states, 0.0);
    for (int s = 0; s < mdp.num_states; ++s) {
      if (dist[s] == 0.0) continue;
      for (int a = 0; a < mdp.num_actions; ++a) {
        const double mass = dist[s] * policy.at(h, s, a);
        if (mass == 0.0) continue;
        total += mass * mdp.reward_at(h, s, a);
        const auto row = mdp.transition_row(h, s, a);
        for (int sp = 0; sp < mdp.num_states; ++sp) next[sp] += mass * row[sp];
      }
    }
    dist.swap(next);
  }
  return total;
}

// All deterministic policies, as an odometer over (h,s) cells.
std::vector<DeterministicPolicy> all_deterministic_policies(int S, int A, int H) {
  std::vector<DeterministicPolicy> out;
  DeterministicPolicy p;
  p.num_states = S;
  p.horizon = H;
  p.action.assign(static_cast<std::size_t>(H) * S, 0);
  for (;;) {
    out.push_back(p);
    int i = static_cast<int>(p.action.size()) - 1;
    while (i >= 0 && ++p.action[i] == A) p.action[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

TabularMDP two_state_chain() {
  // deterministic 2-state chain, H=2, reward 1 only at (h=1, s=1, a=0);
  // action 0 moves forward, action 1 stays
  TabularMDP m;
  m.num_states = 2;
  m.num_actions = 2;
  m.horizon = 2;
  m.initial_state = 0;
  m.transition.assign(2 * 2 * 2 * 2, 0.0);
  m.reward.assign(2 * 2 * 2, 0.0);
  for (int h = 0; h < 2; ++h)
    for (int s = 0; s < 2; ++s) {
      m.transition_row(h, s, 0)[1] = 1.0;  // forward
      m.transition_row(h, s, 1)[s] = 1.0;  // stay
    }
  m.reward_at(1, 1, 0) = 1.0;
  validate(m);
  return m;
}

}  // namespace

TEST_CASE("validate accepts a well-formed MDP and names violations") {
  TabularMDP m = two_state_chain();
  CHECK_NOTHROW(validate(m));

  TabularMDP bad_row = m;
  bad_row.transition_row(1, 0, 1)[0] = 0.9;
  bad_row.transition_row(1, 0, 1)[1] = 0.0;
  CHECK_THROWS_WITH_AS(validate(bad_row), doctest::Contains("(h=1, s=0, a=1)"),
                       std::invalid_argument);

  TabularMDP bad_reward = m;
  bad_reward.reward_at(0, 1, 1) = 1.5;
  CHECK_THROWS_WITH_AS(validate(bad_reward), doctest::Contains("(h=0, s=1, a=1)"),
                       std::invalid_argument);
}

TEST_CASE("optimal values: one-step MDP reduces to the reward") {
  TabularMDP m = build_random_tabular(3, 3, 2, 1);
  const OptimalValues opt = optimal_values(m);
  for (int s = 0; s < 3; ++s) {
    double best = 0.0;
    for (int a = 0; a < 2; ++a) {
      CHECK(opt.q_at(0, s, a) == doctest::Approx(m.reward_at(0, s, a)).epsilon(1e-12));
      best = std::max(best, m.reward_at(0, s, a));
    }
    CHECK(opt.v_at(0, s) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("optimal values: forced path in the deterministic chain") {
  const TabularMDP m = two_state_chain();
  const OptimalValues opt = optimal_values(m);
  CHECK(opt.v_at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("optimal values match exhaustive policy enumeration on a short forest") {
  ForestParams params;
  params.horizon = 3;
  const ScaledMdp forest = build_forest(params);
  const OptimalValues opt = optimal_values(forest.mdp);
  double best = 0.0;
  for (const auto& p : all_deterministic_policies(4, 2, 3))
    best = std::max(best,
                    forward_policy_value(forest.mdp, StochasticPolicy::from_deterministic(p, 2)));
  CHECK(opt.v_at(0, forest.mdp.initial_state) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("policy occupancy: deterministic MDP and policy give point masses") {
  const TabularMDP m = two_state_chain();
  DeterministicPolicy d;
  d.num_states = 2;
  d.horizon = 2;
  d.action = {0, 0, 0, 0};
  const OccupancyTensor occ = policy_occupancy(m, StochasticPolicy::from_deterministic(d, 2));
  CHECK(occ.at(0, 0, 0) == doctest::Approx(1.0));
  CHECK(occ.at(1, 1, 0) == doctest::Approx(1.0));
}

TEST_CASE("policy occupancy slices are normalized on random MDPs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TabularMDP m = build_random_tabular(seed, 2 + seed % 4, 2 + seed % 2, 1 + seed % 5,
                                              (seed % 3) * 0.3);
    Rng rng(seed * 31 + 5);
    StochasticPolicy pi = StochasticPolicy::uniform(m.num_states, m.num_actions, m.horizon);
    for (int h = 0; h < m.horizon; ++h)
      for (int s = 0; s < m.num_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < m.num_actions; ++a) {
          pi.at(h, s, a) = rng.uniform01() + 1e-3;
          sum += pi.at(h, s, a);
        }
        for (int a = 0; a < m.num_actions; ++a) pi.at(h, s, a) /= sum;
      }
    const OccupancyTensor occ = policy_occupancy(m, pi);
    for (int h = 0; h < m.horizon; ++h) {
      double sum = 0.0;
      for (int s = 0; s < m.num_states; ++s)
        for (int a = 0; a < m.num_actions; ++a) sum += occ.at(h, s, a);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("policy occupancy matches Monte-Carlo frequencies on the forest") {
  const ScaledMdp forest = build_forest(ForestParams{});
  const TabularMDP& m = forest.mdp;
  const StochasticPolicy uniform = StochasticPolicy::uniform(4, 2, 20);
  const OccupancyTensor occ = policy_occupancy(m, uniform);

  const int n = 100000;
  std::vector<double> freq(occ.density.size(), 0.0);
  Rng rng(20240601);
  for (int i = 0; i < n; ++i) {
    const Trajectory t = sample_episode(m, uniform, rng, i);
    for (int h = 0; h < m.horizon; ++h)
      freq[(static_cast<std::size_t>(h) * 4 + t.steps[h].state) * 2 + t.steps[h].action] += 1.0;
  }
  int ok = 0, cells = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    const double p = occ.density[i];
    const double se = std::sqrt(p * (1.0 - p) / n);
    ++cells;
    if (std::abs(freq[i] / n - p) <= 3.0 * se + 1e-12) ++ok;
  }
  CHECK(static_cast<double>(ok) / cells >= 0.99);
}

TEST_CASE("max occupancy: reachability is binary in deterministic MDPs") {
  const TabularMDP m = two_state_chain();
  CHECK(max_occupancy(m, 1, 1, 0) == doctest::Approx(1.0));  // take action 0 first
  CHECK(max_occupancy(m, 0, 1, 0) == doctest::Approx(0.0));  // start state is 0
  CHECK(max_occupancy(m, 0, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("max occupancy equals brute force over deterministic policies") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int S = 2 + static_cast<int>(seed % 2), A = 2, H = 2 + static_cast<int>(seed % 2);
    const TabularMDP m = build_random_tabular(seed + 100, S, A, H, 0.0);
    const auto policies = all_deterministic_policies(S, A, H);
    std::vector<OccupancyTensor> occs;
    occs.reserve(policies.size());
    for (const auto& p : policies)
      occs.push_back(policy_occupancy(m, StochasticPolicy::from_deterministic(p, A)));
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          double brute = 0.0;
          for (const auto& occ : occs) brute = std::max(brute, occ.at(h, s, a));
          CHECK(max_occupancy(m, h, s, a) == doctest::Approx(brute).epsilon(1e-12));
        }
  }
}

TEST_CASE("max occupancy dominates random stochastic policies") {
  const TabularMDP m = build_random_tabular(11, 3, 2, 3, 0.0);
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    StochasticPolicy pi = StochasticPolicy::uniform(3, 2, 3);
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 3; ++s) {
        const double u = rng.uniform01();
        pi.at(h, s, 0) = u;
        pi.at(h, s, 1) = 1.0 - u;
      }
    const OccupancyTensor occ = policy_occupancy(m, pi);
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) CHECK(max_occupancy(m, h, s, a) >= occ.at(h, s, a) - 1e-9);
  }
}

TEST_CASE("sample_episode is seed-deterministic and respects determinism") {
  const TabularMDP chain = two_state_chain();
  DeterministicPolicy d;
  d.num_states = 2;
  d.horizon = 2;
  d.action = {0, 1, 0, 1};
  const StochasticPolicy pi = StochasticPolicy::from_deterministic(d, 2);
  Rng a(1), b(2);
  const Trajectory ta = sample_episode(chain, pi, a);
  const Trajectory tb = sample_episode(chain, pi, b);
  for (int h = 0; h < 2; ++h) {
    CHECK(ta.steps[h].state == tb.steps[h].state);
    CHECK(ta.steps[h].action == tb.steps[h].action);
  }

  const TabularMDP m = build_random_tabular(5, 4, 2, 6, 0.0);
  const StochasticPolicy uniform = StochasticPolicy::uniform(4, 2, 6);
  Rng r1(77), r2(77);
  const Trajectory t1 = sample_episode(m, uniform, r1);
  const Trajectory t2 = sample_episode(m, uniform, r2);
  for (int h = 0; h < 6; ++h) {
    CHECK(t1.steps[h].state == t2.steps[h].state);
    CHECK(t1.steps[h].action == t2.steps[h].action);
    CHECK(t1.steps[h].next_state == t2.steps[h].next_state);
    CHECK(t1.steps[h].reward == t2.steps[h].reward);
  }
  for (int h = 0; h + 1 < 6; ++h) CHECK(t1.steps[h].next_state == t1.steps[h + 1].state);
}

TEST_CASE("episode state frequencies match the occupancy oracle") {
  const TabularMDP m = build_random_tabular(17, 3, 2, 4, 0.0);
  const StochasticPolicy uniform = StochasticPolicy::uniform(3, 2, 4);
  const OccupancyTensor occ = policy_occupancy(m, uniform);
  const int n = 50000;
  std::vector<double> freq(occ.density.size(), 0.0);
  Rng rng(4242);
  for (int i = 0; i < n; ++i) {
    const Trajectory t = sample_episode(m, uniform, rng, i);
    for (int h = 0; h < 4; ++h)
      freq[(static_cast<std::size_t>(h) * 3 + t.steps[h].state) * 2 + t.steps[h].action] += 1.0;
  }
  int ok = 0, cells = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    const double p = occ.density[i];
    const double se = std::sqrt(p * (1.0 - p) / n);
    ++cells;
    if (std::abs(freq[i] / n - p) <= 3.0 * se + 1e-12) ++ok;
  }
  CHECK(static_cast<double>(ok) / cells >= 0.99);
}

TEST_CASE("policy value: optimal greedy policy recovers V*") {
  const ScaledMdp forest = build_forest(ForestParams{});
  const OptimalValues opt = optimal_values(forest.mdp);
  const StochasticPolicy greedy = StochasticPolicy::from_deterministic(greedy_policy(opt), 2);
  CHECK(policy_value(forest.mdp, greedy) ==
        doctest::Approx(opt.v_at(0, forest.mdp.initial_state)).epsilon(1e-10));
}

TEST_CASE("policy value: zero-reward MDP evaluates to zero") {
  TabularMDP m = build_random_tabular(23, 3, 2, 5, 0.0);
  std::fill(m.reward.begin(), m.reward.end(), 0.0);
  CHECK(policy_value(m, StochasticPolicy::uniform(3, 2, 5)) == doctest::Approx(0.0));
}

TEST_CASE("policy value matches the Monte-Carlo mean return on the forest") {
  const ScaledMdp forest = build_forest(ForestParams{});
  const StochasticPolicy uniform = StochasticPolicy::uniform(4, 2, 20);
  const double v = policy_value(forest.mdp, uniform);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  Rng rng(31337);
  for (int i = 0; i < n; ++i) {
    double ret = 0.0;
    for (const auto& step : sample_episode(forest.mdp, uniform, rng, i).steps) ret += step.reward;
    sum += ret;
    sumsq += ret * ret;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sumsq / n - mean * mean) / n);
  CHECK(std::abs(mean - v) <= 3.0 * se);
}

TEST_CASE("TabularMDP JSON round trip") {
  const ScaledMdp forest = build_forest(ForestParams{});
  const TabularMDP parsed = TabularMDP::from_json(forest.mdp.to_json());
  CHECK(parsed.num_states == forest.mdp.num_states);
  CHECK(parsed.num_actions == forest.mdp.num_actions);
  CHECK(parsed.horizon == forest.mdp.horizon);
  CHECK(parsed.initial_state == forest.mdp.initial_state);
  CHECK(parsed.transition == forest.mdp.transition);
  CHECK(parsed.reward == forest.mdp.reward);
}
