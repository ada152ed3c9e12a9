#include "hybridrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridrl {

// ---------------------------------------------------------------------------
// Behavior policies and offline data

BehaviorKind behavior_kind_from_string(const std::string& name) {
  if (name == "optimal") return BehaviorKind::kOptimal;
  if (name == "uniform") return BehaviorKind::kUniform;
  if (name == "adversarial") return BehaviorKind::kAdversarial;
  throw std::invalid_argument("unknown behavior policy: " + name);
}

std::string to_string(BehaviorKind kind) {
  switch (kind) {
    case BehaviorKind::kOptimal: return "optimal";
    case BehaviorKind::kUniform: return "uniform";
    case BehaviorKind::kAdversarial: return "adversarial";
  }
  return "?";
}

StochasticPolicy make_behavior_policy(BehaviorKind kind, const OptimalValues& q_star) {
  const int S = q_star.num_states, A = q_star.num_actions, H = q_star.horizon;
  if (kind == BehaviorKind::kUniform) return StochasticPolicy::uniform(S, A, H);

  const DeterministicPolicy greedy = greedy_policy(q_star);
  if (kind == BehaviorKind::kOptimal) return StochasticPolicy::from_deterministic(greedy, A);

  // adversarial: 60% the lowest-index non-greedy action, 40% uniform
  StochasticPolicy p;
  p.num_states = S;
  p.num_actions = A;
  p.horizon = H;
  p.probs.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const int g = greedy.at(h, s);
      int opposite = g;
      for (int a = 0; a < A; ++a)
        if (a != g) {
          opposite = a;
          break;
        }
      for (int a = 0; a < A; ++a) p.at(h, s, a) = 0.4 / A;
      p.at(h, s, opposite) += 0.6;
    }
  }
  return p;
}

Dataset generate_offline_dataset(const TabularMDP& mdp, const StochasticPolicy& policy,
                                 int n_episodes, Rng& rng) {
  Dataset d;
  d.source_tag = SourceTag::kOffline;
  d.trajectories.reserve(n_episodes);
  for (int i = 0; i < n_episodes; ++i) d.trajectories.push_back(sample_episode(mdp, policy, rng, i));
  return d;
}

Dataset generate_offline_dataset(CodedEnv& env, int n_episodes, Rng& rng) {
  Dataset d;
  d.source_tag = SourceTag::kOffline;
  d.trajectories.reserve(n_episodes);
  const int A = env.num_actions(), H = env.horizon();
  for (int i = 0; i < n_episodes; ++i) {
    Trajectory t;
    t.episode_index = i;
    t.steps.reserve(H);
    int code = env.reset(rng);
    for (int h = 0; h < H; ++h) {
      const int a = rng.uniform_int(A);
      const auto out = env.step(a, rng);
      t.steps.push_back({code, a, out.reward_scaled, out.next_code});
      code = out.next_code;
    }
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

// ---------------------------------------------------------------------------
// ReplayState

ReplayState::ReplayState(int horizon, const Dataset& offline) : horizon_(horizon) {
  offline_.resize(horizon);
  online_.resize(horizon);
  for (const auto& t : offline.trajectories) {
    if (static_cast<int>(t.steps.size()) != horizon)
      throw std::invalid_argument("offline trajectory does not match the horizon");
    for (int h = 0; h < horizon; ++h) offline_[h].push_back(t.steps[h]);
  }
  offline_episodes_ = static_cast<int>(offline.trajectories.size());
}

void ReplayState::append_episode(const Trajectory& trajectory) {
  if (static_cast<int>(trajectory.steps.size()) != horizon_)
    throw std::invalid_argument("trajectory does not match the horizon");
  for (int h = 0; h < horizon_; ++h) online_[h].push_back(trajectory.steps[h]);
}

// ---------------------------------------------------------------------------
// UCBVI

UcbviHybrid::UcbviHybrid(int S, int A, int H, UcbviParams params)
    : S_(S), A_(A), H_(H), params_(params) {
  const std::size_t cells = static_cast<std::size_t>(H) * S * A;
  count_.assign(cells, 0);
  trans_count_.assign(cells * S, 0);
  reward_sum_.assign(cells, 0.0);
  q_.assign(cells, 0.0);
  v_.assign(static_cast<std::size_t>(H) * S, 0.0);
  bonus_.assign(cells, 0.0);
}

void UcbviHybrid::absorb(const Trajectory& t) {
  for (int h = 0; h < H_; ++h) {
    const auto& step = t.steps[h];
    const std::size_t i = idx(h, step.state, step.action);
    ++count_[i];
    ++trans_count_[i * S_ + step.next_state];
    reward_sum_[i] += step.reward;
  }
}

void UcbviHybrid::warm_start(const Dataset& offline) {
  for (const auto& t : offline.trajectories) absorb(t);
  n_off_ += static_cast<int>(offline.trajectories.size());
}

void UcbviHybrid::plan(long long n_total) {
  const double log_term =
      std::log(static_cast<double>(S_) * A_ * H_ * std::max<long long>(1, n_total) /
               params_.delta);
  std::vector<double> v_next(S_, 0.0);
  for (int h = H_ - 1; h >= 0; --h) {
    for (int s = 0; s < S_; ++s) {
      double best = 0.0;
      for (int a = 0; a < A_; ++a) {
        const std::size_t i = idx(h, s, a);
        const long long n = count_[i];
        const double bonus =
            params_.bonus_scale * H_ * std::sqrt(log_term / std::max<long long>(1, n));
        bonus_[i] = bonus;
        double q;
        if (n > 0) {
          q = reward_sum_[i] / n + bonus;
          const long long* row = &trans_count_[i * S_];
          for (int sp = 0; sp < S_; ++sp)
            if (row[sp] > 0) q += (static_cast<double>(row[sp]) / n) * v_next[sp];
        } else {
          // unvisited: empty reward estimate, uniform transition estimate
          q = bonus;
          double mean_v = 0.0;
          for (int sp = 0; sp < S_; ++sp) mean_v += v_next[sp];
          q += mean_v / S_;
        }
        q = std::clamp(q, 0.0, static_cast<double>(H_));
        q_[i] = q;
        if (a == 0 || q > best) best = q;
      }
      v_[static_cast<std::size_t>(h) * S_ + s] = best;
    }
    for (int s = 0; s < S_; ++s) v_next[s] = v_[static_cast<std::size_t>(h) * S_ + s];
  }
}

RunRecord UcbviHybrid::run(TabularEnv& env, int n_on, Rng& rng) {
  RunRecord rec;
  rec.agent_name = "ucbvi";
  rec.n_off = n_off_;
  rec.n_on = n_on;
  const long long n_total = static_cast<long long>(n_off_) + n_on;

  for (int t = 0; t < n_on; ++t) {
    plan(n_total);

    DeterministicPolicy policy;
    policy.num_states = S_;
    policy.horizon = H_;
    policy.action.assign(static_cast<std::size_t>(H_) * S_, 0);
    for (int h = 0; h < H_; ++h)
      for (int s = 0; s < S_; ++s) {
        int best_a = 0;
        double best = q_[idx(h, s, 0)];
        for (int a = 1; a < A_; ++a)
          if (q_[idx(h, s, a)] > best) {
            best = q_[idx(h, s, a)];
            best_a = a;
          }
        policy.at(h, s) = best_a;
      }

    EpisodeLog log;
    Trajectory traj;
    traj.episode_index = t;
    traj.steps.reserve(H_);
    int s = env.reset(rng);
    log.value_estimate = v_[s];
    double bonus_sum = 0.0, raw_return = 0.0;
    for (int h = 0; h < H_; ++h) {
      const int a = policy.at(h, s);
      bonus_sum += bonus_[idx(h, s, a)];
      const auto [sp, r] = env.step(a, rng);
      traj.steps.push_back({s, a, r, sp});
      raw_return += env.raw_from_scaled(r);
      s = sp;
    }
    absorb(traj);
    log.trajectory = std::move(traj);
    log.policy = std::move(policy);
    log.mean_bonus = bonus_sum / H_;
    log.raw_return = raw_return;
    rec.episodes.push_back(std::move(log));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// LSVI-UCB

LsviUcbHybrid::LsviUcbHybrid(const FeatureMap& features, int num_codes, int num_actions, int H,
                             LsviParams params)
    : num_codes_(num_codes),
      num_actions_(num_actions),
      horizon_(H),
      dim_(features.dimension),
      params_(params),
      replay_(H, Dataset{}) {
  if (params_.lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  feat_.resize(static_cast<Eigen::Index>(num_codes) * num_actions, dim_);
  for (int c = 0; c < num_codes; ++c)
    for (int a = 0; a < num_actions; ++a) {
      const Eigen::VectorXd phi = features.embed(c, a);
      if (phi.size() != dim_) throw std::invalid_argument("feature map returned a wrong dimension");
      feat_.row(static_cast<Eigen::Index>(c) * num_actions + a) = phi.transpose();
    }
  gram_.assign(H, Eigen::MatrixXd::Identity(dim_, dim_) * params_.lambda);
  weights_.assign(H, Eigen::VectorXd::Zero(dim_));
  q_table_.assign(H, Eigen::VectorXd::Zero(feat_.rows()));
  bonus_table_.assign(H, Eigen::VectorXd::Zero(feat_.rows()));
}

void LsviUcbHybrid::append(const Trajectory& t) {
  replay_.append_episode(t);
  for (int h = 0; h < horizon_; ++h) {
    const auto& step = t.steps[h];
    const Eigen::VectorXd phi =
        feat_.row(static_cast<Eigen::Index>(step.state) * num_actions_ + step.action);
    gram_[h].noalias() += phi * phi.transpose();
  }
}

void LsviUcbHybrid::warm_start(const Dataset& offline) {
  for (const auto& t : offline.trajectories) append(t);
}

void LsviUcbHybrid::refit() {
  const double h_cap = static_cast<double>(horizon_);
  const double weight_cap = 2.0 * horizon_ * std::sqrt(static_cast<double>(dim_));
  Eigen::VectorXd v_next = Eigen::VectorXd::Zero(num_codes_);

  for (int h = horizon_ - 1; h >= 0; --h) {
    // Ridge solve over the full buffer with targets r + V_{h+1}(s').
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim_);
    replay_.for_each(h, [&](const TransitionStep& s) {
      const double target = s.reward + v_next(s.next_state);
      b.noalias() +=
          feat_.row(static_cast<Eigen::Index>(s.state) * num_actions_ + s.action).transpose() *
          target;
    });
    Eigen::LLT<Eigen::MatrixXd> llt(gram_[h]);
    Eigen::VectorXd w = llt.solve(b);
    const double norm = w.norm();
    if (norm > weight_cap) w *= weight_cap / norm;
    weights_[h] = w;

    // Optimistic value and bonus tables for every (code, action).
    const Eigen::MatrixXd gram_inv = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
    bonus_table_[h] =
        params_.beta * ((feat_ * gram_inv).cwiseProduct(feat_)).rowwise().sum().cwiseMax(0.0).cwiseSqrt();
    q_table_[h] = ((feat_ * w) + bonus_table_[h]).cwiseMax(0.0).cwiseMin(h_cap);

    for (int c = 0; c < num_codes_; ++c) {
      double best = q_table_[h](static_cast<Eigen::Index>(c) * num_actions_);
      for (int a = 1; a < num_actions_; ++a)
        best = std::max(best, q_table_[h](static_cast<Eigen::Index>(c) * num_actions_ + a));
      v_next(c) = best;
    }
  }
}

RunRecord LsviUcbHybrid::run(CodedEnv& env, int n_on, Rng& rng) {
  RunRecord rec;
  rec.agent_name = "lsvi_ucb";
  rec.n_off = replay_.offline_episodes();
  rec.n_on = n_on;

  for (int t = 0; t < n_on; ++t) {
    refit();

    DeterministicPolicy policy;
    policy.num_states = num_codes_;
    policy.horizon = horizon_;
    policy.action.assign(static_cast<std::size_t>(horizon_) * num_codes_, 0);
    for (int h = 0; h < horizon_; ++h)
      for (int c = 0; c < num_codes_; ++c) {
        int best_a = 0;
        double best = q_table_[h](static_cast<Eigen::Index>(c) * num_actions_);
        for (int a = 1; a < num_actions_; ++a) {
          const double q = q_table_[h](static_cast<Eigen::Index>(c) * num_actions_ + a);
          if (q > best) {
            best = q;
            best_a = a;
          }
        }
        policy.at(h, c) = best_a;
      }

    EpisodeLog log;
    Trajectory traj;
    traj.episode_index = t;
    traj.steps.reserve(horizon_);
    int code = env.reset(rng);
    log.value_estimate = q_table_[0](static_cast<Eigen::Index>(code) * num_actions_ +
                                     policy.at(0, code));
    double bonus_sum = 0.0, raw_return = 0.0;
    for (int h = 0; h < horizon_; ++h) {
      const int a = policy.at(h, code);
      bonus_sum += bonus_table_[h](static_cast<Eigen::Index>(code) * num_actions_ + a);
      const auto out = env.step(a, rng);
      traj.steps.push_back({code, a, out.reward_scaled, out.next_code});
      raw_return += out.reward_raw;
      code = out.next_code;
    }
    append(traj);
    log.trajectory = std::move(traj);
    log.policy = std::move(policy);
    log.mean_bonus = bonus_sum / horizon_;
    log.raw_return = raw_return;
    rec.episodes.push_back(std::move(log));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Finite function classes and DISC-GOLF

void validate(const FiniteFunctionClass& fclass) {
  const std::size_t cells =
      static_cast<std::size_t>(fclass.horizon) * fclass.num_states * fclass.num_actions;
  for (std::size_t m = 0; m < fclass.members.size(); ++m) {
    if (fclass.members[m].size() != cells)
      throw std::invalid_argument("function class member " + std::to_string(m) +
                                  " has wrong shape");
    for (double v : fclass.members[m])
      if (!(v >= 0.0 && v <= static_cast<double>(fclass.horizon)))
        throw std::invalid_argument("function class member " + std::to_string(m) +
                                    " has values outside [0,H]");
  }
}

namespace {

// T_h applied to a next-step slice: R_h(s,a) + sum_s' P(s'|s,a) max_a' g(s',a').
std::vector<double> bellman_backup(const TabularMDP& mdp, int h,
                                   const std::vector<double>* next_slice) {
  const int S = mdp.num_states, A = mdp.num_actions;
  std::vector<double> out(static_cast<std::size_t>(S) * A, 0.0);
  std::vector<double> max_next(S, 0.0);
  if (next_slice != nullptr)
    for (int sp = 0; sp < S; ++sp) {
      double best = (*next_slice)[static_cast<std::size_t>(sp) * A];
      for (int a = 1; a < A; ++a)
        best = std::max(best, (*next_slice)[static_cast<std::size_t>(sp) * A + a]);
      max_next[sp] = best;
    }
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double q = mdp.reward_at(h, s, a);
      const auto row = mdp.transition_row(h, s, a);
      for (int sp = 0; sp < S; ++sp) q += row[sp] * max_next[sp];
      out[static_cast<std::size_t>(s) * A + a] = q;
    }
  return out;
}

}  // namespace

void check_bellman_closure(const FiniteFunctionClass& fclass, const TabularMDP& mdp, double tol) {
  const int S = fclass.num_states, A = fclass.num_actions, H = fclass.horizon;
  const std::size_t slice = static_cast<std::size_t>(S) * A;
  for (int m = 0; m < fclass.size(); ++m) {
    for (int h = 0; h < H; ++h) {
      const std::vector<double>* next = nullptr;
      std::vector<double> next_slice;
      if (h + 1 < H) {
        next_slice.assign(fclass.members[m].begin() + (h + 1) * slice,
                          fclass.members[m].begin() + (h + 2) * slice);
        next = &next_slice;
      }
      const std::vector<double> backup = bellman_backup(mdp, h, next);
      bool found = false;
      for (int other = 0; other < fclass.size() && !found; ++other) {
        double worst = 0.0;
        for (std::size_t i = 0; i < slice; ++i)
          worst = std::max(worst,
                           std::abs(fclass.members[other][h * slice + i] - backup[i]));
        found = worst <= tol;
      }
      if (!found)
        throw std::invalid_argument("Bellman backup of member " + std::to_string(m) +
                                    " at step " + std::to_string(h) +
                                    " is not represented in the class");
    }
  }
}

FiniteFunctionClass build_bellman_complete_class(const TabularMDP& mdp, int variants_per_step,
                                                 std::uint64_t seed, double bump_size,
                                                 int member_limit) {
  const int S = mdp.num_states, A = mdp.num_actions, H = mdp.horizon;
  const std::size_t slice = static_cast<std::size_t>(S) * A;
  if (variants_per_step < 1) throw std::invalid_argument("variants_per_step must be >= 1");

  double total = 1.0;
  for (int h = 0; h < H; ++h) total *= variants_per_step;
  if (total > member_limit)
    throw std::invalid_argument("function class would have " + std::to_string(total) +
                                " members, above the limit");

  Rng rng(Rng::derive(seed, 0xF1));
  // Last-step slices: the terminal backup (the reward) plus bumped variants.
  std::vector<std::vector<std::vector<double>>> slices(H);
  slices[H - 1].push_back(bellman_backup(mdp, H - 1, nullptr));
  for (int v = 1; v < variants_per_step; ++v) {
    std::vector<double> s = slices[H - 1][0];
    const std::size_t cell = (static_cast<std::size_t>(v) - 1 + rng.uniform_int(static_cast<int>(slice))) % slice;
    s[cell] = std::clamp(s[cell] + bump_size * (1.0 + rng.uniform01()), 0.0, static_cast<double>(H));
    slices[H - 1].push_back(std::move(s));
  }
  // Earlier slices are exact backups, which keeps the class Bellman-closed.
  for (int h = H - 2; h >= 0; --h)
    for (int v = 0; v < variants_per_step; ++v)
      slices[h].push_back(bellman_backup(mdp, h, &slices[h + 1][v]));

  FiniteFunctionClass fc;
  fc.num_states = S;
  fc.num_actions = A;
  fc.horizon = H;
  fc.completeness_closure = true;

  // Odometer over per-step variant choices; the all-zeros member is Q*.
  std::vector<int> pick(H, 0);
  for (;;) {
    std::vector<double> member;
    member.reserve(slice * H);
    for (int h = 0; h < H; ++h)
      member.insert(member.end(), slices[h][pick[h]].begin(), slices[h][pick[h]].end());
    for (double& v : member) v = std::clamp(v, 0.0, static_cast<double>(H));
    fc.members.push_back(std::move(member));
    int h = H - 1;
    while (h >= 0 && ++pick[h] == variants_per_step) pick[h--] = 0;
    if (h < 0) break;
  }

  validate(fc);
  check_bellman_closure(fc, mdp);
  return fc;
}

double beta_schedule(double n_total, int horizon, double class_size, double delta, double c1) {
  if (n_total <= 0.0 || horizon <= 0 || class_size <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("beta_schedule arguments must be positive");
  return c1 * std::log(n_total * horizon * class_size / delta);
}

DiscGolfFinite::DiscGolfFinite(FiniteFunctionClass fclass, DiscGolfParams params)
    : fclass_(std::move(fclass)), params_(params), replay_(fclass_.horizon, Dataset{}) {
  validate(fclass_);
  if (fclass_.size() == 0) throw std::invalid_argument("function class is empty");
  if (params_.beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
}

void DiscGolfFinite::warm_start(const Dataset& offline) {
  replay_ = ReplayState(fclass_.horizon, offline);
}

double DiscGolfFinite::pair_loss(int h, int member_i, int member_j) const {
  const int A = fclass_.num_actions;
  const bool last = (h + 1 == fclass_.horizon);
  // max_a' f_{h+1}(s', a') per next state, zero past the horizon
  std::vector<double> max_next(fclass_.num_states, 0.0);
  if (!last)
    for (int sp = 0; sp < fclass_.num_states; ++sp) {
      double best = fclass_.value(member_j, h + 1, sp, 0);
      for (int a = 1; a < A; ++a) best = std::max(best, fclass_.value(member_j, h + 1, sp, a));
      max_next[sp] = best;
    }
  double loss = 0.0;
  replay_.for_each(h, [&](const TransitionStep& s) {
    const double resid =
        fclass_.value(member_i, h, s.state, s.action) - s.reward - max_next[s.next_state];
    loss += resid * resid;
  });
  return loss;
}

std::vector<int> DiscGolfFinite::confidence_set(double beta) const {
  const int M = fclass_.size(), H = fclass_.horizon;
  std::vector<std::uint8_t> keep(M, 1);
  for (int h = 0; h < H; ++h) {
    for (int m = 0; m < M; ++m) {
      if (!keep[m]) continue;
      const double own = pair_loss(h, m, m);
      double best = own;
      for (int i = 0; i < M; ++i) {
        const double l = pair_loss(h, i, m);
        if (l < best) best = l;
      }
      if (own - best > beta) keep[m] = 0;
    }
  }
  std::vector<int> out;
  for (int m = 0; m < M; ++m)
    if (keep[m]) out.push_back(m);
  return out;
}

double DiscGolfFinite::insample_mse(int member) const {
  double loss = 0.0;
  std::size_t n = 0;
  for (int h = 0; h < fclass_.horizon; ++h) {
    loss += pair_loss(h, member, member);
    n += replay_.total_size(h);
  }
  return n == 0 ? 0.0 : loss / static_cast<double>(n);
}

std::pair<RunRecord, ConfidenceSetTrace> DiscGolfFinite::run(TabularEnv& env, int n_on, Rng& rng) {
  const int S = fclass_.num_states, A = fclass_.num_actions, H = fclass_.horizon;

  RunRecord rec;
  rec.agent_name = "disc_golf";
  rec.n_off = replay_.offline_episodes();
  rec.n_on = n_on;
  ConfidenceSetTrace trace;

  std::vector<int> surviving(fclass_.size());
  for (int m = 0; m < fclass_.size(); ++m) surviving[m] = m;

  for (int t = 0; t < n_on; ++t) {
    const int s1 = env.reset(rng);

    // Global optimism: the surviving member with the largest greedy value at
    // the initial state; ties go to the lowest member index.
    int selected = surviving.front();
    double best_value = -1.0;
    for (int m : surviving) {
      double v = fclass_.value(m, 0, s1, 0);
      for (int a = 1; a < A; ++a) v = std::max(v, fclass_.value(m, 0, s1, a));
      if (v > best_value) {
        best_value = v;
        selected = m;
      }
    }

    trace.selected_member.push_back(selected);
    trace.selected_insample_mse.push_back(insample_mse(selected));

    DeterministicPolicy policy;
    policy.num_states = S;
    policy.horizon = H;
    policy.action.assign(static_cast<std::size_t>(H) * S, 0);
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s) {
        int best_a = 0;
        double best = fclass_.value(selected, h, s, 0);
        for (int a = 1; a < A; ++a)
          if (fclass_.value(selected, h, s, a) > best) {
            best = fclass_.value(selected, h, s, a);
            best_a = a;
          }
        policy.at(h, s) = best_a;
      }

    EpisodeLog log;
    log.value_estimate = best_value;
    Trajectory traj;
    traj.episode_index = t;
    traj.steps.reserve(H);
    int s = s1;
    double raw_return = 0.0;
    for (int h = 0; h < H; ++h) {
      const int a = policy.at(h, s);
      const auto [sp, r] = env.step(a, rng);
      traj.steps.push_back({s, a, r, sp});
      raw_return += env.raw_from_scaled(r);
      s = sp;
    }
    replay_.append_episode(traj);
    log.trajectory = std::move(traj);
    log.policy = std::move(policy);
    log.raw_return = raw_return;
    rec.episodes.push_back(std::move(log));

    surviving = confidence_set(params_.beta);
    if (surviving.empty())
      throw std::runtime_error("confidence set is empty after episode " + std::to_string(t) +
                               "; beta is too small");
    trace.surviving.push_back(surviving);
    if (params_.reference_member >= 0)
      trace.reference_survived.push_back(
          std::binary_search(surviving.begin(), surviving.end(), params_.reference_member) ? 1
                                                                                           : 0);
  }
  return {std::move(rec), std::move(trace)};
}

}  // namespace hybridrl
