#include "hybridrl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybridrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Density ratio with the 0/0 -> 0 and x/0 -> inf conventions.
double ratio(double numer, double denom) {
  if (numer <= 0.0) return 0.0;
  if (denom <= 0.0) return kInf;
  return numer / denom;
}

}  // namespace

std::size_t Partition::off_size() const {
  std::size_t n = 0;
  for (auto b : in_off) n += b != 0;
  return n;
}

std::size_t Partition::on_size() const {
  std::size_t n = 0;
  for (auto b : in_on) n += b != 0;
  return n;
}

void validate(const Partition& p) {
  const std::size_t cells = static_cast<std::size_t>(p.horizon) * p.num_states * p.num_actions;
  if (p.in_off.size() != cells || p.in_on.size() != cells)
    throw std::invalid_argument("partition marking has wrong shape");
  for (std::size_t i = 0; i < cells; ++i)
    if (p.in_off[i] == 0 && p.in_on[i] == 0)
      throw std::invalid_argument("partition does not cover cell " + std::to_string(i));
}

Partition partition_from_occupancy(const OccupancyTensor& mu, double threshold) {
  if (threshold <= 0.0)
    threshold = 1.0 / (static_cast<double>(mu.num_states) * mu.num_actions);
  Partition p;
  p.num_states = mu.num_states;
  p.num_actions = mu.num_actions;
  p.horizon = mu.horizon;
  const std::size_t cells = mu.density.size();
  p.in_off.assign(cells, 0);
  p.in_on.assign(cells, 0);
  for (std::size_t i = 0; i < cells; ++i) {
    if (mu.density[i] >= threshold)
      p.in_off[i] = 1;
    else
      p.in_on[i] = 1;
  }
  return p;
}

double partial_offline_concentrability(const TabularMDP& mdp, const OccupancyTensor& mu,
                                       const Partition& partition) {
  double sup = 0.0;
  for (int h = 0; h < partition.horizon; ++h)
    for (int s = 0; s < partition.num_states; ++s)
      for (int a = 0; a < partition.num_actions; ++a) {
        if (!partition.off_at(h, s, a)) continue;
        sup = std::max(sup, ratio(max_occupancy(mdp, h, s, a), mu.at(h, s, a)));
      }
  return sup;
}

double single_policy_concentrability(const TabularMDP& mdp, const OccupancyTensor& mu,
                                     const Partition& partition,
                                     const StochasticPolicy& comparator) {
  const OccupancyTensor d = policy_occupancy(mdp, comparator);
  double sup = 0.0;
  for (int h = 0; h < partition.horizon; ++h)
    for (int s = 0; s < partition.num_states; ++s)
      for (int a = 0; a < partition.num_actions; ++a) {
        if (!partition.off_at(h, s, a)) continue;
        sup = std::max(sup, ratio(d.at(h, s, a), mu.at(h, s, a)));
      }
  return sup;
}

VisitCurves partition_visit_curves(const RunRecord& run, const Partition& partition) {
  VisitCurves out;
  out.off_curve.reserve(run.episodes.size());
  out.on_curve.reserve(run.episodes.size());
  double off = 0.0, on = 0.0;
  for (const auto& ep : run.episodes) {
    for (int h = 0; h < static_cast<int>(ep.trajectory.steps.size()); ++h) {
      const auto& step = ep.trajectory.steps[h];
      if (partition.off_at(h, step.state, step.action)) off += 1.0;
      if (partition.on_at(h, step.state, step.action)) on += 1.0;
    }
    out.off_curve.push_back(off);
    out.on_curve.push_back(on);
  }
  return out;
}

MixtureCoverageCurves empirical_partition_concentrability(const RunRecord& run,
                                                          const TabularMDP& mdp,
                                                          const OccupancyTensor& mu,
                                                          const Partition& partition) {
  MixtureCoverageCurves out;
  const std::size_t cells = mu.density.size();
  std::vector<double> mixture(cells, 0.0);
  int t = 0;
  for (const auto& ep : run.episodes) {
    const OccupancyTensor occ = policy_occupancy(
        mdp, StochasticPolicy::from_deterministic(ep.policy, mdp.num_actions));
    ++t;
    for (std::size_t i = 0; i < cells; ++i)
      mixture[i] += (occ.density[i] - mixture[i]) / t;

    double full = 0.0, off = 0.0, on = 0.0;
    for (int h = 0; h < partition.horizon; ++h)
      for (int s = 0; s < partition.num_states; ++s)
        for (int a = 0; a < partition.num_actions; ++a) {
          const std::size_t i = partition.index(h, s, a);
          const double r = ratio(mixture[i], mu.density[i]);
          full = std::max(full, r);
          if (partition.in_off[i]) off = std::max(off, r);
          if (partition.in_on[i]) on = std::max(on, r);
        }
    out.full.push_back(full);
    out.off_side.push_back(off);
    out.on_side.push_back(on);
  }
  return out;
}

EigCoverageCurves covariance_eig_curves(
    const std::vector<std::vector<Eigen::VectorXd>>& features_per_episode,
    const Projector& off_projector, const Projector& on_projector, int k) {
  if (features_per_episode.empty())
    throw std::invalid_argument("covariance_eig_curves: no episodes");
  const int d = off_projector.dim();
  if (on_projector.dim() != d)
    throw std::invalid_argument("projectors disagree on the dimension");
  if (k < 1 || k > d) throw std::invalid_argument("k out of range");

  const Eigen::MatrixXd p_off = off_projector.matrix();
  const Eigen::MatrixXd p_on = on_projector.matrix();

  EigCoverageCurves out;
  Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(d, d);
  std::size_t count = 0;
  for (const auto& episode : features_per_episode) {
    for (const auto& phi : episode) {
      if (phi.size() != d)
        throw std::invalid_argument("feature dimension does not match the projectors");
      moment.noalias() += phi * phi.transpose();
      ++count;
    }
    if (count == 0) throw std::invalid_argument("episode carries no feature vectors");
    const Eigen::MatrixXd cov = moment / static_cast<double>(count);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(cov, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> off(p_off * cov * p_off,
                                                       Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> on(p_on * cov * p_on, Eigen::EigenvaluesOnly);

    // eigenvalues() is ascending: the j-th largest sits at index d - j
    const double lam_full = std::max(0.0, full.eigenvalues()(d - 1));
    const double lam_off = std::max(0.0, off.eigenvalues()(d - k));
    const double lam_on = std::max(0.0, on.eigenvalues()(k));
    out.lambda_full.push_back(lam_full);
    out.lambda_off.push_back(lam_off);
    out.lambda_on.push_back(lam_on);
    out.inv_full.push_back(lam_full > 0.0 ? 1.0 / lam_full : kInf);
    out.inv_off.push_back(lam_off > 0.0 ? 1.0 / lam_off : kInf);
    out.inv_on.push_back(lam_on > 0.0 ? 1.0 / lam_on : kInf);
  }
  return out;
}

double block_latent_coverage(const BlockEmission& emission, const OccupancyTensor& latent_mu,
                             const Partition& latent_partition) {
  return partial_offline_concentrability(emission.latent, latent_mu, latent_partition);
}

Trajectory decode_trajectory(const BlockEmission& emission, const Trajectory& observed) {
  Trajectory latent;
  latent.episode_index = observed.episode_index;
  latent.steps.reserve(observed.steps.size());
  for (const auto& s : observed.steps)
    latent.steps.push_back(
        {emission.decoder[s.state], s.action, s.reward, emission.decoder[s.next_state]});
  return latent;
}

Dataset decode_dataset(const BlockEmission& emission, const Dataset& observed) {
  Dataset latent;
  latent.source_tag = observed.source_tag;
  latent.trajectories.reserve(observed.trajectories.size());
  for (const auto& t : observed.trajectories)
    latent.trajectories.push_back(decode_trajectory(emission, t));
  return latent;
}

OccupancyTensor empirical_occupancy(const Dataset& data, int S, int A, int H) {
  OccupancyTensor occ;
  occ.num_states = S;
  occ.num_actions = A;
  occ.horizon = H;
  occ.density.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  if (data.trajectories.empty()) return occ;
  for (const auto& t : data.trajectories)
    for (int h = 0; h < H; ++h) occ.at(h, t.steps[h].state, t.steps[h].action) += 1.0;
  const double n = static_cast<double>(data.trajectories.size());
  for (double& v : occ.density) v /= n;
  return occ;
}

RegretCurves regret_curve(const RunRecord& run, double v_star_raw) {
  RegretCurves out;
  out.cumulative_regret.reserve(run.episodes.size());
  out.per_episode_avg_reward.reserve(run.episodes.size());
  double cum = 0.0;
  for (const auto& ep : run.episodes) {
    cum += v_star_raw - ep.raw_return;
    out.cumulative_regret.push_back(cum);
    const double H = static_cast<double>(ep.trajectory.steps.size());
    out.per_episode_avg_reward.push_back(ep.raw_return / H);
  }
  return out;
}

CoverageCurve aggregate_trials(const std::vector<std::vector<double>>& per_trial) {
  if (per_trial.empty()) throw std::invalid_argument("aggregate_trials: no trials");
  const std::size_t len = per_trial.front().size();
  for (const auto& c : per_trial)
    if (c.size() != len) throw std::invalid_argument("aggregate_trials: length mismatch");

  CoverageCurve out;
  out.num_trials = static_cast<int>(per_trial.size());
  out.mean.resize(len);
  out.lo.resize(len);
  out.hi.resize(len);
  const double n = static_cast<double>(per_trial.size());
  for (std::size_t i = 0; i < len; ++i) {
    double m = 0.0;
    for (const auto& c : per_trial) m += c[i];
    m /= n;
    double band = 0.0;
    if (per_trial.size() > 1) {
      double ss = 0.0;
      for (const auto& c : per_trial) ss += (c[i] - m) * (c[i] - m);
      band = 1.96 * std::sqrt(ss / (n - 1.0));
    }
    out.mean[i] = m;
    out.lo[i] = m - band;
    out.hi[i] = m + band;
  }
  return out;
}

double mean_of(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  return xs.empty() ? 0.0 : m / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
}

IntervalEstimate paired_mean_ci(const std::vector<double>& diffs) {
  IntervalEstimate e;
  e.mean = mean_of(diffs);
  const double se = sample_std(diffs) / std::sqrt(static_cast<double>(std::max<std::size_t>(1, diffs.size())));
  e.lo = e.mean - 1.96 * se;
  e.hi = e.mean + 1.96 * se;
  return e;
}

SlopeFit ls_slope(const std::vector<double>& y) {
  SlopeFit fit;
  const std::size_t n = y.size();
  if (n < 3) return fit;
  const double xbar = (static_cast<double>(n) + 1.0) / 2.0;
  const double ybar = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i + 1) - xbar;
    sxx += dx * dx;
    sxy += dx * (y[i] - ybar);
  }
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = ybar + fit.slope * (static_cast<double>(i + 1) - xbar);
    rss += (y[i] - pred) * (y[i] - pred);
  }
  fit.stderr_slope = std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx);
  return fit;
}

}  // namespace hybridrl
