#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hybridrl/agents.hpp"
#include "hybridrl/environments.hpp"
#include "hybridrl/linear.hpp"
#include "hybridrl/mdp.hpp"

namespace hybridrl {

// Marking of (h,s,a) triples into an offline and an online side. The sides
// may overlap but together must cover everything.
struct Partition {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<std::uint8_t> in_off;
  std::vector<std::uint8_t> in_on;

  std::size_t index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states + s) * num_actions + a;
  }
  bool off_at(int h, int s, int a) const { return in_off[index(h, s, a)] != 0; }
  bool on_at(int h, int s, int a) const { return in_on[index(h, s, a)] != 0; }
  std::size_t off_size() const;
  std::size_t on_size() const;
};

// Throws if some cell is in neither side.
void validate(const Partition& partition);

// Offline side = cells with behavior occupancy at least the threshold, online
// side = the complement. Pass threshold <= 0 for the 1/(S*A) default.
Partition partition_from_occupancy(const OccupancyTensor& mu, double threshold = -1.0);

// All-policy partial concentrability: max over offline cells of
// sup_pi d^pi_h(s,a) / mu_h(s,a), with 0/0 read as 0 and x/0 as +infinity.
// An empty offline side gives 0.
double partial_offline_concentrability(const TabularMDP& mdp, const OccupancyTensor& mu,
                                       const Partition& partition);

// Same ratio against a single comparator policy instead of the sup.
double single_policy_concentrability(const TabularMDP& mdp, const OccupancyTensor& mu,
                                     const Partition& partition,
                                     const StochasticPolicy& comparator);

// Cumulative visit counts falling into each side, per episode. Overlapping
// cells count on both sides.
struct VisitCurves {
  std::vector<double> off_curve;
  std::vector<double> on_curve;
};
VisitCurves partition_visit_curves(const RunRecord& run, const Partition& partition);

// Coverage of the running mixture of executed greedy policies: per episode t
// the occupancy of the average of policy snapshots 1..t is compared with mu,
// and the largest density ratio on the full space and on each side is
// reported. Unsupported cells with positive mixture mass give +infinity.
struct MixtureCoverageCurves {
  std::vector<double> full;
  std::vector<double> off_side;
  std::vector<double> on_side;
};
MixtureCoverageCurves empirical_partition_concentrability(const RunRecord& run,
                                                          const TabularMDP& mdp,
                                                          const OccupancyTensor& mu,
                                                          const Partition& partition);

// Eigenvalue trajectories of the cumulative sample covariance: the largest
// eigenvalue of the full covariance, the k-th largest of its projection onto
// the offline subspace, and the (d-k)-th largest of its projection onto the
// online subspace. The inverse curves are the coverage proxies that get
// plotted; zero eigenvalues invert to +infinity.
struct EigCoverageCurves {
  std::vector<double> lambda_full, lambda_off, lambda_on;
  std::vector<double> inv_full, inv_off, inv_on;
};
EigCoverageCurves covariance_eig_curves(
    const std::vector<std::vector<Eigen::VectorXd>>& features_per_episode,
    const Projector& off_projector, const Projector& on_projector, int k);

// Latent-space coverage of a block MDP: the tabular partial concentrability
// computed on the latent chain.
double block_latent_coverage(const BlockEmission& emission, const OccupancyTensor& latent_mu,
                             const Partition& latent_partition);

// Maps an observed trajectory/dataset through the decoder.
Trajectory decode_trajectory(const BlockEmission& emission, const Trajectory& observed);
Dataset decode_dataset(const BlockEmission& emission, const Dataset& observed);

// Visit frequencies of a dataset, normalized per step.
OccupancyTensor empirical_occupancy(const Dataset& data, int S, int A, int H);

// Cumulative regret against the optimal value and the per-episode average
// reward, both on the raw reward scale.
struct RegretCurves {
  std::vector<double> cumulative_regret;
  std::vector<double> per_episode_avg_reward;
};
RegretCurves regret_curve(const RunRecord& run, double v_star_raw);

// Pointwise mean with a 1.96 sample-standard-deviation band (n-1 denominator).
struct CoverageCurve {
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
  int num_trials = 1;
};
CoverageCurve aggregate_trials(const std::vector<std::vector<double>>& per_trial);

// Small statistics helpers shared by the acceptance checks.
double mean_of(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);

struct IntervalEstimate {
  double mean = 0.0, lo = 0.0, hi = 0.0;
};
// Mean of paired differences with a 1.96 * s/sqrt(n) interval.
IntervalEstimate paired_mean_ci(const std::vector<double>& diffs);

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
};
// Least-squares slope of y against 1..n with its standard error.
SlopeFit ls_slope(const std::vector<double>& y);

}  // namespace hybridrl
