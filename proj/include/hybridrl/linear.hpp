#pragma once

#include <Eigen/Dense>
#include <functional>

#include "hybridrl/rng.hpp"

namespace hybridrl {

// Episodic environment whose observations are already reduced to a finite
// set of integer codes; function-approximation agents consume it through a
// feature map over (code, action).
class CodedEnv {
 public:
  struct Step {
    int next_code = 0;
    double reward_scaled = 0.0;
    double reward_raw = 0.0;
  };

  virtual ~CodedEnv() = default;
  virtual int num_codes() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;
  virtual int reset(Rng& rng) = 0;
  virtual Step step(int action, Rng& rng) = 0;
};

// phi(code, action) with ||phi|| <= 1.
struct FeatureMap {
  int dimension = 0;
  std::function<Eigen::VectorXd(int code, int action)> embed;
};

// One-hot embedding of (code, action) pairs; dimension = codes * actions.
FeatureMap one_hot_feature_map(int num_codes, int num_actions);

// Composes a raw feature map with an orthonormal basis: phi'(x) = B^T phi(x).
FeatureMap projected_feature_map(const FeatureMap& raw, const Eigen::MatrixXd& basis);

// Orthogonal projector stored by an orthonormal basis of its range.
struct Projector {
  Eigen::MatrixXd basis;  // d x k, orthonormal columns

  int dim() const { return static_cast<int>(basis.rows()); }
  int rank() const { return static_cast<int>(basis.cols()); }
  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    return basis * (basis.transpose() * v);
  }
  Eigen::MatrixXd matrix() const { return basis * basis.transpose(); }
};

// Top-k left singular vectors of a d x n data matrix (columns are samples).
// Throws std::runtime_error naming the achievable rank when the data carry
// fewer than k nonzero singular values.
Projector svd_projector(const Eigen::MatrixXd& data, int k);

// Projector onto coordinate axes [first, first+count).
Projector axis_projector(int dim, int first, int count);

}  // namespace hybridrl
