#include "hybridrl/linear.hpp"

#include <stdexcept>
#include <string>

namespace hybridrl {

FeatureMap one_hot_feature_map(int num_codes, int num_actions) {
  FeatureMap f;
  f.dimension = num_codes * num_actions;
  const int dim = f.dimension;
  f.embed = [dim, num_actions](int code, int action) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(code * num_actions + action) = 1.0;
    return v;
  };
  return f;
}

FeatureMap projected_feature_map(const FeatureMap& raw, const Eigen::MatrixXd& basis) {
  if (basis.rows() != raw.dimension)
    throw std::invalid_argument("projection basis does not match feature dimension");
  FeatureMap f;
  f.dimension = static_cast<int>(basis.cols());
  auto embed = raw.embed;
  Eigen::MatrixXd bt = basis.transpose();
  f.embed = [embed, bt](int code, int action) -> Eigen::VectorXd {
    return bt * embed(code, action);
  };
  return f;
}

Projector svd_projector(const Eigen::MatrixXd& data, int k) {
  const int d = static_cast<int>(data.rows());
  if (k < 1 || k > d) throw std::invalid_argument("svd_projector: rank out of range");

  // Left singular vectors are the eigenvectors of the second-moment matrix.
  const Eigen::MatrixXd second_moment = data * data.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(second_moment);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("svd_projector: eigendecomposition failed");

  const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
  const double lead = evals(d - 1);
  const double tol = std::max(lead, 0.0) * 1e-12;
  int rank = 0;
  for (int i = 0; i < d; ++i)
    if (evals(i) > tol && evals(i) > 0.0) ++rank;
  if (rank < k)
    throw std::runtime_error("svd_projector: requested rank " + std::to_string(k) +
                             " but data only support rank " + std::to_string(rank));

  Projector p;
  p.basis.resize(d, k);
  for (int j = 0; j < k; ++j) p.basis.col(j) = eig.eigenvectors().col(d - 1 - j);
  return p;
}

Projector axis_projector(int dim, int first, int count) {
  if (first < 0 || count < 0 || first + count > dim)
    throw std::invalid_argument("axis_projector: span out of range");
  Projector p;
  p.basis = Eigen::MatrixXd::Zero(dim, count);
  for (int j = 0; j < count; ++j) p.basis(first + j, j) = 1.0;
  return p;
}

}  // namespace hybridrl
