#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include <Eigen/Core>

#include "wgibbs/engine.hpp"

namespace wgibbs {

struct CovarianceParams {
  std::size_t dimension = 50;
  std::size_t rank = 5;
  double epsilon = 5.0;
  double lambda_cov = 10.0;
};

// Multivariate normal target with cached precision matrix.
class GaussianTarget {
 public:
  // Throws InvalidArgument unless covariance is square, symmetric within
  // 1e-12 and positive definite, and mean has matching length.
  GaussianTarget(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                 CovarianceParams params = {});

  std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::MatrixXd& precision() const { return precision_; }
  // Lower Cholesky factor of the covariance, for direct draws.
  const Eigen::MatrixXd& cholesky() const { return cholesky_; }
  const CovarianceParams& params() const { return params_; }

  // One exact draw from N(mean, covariance).
  Eigen::VectorXd sample(Rng& rng) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd cholesky_;
  CovarianceParams params_;
};

// Sigma = lambda_cov * I + epsilon * Y Y^T with Y (d x r) iid standard
// normal; zero mean.
GaussianTarget make_covariance(const CovarianceParams& params, Rng& rng);

// Draw x_i | x_{-i} ~ N(mu_i - sum_{j != i} L_ij (x_j - mu_j) / L_ii, 1 / L_ii)
// where L is the precision matrix.
double gaussian_conditional(const GaussianTarget& target, std::span<const double> state,
                            std::size_t index, Rng& rng);

class GaussianModel final : public Model {
 public:
  explicit GaussianModel(std::shared_ptr<const GaussianTarget> target);

  std::size_t dimension() const override { return target_->dimension(); }
  double sample_conditional(const StateVector& state, std::size_t index, Rng& rng) override;
  std::optional<double> unnormalized_log_density(const StateVector& state) const override;
  std::unique_ptr<Model> clone() const override;

  const GaussianTarget& target() const { return *target_; }

 private:
  std::shared_ptr<const GaussianTarget> target_;
};

}  // namespace wgibbs
