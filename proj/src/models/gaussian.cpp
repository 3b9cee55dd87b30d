#include "wgibbs/models/gaussian.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "wgibbs/error.hpp"

namespace wgibbs {

GaussianTarget::GaussianTarget(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                               CovarianceParams params)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), params_(params) {
  const auto d = covariance_.rows();
  if (d == 0 || covariance_.cols() != d || mean_.size() != d)
    throw_invalid("gaussian target: mean/covariance shape mismatch");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw_invalid("gaussian target: covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success)
    throw_invalid("gaussian target: covariance is not positive definite");
  cholesky_ = llt.matrixL();
  precision_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
  precision_ = 0.5 * (precision_ + precision_.transpose());
  for (Eigen::Index i = 0; i < d; ++i)
    if (!(precision_(i, i) > 0.0)) throw_invalid("gaussian target: nonpositive precision diagonal");
  params_.dimension = static_cast<std::size_t>(d);
}

Eigen::VectorXd GaussianTarget::sample(Rng& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean_ + cholesky_ * z;
}

GaussianTarget make_covariance(const CovarianceParams& p, Rng& rng) {
  if (p.dimension == 0 || p.rank == 0) throw_invalid("make_covariance: d and r must be positive");
  if (!(p.lambda_cov > 0.0)) throw_invalid("make_covariance: lambda_cov must be positive");
  if (!(p.epsilon >= 0.0)) throw_invalid("make_covariance: epsilon must be nonnegative");
  const auto d = static_cast<Eigen::Index>(p.dimension);
  const auto r = static_cast<Eigen::Index>(p.rank);
  Eigen::MatrixXd y(d, r);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < r; ++j) y(i, j) = rng.normal();
  Eigen::MatrixXd sigma = p.lambda_cov * Eigen::MatrixXd::Identity(d, d);
  if (p.epsilon > 0.0) sigma.noalias() += p.epsilon * (y * y.transpose());
  sigma = 0.5 * (sigma + sigma.transpose());
  return GaussianTarget(Eigen::VectorXd::Zero(d), std::move(sigma), p);
}

double gaussian_conditional(const GaussianTarget& target, std::span<const double> state,
                            std::size_t index, Rng& rng) {
  const auto& lambda = target.precision();
  const auto& mu = target.mean();
  const auto i = static_cast<Eigen::Index>(index);
  // Precision is symmetric; walk column i for contiguous access.
  const double* col = lambda.col(i).data();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    if (j == i) continue;
    acc += col[j] * (state[static_cast<std::size_t>(j)] - mu[j]);
  }
  const double lii = col[i];
  return rng.normal(mu[i] - acc / lii, 1.0 / std::sqrt(lii));
}

GaussianModel::GaussianModel(std::shared_ptr<const GaussianTarget> target)
    : target_(std::move(target)) {
  if (!target_) throw_invalid("gaussian model: null target");
}

double GaussianModel::sample_conditional(const StateVector& state, std::size_t index, Rng& rng) {
  return gaussian_conditional(*target_, state, index, rng);
}

std::optional<double> GaussianModel::unnormalized_log_density(const StateVector& state) const {
  const Eigen::Map<const Eigen::VectorXd> x(state.data(), static_cast<Eigen::Index>(state.size()));
  const Eigen::VectorXd centered = x - target_->mean();
  return -0.5 * centered.dot(target_->precision() * centered);
}

std::unique_ptr<Model> GaussianModel::clone() const {
  return std::make_unique<GaussianModel>(*this);
}

}  // namespace wgibbs
