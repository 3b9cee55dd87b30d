#pragma once

// Measurement machinery: autocorrelation, effective sample size, squared
// jump distances, PCA projections, reconstruction error and LDA fit metrics.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wgibbs/engine.hpp"
#include "wgibbs/models/image.hpp"
#include "wgibbs/models/lda.hpp"

namespace wgibbs {

// rho_k = sum_{t < N-k} (x_t - m)(x_{t+k} - m) / sum_t (x_t - m)^2.
// Throws InvalidArgument if lag >= N and Numeric for a constant series.
double autocorrelation(std::span<const double> series, std::size_t lag);

// rho_0 .. rho_max_lag (clamped to N - 1) with the same estimator.
std::vector<double> autocorrelations(std::span<const double> series, std::size_t max_lag);

enum class EssStatus {
  Ok,
  ConstantSeries,        // no variance; value reported as N
  NonpositiveDenominator // 1 + 2 sum rho <= 0; value reported as N
};

struct EssResult {
  double value = 0.0;
  std::size_t truncation_lag = 0;  // K*: last lag included in the sum
  EssStatus status = EssStatus::Ok;
};

// N / (1 + 2 sum_{k=1}^{K*} rho_k). By default K* follows Geyer's initial
// positive sequence (pairs rho_{2m} + rho_{2m+1} summed while positive);
// a fixed max_lag overrides it.
EssResult effective_sample_size(std::span<const double> series,
                                std::optional<std::size_t> max_lag = std::nullopt);

// Mean over recorded rows t >= first_row of ||x^{t+lag} - x^t||^2. The lag
// counts recorded rows (thinned steps), not single-variable updates.
// Throws InvalidArgument when fewer than lag + 1 rows are available.
double esjd_empirical(const ChainTrace& trace, std::size_t lag, std::size_t first_row = 0);

struct EsjdEstimate {
  double mean = 0.0;
  // sd / sqrt(ESS) of the per-row squared jumps (they overlap for lag > 1).
  double standard_error = 0.0;
};
EsjdEstimate esjd_empirical_with_error(const ChainTrace& trace, std::size_t lag,
                                       std::size_t first_row = 0);

struct PcaResult {
  Eigen::MatrixXd scores;             // N x components
  Eigen::MatrixXd components;         // D x components, unit columns
  Eigen::VectorXd explained_variance; // per component
  Eigen::VectorXd mean;               // D
};

// Centre columns, eigendecompose the sample covariance and project onto the
// leading directions. Each direction's largest-magnitude loading is made
// positive; null directions (eigenvalue below 1e-12 of the largest) get zero
// scores. Throws InvalidArgument for fewer than 2 rows or columns.
PcaResult pca_project(const Eigen::Ref<const Eigen::MatrixXd>& samples, std::size_t components = 2);

// ||truth - estimate||_F / ||truth||_F.
double relative_l2_error(const Image& truth, const Image& estimate);

// Training log-likelihood sum_{m,n} log sum_k theta_mk phi_k,w_mn with the
// model's point estimates.
double lda_log_likelihood(const LdaModel& model);

struct PerplexityOptions {
  std::size_t fold_in_sweeps = 20;
  std::uint64_t seed = 0;
};

// exp(-heldout log-likelihood / heldout tokens). Heldout topic proportions
// come from collapsed Gibbs fold-in with phi frozen at the model's estimate.
double lda_perplexity(const LdaModel& model, const Corpus& heldout,
                      const PerplexityOptions& options = {});

// Perplexity of documents under fixed topic and document distributions.
double perplexity_from_estimates(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& theta,
                                 const Corpus& corpus);

struct DiagnosticsReport {
  std::vector<double> mean_autocorrelation;              // by lag, averaged over variables
  std::vector<std::vector<double>> autocorrelation;      // [variable][lag]
  std::vector<EssResult> ess;                            // per variable
  double min_ess = 0.0;
  double mean_ess = 0.0;
  std::vector<double> esjd;                              // index = lag in recorded rows
};

// Post-burn-in diagnostics over every coordinate of the trace. Constant
// coordinates contribute rho = 1 at every lag.
DiagnosticsReport summarize_trace(const ChainTrace& trace, std::size_t max_lag,
                                  std::size_t max_esjd_lag);

// Total-variation distance of each true topic (row of `truth`) to its
// partner under greedy one-to-one matching: pairs are taken in increasing
// order of distance, each learned row used at most once. Rows must be
// distributions over the same vocabulary; needs rows(learned) >= rows(truth).
std::vector<double> greedy_topic_distances(const Eigen::MatrixXd& learned,
                                           const Eigen::MatrixXd& truth);

// Spearman rank correlation with average ranks for ties.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace wgibbs
