#include "wgibbs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "wgibbs/error.hpp"

namespace wgibbs {
namespace {

// Centred copy and its sum of squares.
struct Centred {
  std::vector<double> values;
  double sum_squares = 0.0;
};

Centred centre(std::span<const double> series) {
  Centred c;
  const double mean =
      std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  c.values.resize(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    c.values[t] = series[t] - mean;
    c.sum_squares += c.values[t] * c.values[t];
  }
  return c;
}

bool is_constant(std::span<const double> series) {
  return std::all_of(series.begin(), series.end(), [&](double v) { return v == series[0]; });
}

double lagged_product(const std::vector<double>& c, std::size_t lag) {
  double acc = 0.0;
  for (std::size_t t = 0; t + lag < c.size(); ++t) acc += c[t] * c[t + lag];
  return acc;
}

}  // namespace

double autocorrelation(std::span<const double> series, std::size_t lag) {
  if (lag >= series.size()) throw_invalid("autocorrelation: series must be longer than the lag");
  if (is_constant(series)) throw_numeric("autocorrelation: constant series");
  const auto c = centre(series);
  if (lag == 0) return 1.0;
  return lagged_product(c.values, lag) / c.sum_squares;
}

std::vector<double> autocorrelations(std::span<const double> series, std::size_t max_lag) {
  if (series.size() < 2) throw_invalid("autocorrelations: need at least two values");
  if (is_constant(series)) throw_numeric("autocorrelations: constant series");
  const auto c = centre(series);
  const std::size_t top = std::min(max_lag, series.size() - 1);
  std::vector<double> rho(top + 1);
  rho[0] = 1.0;
  for (std::size_t k = 1; k <= top; ++k) rho[k] = lagged_product(c.values, k) / c.sum_squares;
  return rho;
}

EssResult effective_sample_size(std::span<const double> series,
                                std::optional<std::size_t> max_lag) {
  const auto n = static_cast<double>(series.size());
  if (series.size() < 2) throw_invalid("effective_sample_size: need at least two values");
  if (is_constant(series)) return {n, 0, EssStatus::ConstantSeries};
  const auto c = centre(series);
  auto rho = [&](std::size_t k) { return lagged_product(c.values, k) / c.sum_squares; };
  const std::size_t last = series.size() - 1;

  double sum = 0.0;
  std::size_t cutoff = 0;
  if (max_lag) {
    cutoff = std::min(*max_lag, last);
    for (std::size_t k = 1; k <= cutoff; ++k) sum += rho(k);
  } else {
    // Initial positive sequence over pairs (rho_{2m}, rho_{2m+1}).
    double even = 1.0;
    for (std::size_t m = 0; 2 * m + 1 <= last; ++m) {
      if (m > 0) even = rho(2 * m);
      const double odd = rho(2 * m + 1);
      if (even + odd <= 0.0) break;
      if (m > 0) sum += even;
      sum += odd;
      cutoff = 2 * m + 1;
    }
  }
  const double denom = 1.0 + 2.0 * sum;
  if (!(denom > 0.0)) return {n, cutoff, EssStatus::NonpositiveDenominator};
  return {n / denom, cutoff, EssStatus::Ok};
}

namespace {

std::vector<double> squared_jumps(const ChainTrace& trace, std::size_t lag, std::size_t first_row) {
  const auto rows = static_cast<std::size_t>(trace.samples.rows());
  if (first_row >= rows || rows - first_row <= lag)
    throw_invalid("esjd_empirical: trace too short for the requested lag");
  std::vector<double> jumps(rows - first_row - lag);
  for (std::size_t t = 0; t < jumps.size(); ++t) {
    const auto a = static_cast<Eigen::Index>(first_row + t);
    jumps[t] = (trace.samples.row(a + static_cast<Eigen::Index>(lag)) - trace.samples.row(a))
                   .squaredNorm();
  }
  return jumps;
}

}  // namespace

double esjd_empirical(const ChainTrace& trace, std::size_t lag, std::size_t first_row) {
  const auto jumps = squared_jumps(trace, lag, first_row);
  return std::accumulate(jumps.begin(), jumps.end(), 0.0) / static_cast<double>(jumps.size());
}

EsjdEstimate esjd_empirical_with_error(const ChainTrace& trace, std::size_t lag,
                                       std::size_t first_row) {
  const auto jumps = squared_jumps(trace, lag, first_row);
  EsjdEstimate est;
  est.mean = std::accumulate(jumps.begin(), jumps.end(), 0.0) / static_cast<double>(jumps.size());
  if (jumps.size() < 2 || is_constant(jumps)) return est;
  double ss = 0.0;
  for (double j : jumps) ss += (j - est.mean) * (j - est.mean);
  const double var = ss / static_cast<double>(jumps.size() - 1);
  const auto ess = effective_sample_size(jumps);
  est.standard_error = std::sqrt(var / ess.value);
  return est;
}

PcaResult pca_project(const Eigen::Ref<const Eigen::MatrixXd>& samples, std::size_t components) {
  const auto n = samples.rows();
  const auto dim = samples.cols();
  if (n < 2 || dim < 2) throw_invalid("pca_project: need at least two samples and two dimensions");
  if (components == 0 || static_cast<Eigen::Index>(components) > dim)
    throw_invalid("pca_project: invalid component count");
  const auto kc = static_cast<Eigen::Index>(components);

  PcaResult out;
  out.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centred = samples.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw_numeric("pca_project: eigendecomposition failed");

  const Eigen::VectorXd values = eig.eigenvalues();  // ascending
  const double largest = std::max(values[dim - 1], 0.0);
  out.components.resize(dim, kc);
  out.explained_variance.resize(kc);
  for (Eigen::Index c = 0; c < kc; ++c) {
    const Eigen::Index src = dim - 1 - c;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    const double lam = std::max(values[src], 0.0);
    const bool null_direction = largest <= 0.0 || lam <= 1e-12 * largest;
    out.components.col(c) = v;
    out.explained_variance[c] = null_direction ? 0.0 : lam;
  }
  out.scores = centred * out.components;
  for (Eigen::Index c = 0; c < kc; ++c)
    if (out.explained_variance[c] == 0.0) out.scores.col(c).setZero();
  return out;
}

double relative_l2_error(const Image& truth, const Image& estimate) {
  if (truth.height != estimate.height || truth.width != estimate.width ||
      truth.size() != estimate.size())
    throw_invalid("relative_l2_error: shape mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = truth.pixels[i] - estimate.pixels[i];
    num += e * e;
    den += truth.pixels[i] * truth.pixels[i];
  }
  if (den == 0.0) throw_invalid("relative_l2_error: reference image is all zero");
  return std::sqrt(num / den);
}

double perplexity_from_estimates(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& theta,
                                 const Corpus& corpus) {
  const std::size_t tokens = corpus.token_count();
  if (tokens == 0) throw_invalid("perplexity: empty corpus");
  if (theta.rows() != static_cast<Eigen::Index>(corpus.documents.size()) ||
      theta.cols() != phi.rows())
    throw_invalid("perplexity: estimate shape mismatch");
  double ll = 0.0;
  for (std::size_t m = 0; m < corpus.documents.size(); ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    for (auto w : corpus.documents[m]) {
      if (static_cast<Eigen::Index>(w) >= phi.cols()) throw_invalid("perplexity: word outside vocabulary");
      ll += std::log(theta.row(row).dot(phi.col(static_cast<Eigen::Index>(w))));
    }
  }
  return std::exp(-ll / static_cast<double>(tokens));
}

double lda_log_likelihood(const LdaModel& model) {
  const auto& corpus = model.corpus();
  if (corpus.token_count() == 0) throw_invalid("lda_log_likelihood: empty corpus");
  const Eigen::MatrixXd phi = model.phi();
  const Eigen::MatrixXd theta = model.theta();
  double ll = 0.0;
  for (std::size_t m = 0; m < corpus.documents.size(); ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    for (auto w : corpus.documents[m])
      ll += std::log(theta.row(row).dot(phi.col(static_cast<Eigen::Index>(w))));
  }
  return ll;
}

double lda_perplexity(const LdaModel& model, const Corpus& heldout, const PerplexityOptions& options) {
  if (heldout.token_count() == 0) throw_invalid("lda_perplexity: empty heldout corpus");
  const Eigen::MatrixXd phi = model.phi();
  const auto K = static_cast<std::size_t>(phi.rows());
  const double alpha = model.params().alpha;
  for (const auto& doc : heldout.documents)
    for (auto w : doc)
      if (static_cast<Eigen::Index>(w) >= phi.cols())
        throw_invalid("lda_perplexity: heldout word outside training vocabulary");

  Rng rng(options.seed, Stream::Evaluation);
  Eigen::MatrixXd theta(static_cast<Eigen::Index>(heldout.documents.size()), phi.rows());
  std::vector<double> cumulative(K);
  std::vector<std::uint32_t> counts(K);
  for (std::size_t m = 0; m < heldout.documents.size(); ++m) {
    const auto& doc = heldout.documents[m];
    std::vector<std::uint32_t> z(doc.size());
    std::fill(counts.begin(), counts.end(), 0u);
    for (auto& t : z) ++counts[t = static_cast<std::uint32_t>(rng() % K)];
    for (std::size_t sweep = 0; sweep < options.fold_in_sweeps; ++sweep) {
      for (std::size_t n = 0; n < doc.size(); ++n) {
        --counts[z[n]];
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(doc[n])) *
                   (counts[k] + alpha);
          cumulative[k] = total;
        }
        const double u = rng.uniform() * total;
        std::uint32_t k = 0;
        while (k + 1 < K && cumulative[k] <= u) ++k;
        z[n] = k;
        ++counts[k];
      }
    }
    const double denom = static_cast<double>(doc.size()) + static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k)
      theta(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = (counts[k] + alpha) / denom;
  }
  return perplexity_from_estimates(phi, theta, heldout);
}

DiagnosticsReport summarize_trace(const ChainTrace& trace, std::size_t max_lag,
                                  std::size_t max_esjd_lag) {
  DiagnosticsReport report;
  const std::size_t first = trace.first_post_burn_in_row();
  const auto rows = static_cast<std::size_t>(trace.samples.rows());
  if (rows < first + 2) throw_invalid("summarize_trace: too few post-burn-in samples");
  const std::size_t n = rows - first;
  const std::size_t lags = std::min(max_lag, n - 1);

  report.mean_autocorrelation.assign(lags + 1, 0.0);
  report.autocorrelation.resize(trace.dimension);
  report.ess.resize(trace.dimension);
  std::vector<double> column(n);
  double ess_sum = 0.0;
  report.min_ess = static_cast<double>(n);
  for (std::size_t j = 0; j < trace.dimension; ++j) {
    for (std::size_t t = 0; t < n; ++t)
      column[t] = trace.samples(static_cast<Eigen::Index>(first + t), static_cast<Eigen::Index>(j));
    if (is_constant(column)) {
      report.autocorrelation[j].assign(lags + 1, 1.0);
    } else {
      report.autocorrelation[j] = autocorrelations(column, lags);
    }
    for (std::size_t k = 0; k <= lags; ++k) report.mean_autocorrelation[k] += report.autocorrelation[j][k];
    report.ess[j] = effective_sample_size(column);
    ess_sum += report.ess[j].value;
    report.min_ess = std::min(report.min_ess, report.ess[j].value);
  }
  for (auto& v : report.mean_autocorrelation) v /= static_cast<double>(trace.dimension);
  report.mean_ess = ess_sum / static_cast<double>(trace.dimension);

  const std::size_t jumps = std::min(max_esjd_lag, n - 1);
  report.esjd.resize(jumps + 1);
  for (std::size_t k = 0; k <= jumps; ++k) report.esjd[k] = esjd_empirical(trace, k, first);
  return report;
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw_invalid("spearman_correlation: size mismatch");
  auto ranks = [](std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return x[i] < x[j]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> greedy_topic_distances(const Eigen::MatrixXd& learned,
                                           const Eigen::MatrixXd& truth) {
  if (learned.cols() != truth.cols()) throw_invalid("greedy_topic_distances: vocabulary mismatch");
  if (learned.rows() < truth.rows()) throw_invalid("greedy_topic_distances: too few learned topics");
  struct Pair {
    double tv;
    Eigen::Index t, k;
  };
  std::vector<Pair> pairs;
  for (Eigen::Index t = 0; t < truth.rows(); ++t)
    for (Eigen::Index k = 0; k < learned.rows(); ++k)
      pairs.push_back({0.5 * (learned.row(k) - truth.row(t)).cwiseAbs().sum(), t, k});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.tv < b.tv; });
  std::vector<double> out(static_cast<std::size_t>(truth.rows()), -1.0);
  std::vector<bool> used(static_cast<std::size_t>(learned.rows()), false);
  for (const auto& p : pairs) {
    auto& slot = out[static_cast<std::size_t>(p.t)];
    if (slot >= 0.0 || used[static_cast<std::size_t>(p.k)]) continue;
    slot = p.tv;
    used[static_cast<std::size_t>(p.k)] = true;
  }
  return out;
}

}  // namespace wgibbs
