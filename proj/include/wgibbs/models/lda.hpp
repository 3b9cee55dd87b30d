#pragma once

// Collapsed Gibbs sampling for latent Dirichlet allocation.
//
// The schedulable variable is a document: selecting document m resamples
// every token of m in order. The document's coordinate in the StateVector is
// the squared change of its normalised topic-count vector caused by that
// visit, and the weighted scan averages those jumps to get d_hat_m.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wgibbs/engine.hpp"

namespace wgibbs {

struct Corpus {
  std::vector<std::vector<std::uint32_t>> documents;  // word ids per document
  std::size_t vocabulary_size = 0;

  std::size_t token_count() const;
  // Throws InvalidArgument if a word id is >= vocabulary_size.
  void validate() const;
};

struct LdaParams {
  std::size_t topics = 8;
  double alpha = 0.5;  // document-topic smoothing
  double beta = 0.1;   // topic-word smoothing
};

class LdaModel final : public Model {
 public:
  // Assignments drawn uniformly from init_rng.
  LdaModel(std::shared_ptr<const Corpus> corpus, LdaParams params, Rng& init_rng);
  // Explicit assignments, one topic per token.
  LdaModel(std::shared_ptr<const Corpus> corpus, LdaParams params,
           std::vector<std::vector<std::uint32_t>> assignments);

  std::size_t dimension() const override { return corpus_->documents.size(); }
  double sample_conditional(const StateVector& state, std::size_t index, Rng& rng) override;
  SummaryKind summary_kind() const override { return SummaryKind::SquaredJump; }
  std::unique_ptr<Model> clone() const override;

  // Full conditional of token (m, pos) with its own assignment removed,
  // normalised over topics.
  std::vector<double> token_conditional(std::size_t m, std::size_t pos) const;
  // One collapsed Gibbs update of token (m, pos); returns the new topic.
  std::uint32_t sample_token(std::size_t m, std::size_t pos, Rng& rng);
  // Resample every token of document m; returns ||theta_new - theta_old||^2
  // for the document's normalised topic counts.
  double resample_document(std::size_t m, Rng& rng);

  std::vector<double> topic_proportions(std::size_t m) const;
  // Point estimates (n_kv + beta) / (n_k + V beta), K x V.
  Eigen::MatrixXd phi() const;
  // Point estimates (n_mk + alpha) / (n_m + K alpha), M x K.
  Eigen::MatrixXd theta() const;

  // Full recount of the tables from the assignments.
  bool counts_consistent() const;

  const Corpus& corpus() const { return *corpus_; }
  const LdaParams& params() const { return params_; }
  const std::vector<std::vector<std::uint32_t>>& assignments() const { return z_; }
  std::uint32_t doc_topic(std::size_t m, std::size_t k) const { return n_mk_[m * K_ + k]; }
  std::uint32_t topic_word(std::size_t k, std::size_t v) const { return n_kv_[k * V_ + v]; }
  std::uint32_t topic_total(std::size_t k) const { return n_k_[k]; }

 private:
  void check_params();
  void build_counts();

  std::shared_ptr<const Corpus> corpus_;
  LdaParams params_;
  std::size_t K_ = 0;
  std::size_t V_ = 0;
  std::vector<std::vector<std::uint32_t>> z_;
  std::vector<std::uint32_t> n_mk_;
  std::vector<std::uint32_t> n_kv_;
  std::vector<std::uint32_t> n_k_;
  std::vector<double> scratch_;
};

struct BarsCorpus {
  Corpus corpus;
  // 8 x 16; rows 0-3 horizontal bars, rows 4-7 vertical bars.
  Eigen::MatrixXd topics;
};

// Bars dataset on a 4x4 pixel grid: each document draws a topic mixture from
// a symmetric Dirichlet(concentration), then `length` tokens.
BarsCorpus make_bars_corpus(Rng& rng, std::size_t documents = 2000, std::size_t length = 100,
                            double concentration = 1.0);

// The 8 bar topics alone.
Eigen::MatrixXd bar_topics();

}  // namespace wgibbs
