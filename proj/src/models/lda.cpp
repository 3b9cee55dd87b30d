#include "wgibbs/models/lda.hpp"

#include <cassert>
#include <cmath>

#include "wgibbs/error.hpp"

namespace wgibbs {

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& doc : documents) n += doc.size();
  return n;
}

void Corpus::validate() const {
  if (vocabulary_size == 0) throw_invalid("corpus: vocabulary size must be positive");
  for (const auto& doc : documents)
    for (auto w : doc)
      if (w >= vocabulary_size) throw_invalid("corpus: word id outside vocabulary");
}

LdaModel::LdaModel(std::shared_ptr<const Corpus> corpus, LdaParams params, Rng& init_rng)
    : corpus_(std::move(corpus)), params_(params) {
  check_params();
  z_.resize(corpus_->documents.size());
  for (std::size_t m = 0; m < z_.size(); ++m) {
    z_[m].resize(corpus_->documents[m].size());
    for (auto& t : z_[m])
      t = static_cast<std::uint32_t>(init_rng() % static_cast<std::uint64_t>(K_));
  }
  build_counts();
}

LdaModel::LdaModel(std::shared_ptr<const Corpus> corpus, LdaParams params,
                   std::vector<std::vector<std::uint32_t>> assignments)
    : corpus_(std::move(corpus)), params_(params), z_(std::move(assignments)) {
  check_params();
  if (z_.size() != corpus_->documents.size()) throw_invalid("lda: assignment shape mismatch");
  for (std::size_t m = 0; m < z_.size(); ++m) {
    if (z_[m].size() != corpus_->documents[m].size())
      throw_invalid("lda: assignment shape mismatch");
    for (auto t : z_[m])
      if (t >= K_) throw_invalid("lda: assignment topic out of range");
  }
  build_counts();
}

void LdaModel::check_params() {
  if (!corpus_) throw_invalid("lda: null corpus");
  if (corpus_->documents.empty()) throw_invalid("lda: empty corpus");
  corpus_->validate();
  if (params_.topics == 0) throw_invalid("lda: topic count must be positive");
  if (!(params_.alpha > 0.0) || !(params_.beta > 0.0))
    throw_invalid("lda: alpha and beta must be positive");
  K_ = params_.topics;
  V_ = corpus_->vocabulary_size;
}

void LdaModel::build_counts() {
  const std::size_t M = corpus_->documents.size();
  n_mk_.assign(M * K_, 0);
  n_kv_.assign(K_ * V_, 0);
  n_k_.assign(K_, 0);
  scratch_.assign(K_, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& doc = corpus_->documents[m];
    for (std::size_t n = 0; n < doc.size(); ++n) {
      const auto k = z_[m][n];
      ++n_mk_[m * K_ + k];
      ++n_kv_[k * V_ + doc[n]];
      ++n_k_[k];
    }
  }
}

std::vector<double> LdaModel::token_conditional(std::size_t m, std::size_t pos) const {
  const auto w = corpus_->documents.at(m).at(pos);
  const auto cur = z_[m][pos];
  const double vbeta = static_cast<double>(V_) * params_.beta;
  std::vector<double> p(K_);
  double total = 0.0;
  for (std::size_t k = 0; k < K_; ++k) {
    const double own = (k == cur) ? 1.0 : 0.0;
    const double nkv = n_kv_[k * V_ + w] - own;
    const double nk = n_k_[k] - own;
    const double nmk = n_mk_[m * K_ + k] - own;
    p[k] = (nkv + params_.beta) / (nk + vbeta) * (nmk + params_.alpha);
    total += p[k];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::uint32_t LdaModel::sample_token(std::size_t m, std::size_t pos, Rng& rng) {
  const auto w = corpus_->documents[m][pos];
  const auto old = z_[m][pos];
  std::uint32_t* doc_counts = &n_mk_[m * K_];
  assert(n_kv_[old * V_ + w] > 0 && n_k_[old] > 0 && doc_counts[old] > 0);
  --doc_counts[old];
  --n_kv_[old * V_ + w];
  --n_k_[old];

  const double vbeta = static_cast<double>(V_) * params_.beta;
  double total = 0.0;
  for (std::size_t k = 0; k < K_; ++k) {
    total += (n_kv_[k * V_ + w] + params_.beta) / (n_k_[k] + vbeta) *
             (doc_counts[k] + params_.alpha);
    scratch_[k] = total;
  }
  const double u = rng.uniform() * total;
  std::uint32_t k = 0;
  while (k + 1 < K_ && scratch_[k] <= u) ++k;

  z_[m][pos] = k;
  ++doc_counts[k];
  ++n_kv_[k * V_ + w];
  ++n_k_[k];
  return k;
}

std::vector<double> LdaModel::topic_proportions(std::size_t m) const {
  std::vector<double> out(K_, 0.0);
  const double len = static_cast<double>(corpus_->documents[m].size());
  if (len == 0.0) return out;
  for (std::size_t k = 0; k < K_; ++k) out[k] = n_mk_[m * K_ + k] / len;
  return out;
}

double LdaModel::resample_document(std::size_t m, Rng& rng) {
  if (m >= corpus_->documents.size()) throw_invalid("lda: document index out of range");
  const auto before = topic_proportions(m);
  for (std::size_t n = 0; n < corpus_->documents[m].size(); ++n) sample_token(m, n, rng);
  const auto after = topic_proportions(m);
  double jump = 0.0;
  for (std::size_t k = 0; k < K_; ++k) jump += (after[k] - before[k]) * (after[k] - before[k]);
  return jump;
}

double LdaModel::sample_conditional(const StateVector&, std::size_t index, Rng& rng) {
  return resample_document(index, rng);
}

std::unique_ptr<Model> LdaModel::clone() const { return std::make_unique<LdaModel>(*this); }

Eigen::MatrixXd LdaModel::phi() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(K_), static_cast<Eigen::Index>(V_));
  const double vbeta = static_cast<double>(V_) * params_.beta;
  for (std::size_t k = 0; k < K_; ++k)
    for (std::size_t v = 0; v < V_; ++v)
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v)) =
          (n_kv_[k * V_ + v] + params_.beta) / (n_k_[k] + vbeta);
  return out;
}

Eigen::MatrixXd LdaModel::theta() const {
  const std::size_t M = corpus_->documents.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(K_));
  const double kalpha = static_cast<double>(K_) * params_.alpha;
  for (std::size_t m = 0; m < M; ++m) {
    const double len = static_cast<double>(corpus_->documents[m].size());
    for (std::size_t k = 0; k < K_; ++k)
      out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
          (n_mk_[m * K_ + k] + params_.alpha) / (len + kalpha);
  }
  return out;
}

bool LdaModel::counts_consistent() const {
  LdaModel fresh(corpus_, params_, z_);
  if (fresh.n_mk_ != n_mk_ || fresh.n_kv_ != n_kv_ || fresh.n_k_ != n_k_) return false;
  for (std::size_t m = 0; m < z_.size(); ++m) {
    std::size_t total = 0;
    for (std::size_t k = 0; k < K_; ++k) total += n_mk_[m * K_ + k];
    if (total != corpus_->documents[m].size()) return false;
  }
  return true;
}

Eigen::MatrixXd bar_topics() {
  Eigen::MatrixXd topics = Eigen::MatrixXd::Zero(8, 16);
  for (int b = 0; b < 4; ++b) {
    for (int j = 0; j < 4; ++j) {
      topics(b, b * 4 + j) = 0.25;      // horizontal bar: row b
      topics(4 + b, j * 4 + b) = 0.25;  // vertical bar: column b
    }
  }
  return topics;
}

BarsCorpus make_bars_corpus(Rng& rng, std::size_t documents, std::size_t length,
                            double concentration) {
  if (!(concentration > 0.0)) throw_invalid("bars corpus: concentration must be positive");
  BarsCorpus out;
  out.topics = bar_topics();
  out.corpus.vocabulary_size = 16;
  out.corpus.documents.resize(documents);
  std::vector<double> mix(8);
  for (auto& doc : out.corpus.documents) {
    double total = 0.0;
    for (auto& g : mix) total += (g = rng.gamma(concentration));
    for (auto& g : mix) g /= total;
    doc.resize(length);
    for (auto& word : doc) {
      const double u = rng.uniform();
      std::size_t k = 0;
      double acc = mix[0];
      while (k + 1 < mix.size() && acc <= u) acc += mix[++k];
      const auto cell = static_cast<std::uint32_t>(rng() % 4);
      word = k < 4 ? static_cast<std::uint32_t>(k * 4 + cell)
                   : static_cast<std::uint32_t>(cell * 4 + (k - 4));
    }
  }
  return out;
}

}  // namespace wgibbs
