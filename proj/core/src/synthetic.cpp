#include "sparsevi/synthetic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <random>

#include "sparsevi/errors.hpp"

namespace sparsevi {
namespace {

std::vector<double> dirichlet(std::size_t n, double conc, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(conc, 1.0);
  std::vector<double> out(n);
  double total = 0.0;
  for (auto& v : out) {
    v = gamma(rng);
    total += v;
  }
  if (!(total > 0.0)) {
    // All draws underflowed: put the mass on one uniformly chosen entry.
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    out.assign(n, 0.0);
    out[pick(rng)] = 1.0;
    return out;
  }
  for (auto& v : out) v /= total;
  return out;
}

Matrix random_orthogonal(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(dim, dim);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

SyntheticGmm sample_mixture(std::size_t n, std::vector<Matrix> covs, std::vector<double> weights,
                            std::mt19937_64& rng) {
  const int dim = static_cast<int>(covs.front().rows());
  std::vector<Matrix> factors;
  factors.reserve(covs.size());
  for (const auto& c : covs) factors.push_back(Eigen::LLT<Matrix>(c).matrixL());
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal;
  SyntheticGmm out;
  out.data.x.resize(static_cast<Eigen::Index>(n), dim);
  out.labels.resize(n);
  Vector z(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = pick(rng);
    for (int j = 0; j < dim; ++j) z(j) = normal(rng);
    out.data.x.row(static_cast<Eigen::Index>(i)) = (factors[static_cast<std::size_t>(k)] * z).transpose();
    out.labels[i] = k;
  }
  out.covariances = std::move(covs);
  out.weights = std::move(weights);
  return out;
}

}  // namespace

SyntheticGmm make_gmm_data(std::size_t n, int dim, int k, std::uint64_t seed, double scale_range) {
  if (dim < 1 || k < 1) throw ArgumentError("make_gmm_data: dim and k must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Matrix> covs;
  for (int c = 0; c < k; ++c) {
    const Matrix q = random_orthogonal(dim, rng);
    Vector eig(dim);
    const double base = std::pow(10.0, scale_range * (unit(rng) - 0.5));
    for (int j = 0; j < dim; ++j) eig(j) = base * std::pow(10.0, 1.5 * unit(rng) - 0.75);
    covs.push_back(q * eig.asDiagonal() * q.transpose());
  }
  return sample_mixture(n, std::move(covs), dirichlet(static_cast<std::size_t>(k), 5.0, rng), rng);
}

SyntheticGmm make_patch_data(std::size_t n, int side, int k, std::uint64_t seed) {
  if (side < 2 || k < 1) throw ArgumentError("make_patch_data: side >= 2 and k >= 1 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int dim = side * side;
  const double pi = std::acos(-1.0);
  std::vector<Matrix> covs;
  for (int c = 0; c < k; ++c) {
    // A few oriented sinusoidal gratings give each component its texture.
    Matrix cov = Matrix::Identity(dim, dim) * 0.05;
    const int n_waves = 1 + static_cast<int>(unit(rng) * 3.0);
    const double contrast = std::pow(10.0, 2.0 * unit(rng) - 1.0);
    for (int w = 0; w < n_waves; ++w) {
      const double angle = pi * unit(rng);
      const double freq = 0.2 + 1.2 * unit(rng);
      const double phase = 2.0 * pi * unit(rng);
      Vector v(dim);
      for (int r = 0; r < side; ++r) {
        for (int col = 0; col < side; ++col) {
          v(r * side + col) =
              std::cos(freq * (std::cos(angle) * col + std::sin(angle) * r) + phase);
        }
      }
      v.array() -= v.mean();
      cov += contrast * v * v.transpose();
    }
    covs.push_back(cov);
  }
  SyntheticGmm out =
      sample_mixture(n, std::move(covs), dirichlet(static_cast<std::size_t>(k), 5.0, rng), rng);
  for (Eigen::Index i = 0; i < out.data.x.rows(); ++i) {
    out.data.x.row(i).array() -= out.data.x.row(i).mean();
  }
  return out;
}

SyntheticCorpus make_lda_corpus(const Matrix& topics, std::size_t n_docs, int tokens_per_doc,
                                double doc_concentration, std::uint64_t seed) {
  const auto K = static_cast<std::size_t>(topics.rows());
  const auto V = static_cast<int>(topics.cols());
  if (K == 0 || V == 0) throw ArgumentError("make_lda_corpus: empty topic matrix");
  if (tokens_per_doc < 1) throw ArgumentError("make_lda_corpus: tokens_per_doc must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::discrete_distribution<int>> word_dists;
  for (std::size_t k = 0; k < K; ++k) {
    const auto row = topics.row(static_cast<Eigen::Index>(k));
    std::vector<double> w(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) w[static_cast<std::size_t>(v)] = row(v);
    word_dists.emplace_back(w.begin(), w.end());
  }
  SyntheticCorpus out;
  out.topics = topics;
  out.corpus.vocab_size = V;
  std::vector<double> counts(static_cast<std::size_t>(V));
  for (std::size_t d = 0; d < n_docs; ++d) {
    auto pi = dirichlet(K, doc_concentration, rng);
    std::discrete_distribution<int> pick_topic(pi.begin(), pi.end());
    std::fill(counts.begin(), counts.end(), 0.0);
    for (int t = 0; t < tokens_per_doc; ++t) {
      counts[static_cast<std::size_t>(word_dists[static_cast<std::size_t>(pick_topic(rng))](rng))] += 1.0;
    }
    Document doc;
    for (int v = 0; v < V; ++v) {
      if (counts[static_cast<std::size_t>(v)] > 0.0) {
        doc.word_ids.push_back(v);
        doc.counts.push_back(counts[static_cast<std::size_t>(v)]);
      }
    }
    out.corpus.docs.push_back(std::move(doc));
    out.doc_topics.push_back(std::move(pi));
  }
  return out;
}

SyntheticCorpus make_lda_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  if (spec.n_topics < 1 || spec.vocab_size < 1) throw ArgumentError("make_lda_corpus: bad sizes");
  std::mt19937_64 rng(seed);
  Matrix topics(spec.n_topics, spec.vocab_size);
  for (int k = 0; k < spec.n_topics; ++k) {
    const auto row = dirichlet(static_cast<std::size_t>(spec.vocab_size), spec.topic_concentration, rng);
    for (int v = 0; v < spec.vocab_size; ++v) topics(k, v) = row[static_cast<std::size_t>(v)];
  }
  return make_lda_corpus(topics, spec.n_docs, spec.tokens_per_doc, spec.doc_concentration, rng());
}

TokenDataset make_token_data(std::size_t n, int vocab_size, const Matrix& topics,
                             const std::vector<double>& weights, std::uint64_t seed) {
  if (topics.cols() != vocab_size || static_cast<std::size_t>(topics.rows()) != weights.size()) {
    throw ArgumentError("make_token_data: topic matrix and weights disagree");
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<std::discrete_distribution<int>> words;
  for (Eigen::Index k = 0; k < topics.rows(); ++k) {
    std::vector<double> w(static_cast<std::size_t>(vocab_size));
    for (int v = 0; v < vocab_size; ++v) w[static_cast<std::size_t>(v)] = topics(k, v);
    words.emplace_back(w.begin(), w.end());
  }
  TokenDataset out;
  out.vocab_size = vocab_size;
  out.tokens.resize(n);
  for (auto& t : out.tokens) t = words[static_cast<std::size_t>(pick(rng))](rng);
  return out;
}

}  // namespace sparsevi
