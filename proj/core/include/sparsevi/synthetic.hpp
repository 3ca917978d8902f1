#pragma once

// Seeded generators for synthetic mixture data and topic-model corpora.

#include <cstdint>
#include <vector>

#include "sparsevi/dataset.hpp"
#include "sparsevi/types.hpp"

namespace sparsevi {

struct SyntheticGmm {
  DenseDataset data;
  std::vector<int> labels;
  std::vector<Matrix> covariances;
  std::vector<double> weights;
};

/// N draws from a K-component zero-mean Gaussian mixture in D dimensions.
/// Component covariances differ in scale (spread over `scale_range` orders of
/// magnitude) and orientation; weights are Dirichlet(5) draws.
SyntheticGmm make_gmm_data(std::size_t n, int dim, int k, std::uint64_t seed,
                           double scale_range = 2.0);

/// Patch-like data: zero-mean D-dimensional vectors (D = side * side) from a
/// mixture of K oriented-gradient covariances plus isotropic noise, with each
/// vector's mean removed.
SyntheticGmm make_patch_data(std::size_t n, int side, int k, std::uint64_t seed);

struct SyntheticCorpus {
  Corpus corpus;
  Matrix topics;  // K x V, rows sum to one
  std::vector<std::vector<double>> doc_topics;
};

struct CorpusSpec {
  int n_topics = 10;
  int vocab_size = 100;
  std::size_t n_docs = 500;
  int tokens_per_doc = 100;
  double topic_concentration = 0.1;  // symmetric Dirichlet over words
  double doc_concentration = 0.1;    // symmetric Dirichlet over topics, per topic
};

/// LDA generative process with Dirichlet topics and document proportions.
SyntheticCorpus make_lda_corpus(const CorpusSpec& spec, std::uint64_t seed);

/// LDA corpus with fixed topic-word probabilities.
SyntheticCorpus make_lda_corpus(const Matrix& topics, std::size_t n_docs, int tokens_per_doc,
                                double doc_concentration, std::uint64_t seed);

/// Single-token observations from a categorical mixture.
TokenDataset make_token_data(std::size_t n, int vocab_size, const Matrix& topics,
                             const std::vector<double>& weights, std::uint64_t seed);

}  // namespace sparsevi
