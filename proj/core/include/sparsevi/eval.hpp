#pragma once

// Heldout scoring, responsibility distance diagnostics and the substep
// timing harness.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sparsevi/dataset.hpp"
#include "sparsevi/lda.hpp"
#include "sparsevi/mixture.hpp"
#include "sparsevi/parallel.hpp"

namespace sparsevi {

struct HeldoutReport {
  double score = 0.0;         // mean log predictive per observation or per token
  std::size_t n_units = 0;    // observations, or documents scored
  std::size_t n_skipped = 0;  // documents with fewer than two word types
  double n_tokens = 0.0;      // held-out tokens (document completion only)
  double elapsed_sec = 0.0;
};

/// Mean over observations of ln sum_k pi_k N(x | 0, Sigma_k) with
/// pi = E[pi] and Sigma_k = E[Sigma_k] = Lambda_k^{-1} / (nu_k - D - 1).
/// Throws ArgumentError naming the first cluster with nu_k <= D + 1.
HeldoutReport mixture_heldout(const DenseDataset& xs, const GaussianMixture& g,
                              const ParallelOptions& opts = {});
/// Mean over tokens of ln sum_k pi_k phi_kv with posterior-mean phi.
HeldoutReport mixture_heldout(const TokenDataset& xs, const CategoricalMixture& g);

struct CompletionOptions {
  double frac_a = 0.8;
  std::uint64_t seed = 0;
  int max_iters = 100;
  double conv_threshold = 0.05;
  ParallelOptions parallel;
};

/// Document completion: split each document by word type, fit document
/// proportions on part A with the dense local step against fixed topics
/// (log of the posterior means), then score part B by
/// sum c * ln sum_k pi_dk phi_kv / total B tokens.
HeldoutReport doc_completion_score(const Corpus& test, const LdaGlobalState& g,
                                   const CompletionOptions& opts = {});
/// Same protocol with explicit topic-word probabilities (K x V, rows sum to 1).
HeldoutReport doc_completion_score(const Corpus& test, const Matrix& topics, double alpha,
                                   const CompletionOptions& opts = {});

/// Per-observation TV(dense, densified sparse), sorted ascending.
std::vector<double> distance_cdf(const RespBatch& dense, const RespBatch& sparse);
/// Per-document TV between normalized count vectors, sorted ascending.
std::vector<double> distance_cdf(std::span<const std::vector<double>> counts_a,
                                 std::span<const std::vector<double>> counts_b);

/// Median of `reps` wall-clock timings of fn(), in seconds.
double median_wall_seconds(const std::function<void()>& fn, int reps = 5);

struct BenchSpec {
  std::string model = "gmm";  // gmm | lda
  std::vector<int> Ks{50};
  std::vector<int> Ls{kDense, 1, 4};  // kDense (0) means the dense path
  std::size_t n = 20000;              // observations or documents
  int dim = 64;                       // D for gmm, V for lda
  int tokens_per_doc = 100;
  int reps = 5;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string substep;
  int L = kDense;
  int K = 0;
  double wall_sec = 0.0;
  std::uint64_t exp_calls = 0;
};

/// Times each substep over the (K, L) grid on synthetic data, single-threaded.
/// gmm substeps: weights, resp, summary, global. lda substeps: local, summary,
/// global.
std::vector<BenchRow> bench(const BenchSpec& spec);
/// Tab-separated table with a header row.
std::string format_bench(std::span<const BenchRow> rows);

}  // namespace sparsevi
