#pragma once

// Latent Dirichlet allocation: the per-document local step (dense and
// L-sparse with active-topic tracking), restart proposals, topic statistics,
// the global step and the objective.
//
// A document's responsibilities are shared by word type: one responsibility
// vector per distinct type, weighted by the type's count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparsevi/dataset.hpp"
#include "sparsevi/expfam.hpp"
#include "sparsevi/parallel.hpp"
#include "sparsevi/types.hpp"

namespace sparsevi {

struct LdaGlobalState {
  double alpha = 0.5;
  double lambda_bar = 0.1;
  std::vector<DirichletPosterior> topics;  // q(phi_k), each over V words
  RowMatrix log_prob;                      // V x K table of E[ln phi_kv]

  int K() const { return static_cast<int>(topics.size()); }
  int V() const { return static_cast<int>(log_prob.rows()); }
};

/// Builds the state and its expectation table from topic posteriors.
LdaGlobalState make_lda_state(std::vector<DirichletPosterior> topics, double alpha,
                              double lambda_bar);

// Iterations at which the sparse step re-runs top-L selection. Iteration 0
// (initialization) always selects.
struct SelectionSchedule {
  int first = 5;   // select at iterations 1..first
  int every = 10;  // then at every multiple of `every`

  bool selects(int iter) const {
    return iter <= first || (every > 0 && iter % every == 0);
  }
  static SelectionSchedule always() { return SelectionSchedule{1 << 30, 1}; }
};

struct LocalStepConfig {
  int L = kDense;
  int max_iters = 100;
  double conv_threshold = 0.05;  // on max_k |change in N_dk|
  double eps_active = 1e-8;
  SelectionSchedule schedule;
  bool restarts_enabled = false;
  int max_restart_proposals = 5;
  int restart_forward_iters = 2;

  /// Throws ArgumentError on invalid fields; K is the topic count.
  void validate(int K) const;
};

// Per-document variational state.
struct DocState {
  int K = 0;
  int width = 0;                 // K for dense states, L for sparse ones
  bool dense = true;
  std::vector<double> values;    // U x width
  std::vector<int> indices;      // U x width (sparse only)
  std::vector<int> nnz;          // live entries per token (sparse only)
  std::vector<double> counts;    // N_dk
  std::vector<double> theta;     // theta_dk = N_dk + alpha / K after finalization
  std::vector<int> active;       // A_d, ascending
  int n_iters = 0;
  bool converged = false;
  std::uint32_t restart_proposals = 0;
  std::uint32_t restart_accepts = 0;

  std::size_t n_unique() const { return width == 0 ? 0 : values.size() / static_cast<std::size_t>(width); }
  /// Token u's responsibilities as a dense length-K vector.
  std::vector<double> token_resp(std::size_t u) const;
};

// Optional trace of restart decisions; `gain` is proposal minus current
// objective.
struct RestartRecord {
  int topic = -1;
  double before = 0.0;
  double after = 0.0;
  bool accepted = false;
};

/// Dense block-coordinate ascent. Cold start uses uniform document-topic
/// weights; pass `warm_counts` (length K) to start from stored counts.
DocState dense_step_for_doc(const Document& doc, const RowMatrix& log_prob, double alpha,
                            const LocalStepConfig& cfg,
                            const std::vector<double>* warm_counts = nullptr);
DocState dense_step_for_doc(const Document& doc, const LdaGlobalState& g,
                            const LocalStepConfig& cfg,
                            const std::vector<double>* warm_counts = nullptr);

/// L-sparse iteration restricted to the active topic set. Throws
/// ArgumentError if L is not in [1, K].
DocState l_sparse_step_for_doc(const Document& doc, const RowMatrix& log_prob, double alpha,
                               const LocalStepConfig& cfg,
                               const std::vector<double>* warm_counts = nullptr);
DocState l_sparse_step_for_doc(const Document& doc, const LdaGlobalState& g,
                               const LocalStepConfig& cfg,
                               const std::vector<double>* warm_counts = nullptr);

/// Single-document objective: the per-document slice of L_alloc + L_entropy
/// + L_data that depends on this document's local parameters.
double doc_objective(const DocState& state, const Document& doc, const RowMatrix& log_prob,
                     double alpha);

/// Tries deleting active topics (smallest N_dk first), runs a few update
/// cycles forward and keeps a proposal only if it strictly improves the
/// document objective. The result never scores below `state`.
DocState restart_proposal(const DocState& state, const Document& doc, const RowMatrix& log_prob,
                          double alpha, const LocalStepConfig& cfg,
                          std::vector<RestartRecord>* log = nullptr);
DocState restart_proposal(const DocState& state, const Document& doc, const LdaGlobalState& g,
                          const LocalStepConfig& cfg, std::vector<RestartRecord>* log = nullptr);

/// Dense or sparse step per cfg.L, followed by restarts when enabled.
DocState local_step_for_doc(const Document& doc, const LdaGlobalState& g,
                            const LocalStepConfig& cfg,
                            const std::vector<double>* warm_counts = nullptr,
                            std::vector<RestartRecord>* log = nullptr);

struct LdaSuffStats {
  std::vector<CategoricalStat> topics;  // S_kv and per-topic token totals
  double n_docs = 0.0;
  double n_tokens = 0.0;
  double entropy = 0.0;  // sum_d sum_u c_du H(r_du)
  double alloc = 0.0;    // sum_d of the per-document L_alloc terms

  static LdaSuffStats zero(int K, int V);
  int K() const { return static_cast<int>(topics.size()); }
  LdaSuffStats& operator+=(const LdaSuffStats& o);
  LdaSuffStats& operator-=(const LdaSuffStats& o);
  LdaSuffStats scaled(double factor) const;
};

/// Per-document L_alloc: c_dir(alpha/K) - c_dir(theta)
///   + sum_k (N_k + alpha/K - theta_k)(psi(theta_k) - psi(sum theta)).
double doc_alloc_term(const DocState& state, double alpha);

/// Adds one finalized document to the statistics.
void accumulate_doc(const Document& doc, const DocState& state, double alpha, LdaSuffStats& stats);

LdaSuffStats lda_summary(std::span<const Document> docs, std::span<const DocState> states,
                         double alpha, int V);

/// Local step plus summary over docs [begin, end), discarding the document
/// states. When `warm` is non-null it supplies and receives per-document
/// counts (indexed by absolute document position).
LdaSuffStats lda_local_summary(const Corpus& corpus, std::size_t begin, std::size_t end,
                               const LdaGlobalState& g, const LocalStepConfig& cfg,
                               const ParallelOptions& opts = {},
                               std::vector<std::vector<double>>* warm = nullptr);

/// lambda_kv = lambda_bar + S_kv; expectation table refreshed.
LdaGlobalState lda_global_step(const LdaSuffStats& stats, double alpha, double lambda_bar);

double lda_elbo(const LdaSuffStats& stats, const LdaGlobalState& g);

}  // namespace sparsevi
