#include "sparsevi/lda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparsevi/counters.hpp"
#include "sparsevi/errors.hpp"
#include "sparsevi/resp.hpp"
#include "sparsevi/special_fn.hpp"

namespace sparsevi {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_doc(const Document& doc, int V) {
  if (doc.word_ids.size() != doc.counts.size()) {
    throw ArgumentError("document: word_ids and counts differ in length");
  }
  for (int v : doc.word_ids) {
    if (v < 0 || v >= V) {
      throw ArgumentError("document: word id " + std::to_string(v) + " outside [0, " +
                          std::to_string(V) + ")");
    }
  }
}

void finalize(DocState& s, double alpha) {
  const double a = alpha / s.K;
  s.theta.resize(static_cast<std::size_t>(s.K));
  for (int k = 0; k < s.K; ++k) {
    s.theta[static_cast<std::size_t>(k)] = s.counts[static_cast<std::size_t>(k)] + a;
  }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Initial document-topic log weights: ln(1/K) for a cold start, or
// psi(N + alpha/K) from stored counts for a warm start.
std::vector<double> initial_prior(int K, double alpha, const std::vector<double>* warm) {
  std::vector<double> prior(static_cast<std::size_t>(K), -std::log(static_cast<double>(K)));
  if (warm != nullptr) {
    if (static_cast<int>(warm->size()) != K) {
      throw ArgumentError("warm start counts must have length K");
    }
    for (int k = 0; k < K; ++k) {
      prior[static_cast<std::size_t>(k)] = digamma((*warm)[static_cast<std::size_t>(k)] + alpha / K);
    }
  }
  return prior;
}

// One dense sweep over all tokens with the given document-topic log
// weights. Topics with prior -inf receive no mass. Returns the new counts.
std::vector<double> dense_sweep(DocState& s, const Document& doc, const RowMatrix& log_prob,
                                const std::vector<double>& prior) {
  const auto K = static_cast<std::size_t>(s.K);
  std::vector<double> next(K, 0.0);
  std::vector<double> w(K);
  for (std::size_t u = 0; u < doc.n_unique(); ++u) {
    const double* row = log_prob.row(doc.word_ids[u]).data();
    for (std::size_t k = 0; k < K; ++k) w[k] = row[k] + prior[k];
    const std::span<double> vals(s.values.data() + u * K, K);
    dense_resp_from_weights(w, vals);
    const double c = doc.counts[u];
    for (std::size_t k = 0; k < K; ++k) next[k] += c * vals[k];
  }
  return next;
}

// psi(N_k + alpha/K) on `allowed` topics, -inf elsewhere.
std::vector<double> dense_prior(const DocState& s, double alpha, const std::vector<char>* allowed) {
  const double a = alpha / s.K;
  std::vector<double> prior(static_cast<std::size_t>(s.K), kNegInf);
  for (int k = 0; k < s.K; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (allowed == nullptr || (*allowed)[kk]) prior[kk] = digamma(s.counts[kk] + a);
  }
  return prior;
}

std::vector<char> active_mask(const DocState& s) {
  std::vector<char> mask(static_cast<std::size_t>(s.K), 0);
  for (int k : s.active) mask[static_cast<std::size_t>(k)] = 1;
  return mask;
}

// Workspace shared by the sparse update cycles of one document.
struct SparseScratch {
  std::vector<double> prior;     // K, valid on active topics
  std::vector<double> w_active;  // |A|
  std::vector<int> perm;         // |A|
  std::vector<int> picked;       // L
  std::vector<double> w_frozen;  // L
  std::vector<char> is_active;   // K
};

// Selects token u's top-min(L, |A|) topics among the active set.
void select_token(DocState& s, std::size_t u, const double* row, int L, SparseScratch& ws) {
  const std::size_t n_active = s.active.size();
  const int Lu = std::min<int>(L, static_cast<int>(n_active));
  ws.w_active.resize(n_active);
  ws.perm.resize(n_active);
  for (std::size_t j = 0; j < n_active; ++j) {
    const auto k = static_cast<std::size_t>(s.active[j]);
    ws.w_active[j] = row[k] + ws.prior[k];
  }
  const std::size_t off = u * static_cast<std::size_t>(s.width);
  const std::span<double> vals(s.values.data() + off, static_cast<std::size_t>(Lu));
  top_l_resp_from_weights(ws.w_active, Lu, ws.perm, vals,
                          std::span<int>(ws.picked.data(), static_cast<std::size_t>(Lu)));
  for (int l = 0; l < Lu; ++l) {
    s.indices[off + static_cast<std::size_t>(l)] = s.active[static_cast<std::size_t>(ws.picked[static_cast<std::size_t>(l)])];
  }
  for (int l = Lu; l < s.width; ++l) {
    s.values[off + static_cast<std::size_t>(l)] = 0.0;
    s.indices[off + static_cast<std::size_t>(l)] = -1;
  }
  s.nnz[u] = Lu;
}

// Keeps token u's support fixed (minus any inactive topics) and refreshes
// its values. Returns false if no active topic remains in the support.
bool reweight_token(DocState& s, std::size_t u, const double* row, SparseScratch& ws) {
  const std::size_t off = u * static_cast<std::size_t>(s.width);
  int m = 0;
  for (int l = 0; l < s.nnz[u]; ++l) {
    const int k = s.indices[off + static_cast<std::size_t>(l)];
    if (ws.is_active[static_cast<std::size_t>(k)]) s.indices[off + static_cast<std::size_t>(m++)] = k;
  }
  if (m == 0) return false;
  ws.w_frozen.resize(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) {
    const auto k = static_cast<std::size_t>(s.indices[off + static_cast<std::size_t>(l)]);
    ws.w_frozen[static_cast<std::size_t>(l)] = row[k] + ws.prior[k];
  }
  dense_resp_from_weights(ws.w_frozen,
                          std::span<double>(s.values.data() + off, static_cast<std::size_t>(m)));
  for (int l = m; l < s.width; ++l) {
    s.values[off + static_cast<std::size_t>(l)] = 0.0;
    s.indices[off + static_cast<std::size_t>(l)] = -1;
  }
  s.nnz[u] = m;
  return true;
}

void refresh_prior(const DocState& s, double alpha, SparseScratch& ws) {
  const double a = alpha / s.K;
  for (int k : s.active) {
    ws.prior[static_cast<std::size_t>(k)] = digamma(s.counts[static_cast<std::size_t>(k)] + a);
  }
}

std::vector<double> sparse_counts(const DocState& s, const Document& doc) {
  std::vector<double> next(static_cast<std::size_t>(s.K), 0.0);
  for (std::size_t u = 0; u < doc.n_unique(); ++u) {
    const std::size_t off = u * static_cast<std::size_t>(s.width);
    const double c = doc.counts[u];
    for (int l = 0; l < s.nnz[u]; ++l) {
      next[static_cast<std::size_t>(s.indices[off + static_cast<std::size_t>(l)])] +=
          c * s.values[off + static_cast<std::size_t>(l)];
    }
  }
  return next;
}

void shrink_active(DocState& s, double eps, SparseScratch& ws) {
  std::erase_if(s.active, [&](int k) {
    const bool drop = !(s.counts[static_cast<std::size_t>(k)] > eps);
    if (drop) ws.is_active[static_cast<std::size_t>(k)] = 0;
    return drop;
  });
}

// One sparse update cycle: refresh prior weights on the active set, update
// every token (selection or frozen reweighting), recount and shrink the
// active set. Returns max_k |change in N_dk|.
double sparse_cycle(DocState& s, const Document& doc, const RowMatrix& log_prob, double alpha,
                    int L, bool select, double eps, SparseScratch& ws) {
  refresh_prior(s, alpha, ws);
  for (std::size_t u = 0; u < doc.n_unique(); ++u) {
    const double* row = log_prob.row(doc.word_ids[u]).data();
    if (select || !reweight_token(s, u, row, ws)) select_token(s, u, row, L, ws);
  }
  std::vector<double> next = sparse_counts(s, doc);
  const double diff = max_abs_diff(next, s.counts);
  s.counts = std::move(next);
  shrink_active(s, eps, ws);
  return diff;
}

SparseScratch make_scratch(const DocState& s) {
  SparseScratch ws;
  ws.prior.assign(static_cast<std::size_t>(s.K), kNegInf);
  ws.picked.resize(static_cast<std::size_t>(s.width));
  ws.is_active = active_mask(s);
  return ws;
}

}  // namespace

LdaGlobalState make_lda_state(std::vector<DirichletPosterior> topics, double alpha,
                              double lambda_bar) {
  if (topics.empty()) throw ArgumentError("make_lda_state: no topics");
  LdaGlobalState g;
  g.alpha = alpha;
  g.lambda_bar = lambda_bar;
  const int K = static_cast<int>(topics.size());
  const int V = topics.front().size();
  g.log_prob.resize(V, K);
  for (int k = 0; k < K; ++k) {
    if (topics[static_cast<std::size_t>(k)].size() != V) {
      throw ArgumentError("make_lda_state: topics differ in vocabulary size");
    }
    const auto& elog = topics[static_cast<std::size_t>(k)].expected_log();
    for (int v = 0; v < V; ++v) g.log_prob(v, k) = elog[static_cast<std::size_t>(v)];
  }
  g.topics = std::move(topics);
  return g;
}

void LocalStepConfig::validate(int K) const {
  if (L != kDense && (L < 1 || L > K)) {
    throw ArgumentError("local step: L = " + std::to_string(L) + " outside [1, " +
                        std::to_string(K) + "]");
  }
  if (max_iters < 1) throw ArgumentError("local step: max_iters must be >= 1");
  if (!(conv_threshold > 0.0)) throw ArgumentError("local step: conv_threshold must be > 0");
  if (!(eps_active >= 0.0)) throw ArgumentError("local step: eps_active must be >= 0");
  if (max_restart_proposals < 0 || restart_forward_iters < 0) {
    throw ArgumentError("local step: restart settings must be non-negative");
  }
}

std::vector<double> DocState::token_resp(std::size_t u) const {
  std::vector<double> r(static_cast<std::size_t>(K), 0.0);
  const std::size_t off = u * static_cast<std::size_t>(width);
  if (dense) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(off), K, r.begin());
  } else {
    for (int l = 0; l < nnz[u]; ++l) {
      r[static_cast<std::size_t>(indices[off + static_cast<std::size_t>(l)])] =
          values[off + static_cast<std::size_t>(l)];
    }
  }
  return r;
}

DocState dense_step_for_doc(const Document& doc, const RowMatrix& log_prob, double alpha,
                            const LocalStepConfig& cfg, const std::vector<double>* warm_counts) {
  const int K = static_cast<int>(log_prob.cols());
  check_doc(doc, static_cast<int>(log_prob.rows()));
  DocState s;
  s.K = K;
  s.width = K;
  s.dense = true;
  s.values.assign(doc.n_unique() * static_cast<std::size_t>(K), 0.0);
  s.active.resize(static_cast<std::size_t>(K));
  std::iota(s.active.begin(), s.active.end(), 0);

  s.counts = dense_sweep(s, doc, log_prob, initial_prior(K, alpha, warm_counts));
  for (int it = 1; it <= cfg.max_iters; ++it) {
    std::vector<double> next = dense_sweep(s, doc, log_prob, dense_prior(s, alpha, nullptr));
    const double diff = max_abs_diff(next, s.counts);
    s.counts = std::move(next);
    s.n_iters = it;
    if (diff < cfg.conv_threshold) {
      s.converged = true;
      break;
    }
  }
  finalize(s, alpha);
  return s;
}

DocState dense_step_for_doc(const Document& doc, const LdaGlobalState& g,
                            const LocalStepConfig& cfg, const std::vector<double>* warm_counts) {
  return dense_step_for_doc(doc, g.log_prob, g.alpha, cfg, warm_counts);
}

DocState l_sparse_step_for_doc(const Document& doc, const RowMatrix& log_prob, double alpha,
                               const LocalStepConfig& cfg,
                               const std::vector<double>* warm_counts) {
  const int K = static_cast<int>(log_prob.cols());
  const int L = cfg.L == kDense ? K : cfg.L;
  if (L < 1 || L > K) {
    throw ArgumentError("l_sparse_step_for_doc: L = " + std::to_string(L) + " outside [1, " +
                        std::to_string(K) + "]");
  }
  check_doc(doc, static_cast<int>(log_prob.rows()));
  const std::size_t U = doc.n_unique();
  DocState s;
  s.K = K;
  s.width = L;
  s.dense = false;
  s.values.assign(U * static_cast<std::size_t>(L), 0.0);
  s.indices.assign(U * static_cast<std::size_t>(L), -1);
  s.nnz.assign(U, 0);
  s.active.resize(static_cast<std::size_t>(K));
  std::iota(s.active.begin(), s.active.end(), 0);

  SparseScratch ws = make_scratch(s);
  ws.prior = initial_prior(K, alpha, warm_counts);
  for (std::size_t u = 0; u < U; ++u) {
    select_token(s, u, log_prob.row(doc.word_ids[u]).data(), L, ws);
  }
  s.counts = sparse_counts(s, doc);
  shrink_active(s, cfg.eps_active, ws);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const double diff = sparse_cycle(s, doc, log_prob, alpha, L, cfg.schedule.selects(it),
                                     cfg.eps_active, ws);
    s.n_iters = it;
    if (diff < cfg.conv_threshold) {
      s.converged = true;
      break;
    }
  }
  finalize(s, alpha);
  return s;
}

DocState l_sparse_step_for_doc(const Document& doc, const LdaGlobalState& g,
                               const LocalStepConfig& cfg,
                               const std::vector<double>* warm_counts) {
  return l_sparse_step_for_doc(doc, g.log_prob, g.alpha, cfg, warm_counts);
}

double doc_alloc_term(const DocState& s, double alpha) {
  const int K = s.K;
  const double a = alpha / K;
  double theta_total = 0.0;
  double sum_log_gamma = 0.0;
  int n_prior_only = 0;
  for (int k = 0; k < K; ++k) {
    const double t = s.theta[static_cast<std::size_t>(k)];
    theta_total += t;
    if (t == a) {
      ++n_prior_only;
    } else {
      sum_log_gamma += log_gamma(t);
    }
  }
  double total = c_dir_symmetric(a, K) - log_gamma(theta_total) + sum_log_gamma +
                 n_prior_only * log_gamma(a);
  double residual = 0.0;
  double psi_total = 0.0;
  bool have_psi_total = false;
  for (int k = 0; k < K; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double gap = s.counts[kk] + a - s.theta[kk];
    if (gap == 0.0) continue;
    if (!have_psi_total) {
      psi_total = digamma(theta_total);
      have_psi_total = true;
    }
    residual += gap * (digamma(s.theta[kk]) - psi_total);
  }
  return total + residual;
}

double doc_objective(const DocState& s, const Document& doc, const RowMatrix& log_prob,
                     double alpha) {
  double total = doc_alloc_term(s, alpha);
  for (std::size_t u = 0; u < doc.n_unique(); ++u) {
    const double* row = log_prob.row(doc.word_ids[u]).data();
    const std::size_t off = u * static_cast<std::size_t>(s.width);
    const int n = s.dense ? s.K : s.nnz[u];
    double term = 0.0;
    for (int l = 0; l < n; ++l) {
      const double r = s.values[off + static_cast<std::size_t>(l)];
      if (!(r > 0.0)) continue;
      const int k = s.dense ? l : s.indices[off + static_cast<std::size_t>(l)];
      term += r * (row[k] - std::log(r));
    }
    total += doc.counts[u] * term;
  }
  return total;
}

namespace {

// Removes topic k from a state: its responsibility mass is zeroed, each
// affected token is renormalized over what remains of its support (or
// re-selected among the remaining active topics if nothing remains), and
// the counts are recomputed.
void delete_topic(DocState& s, int topic, const Document& doc, const RowMatrix& log_prob,
                  double alpha, int L) {
  std::erase(s.active, topic);
  s.counts[static_cast<std::size_t>(topic)] = 0.0;
  const std::size_t U = doc.n_unique();
  if (s.dense) {
    const auto K = static_cast<std::size_t>(s.K);
    const std::vector<char> allowed = active_mask(s);
    for (std::size_t u = 0; u < U; ++u) {
      double* vals = s.values.data() + u * K;
      vals[topic] = 0.0;
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) total += vals[k];
      if (total > 0.0) {
        for (std::size_t k = 0; k < K; ++k) vals[k] /= total;
      } else {
        const std::vector<double> prior = dense_prior(s, alpha, &allowed);
        const double* row = log_prob.row(doc.word_ids[u]).data();
        std::vector<double> w(K);
        for (std::size_t k = 0; k < K; ++k) w[k] = row[k] + prior[k];
        dense_resp_from_weights(w, std::span<double>(vals, K));
      }
    }
    std::vector<double> next(K, 0.0);
    for (std::size_t u = 0; u < U; ++u) {
      for (std::size_t k = 0; k < K; ++k) next[k] += doc.counts[u] * s.values[u * K + k];
    }
    s.counts = std::move(next);
    return;
  }
  SparseScratch ws = make_scratch(s);
  refresh_prior(s, alpha, ws);
  for (std::size_t u = 0; u < U; ++u) {
    const std::size_t off = u * static_cast<std::size_t>(s.width);
    int m = 0;
    double total = 0.0;
    for (int l = 0; l < s.nnz[u]; ++l) {
      const int k = s.indices[off + static_cast<std::size_t>(l)];
      if (k == topic) continue;
      s.indices[off + static_cast<std::size_t>(m)] = k;
      s.values[off + static_cast<std::size_t>(m)] = s.values[off + static_cast<std::size_t>(l)];
      total += s.values[off + static_cast<std::size_t>(m)];
      ++m;
    }
    if (m == 0 || !(total > 0.0)) {
      select_token(s, u, log_prob.row(doc.word_ids[u]).data(), L, ws);
      continue;
    }
    for (int l = 0; l < m; ++l) s.values[off + static_cast<std::size_t>(l)] /= total;
    for (int l = m; l < s.width; ++l) {
      s.values[off + static_cast<std::size_t>(l)] = 0.0;
      s.indices[off + static_cast<std::size_t>(l)] = -1;
    }
    s.nnz[u] = m;
  }
  s.counts = sparse_counts(s, doc);
}

}  // namespace

DocState restart_proposal(const DocState& state, const Document& doc, const RowMatrix& log_prob,
                          double alpha, const LocalStepConfig& cfg,
                          std::vector<RestartRecord>* log) {
  DocState current = state;
  if (state.K <= 1 || cfg.max_restart_proposals <= 0) return current;
  const int L = state.dense ? state.K : state.width;

  std::vector<int> candidates;
  for (int k : state.active) {
    if (state.counts[static_cast<std::size_t>(k)] > 0.0) candidates.push_back(k);
  }
  if (candidates.size() <= 1) return current;
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    const double na = state.counts[static_cast<std::size_t>(a)];
    const double nb = state.counts[static_cast<std::size_t>(b)];
    return na < nb || (na == nb && a < b);
  });
  if (static_cast<int>(candidates.size()) > cfg.max_restart_proposals) {
    candidates.resize(static_cast<std::size_t>(cfg.max_restart_proposals));
  }

  double current_obj = doc_objective(current, doc, log_prob, alpha);
  for (int topic : candidates) {
    if (current.active.size() <= 1 ||
        std::find(current.active.begin(), current.active.end(), topic) == current.active.end()) {
      continue;
    }
    DocState proposal = current;
    delete_topic(proposal, topic, doc, log_prob, alpha, L);
    if (proposal.dense) {
      const std::vector<char> allowed = active_mask(proposal);
      for (int step = 0; step < cfg.restart_forward_iters; ++step) {
        proposal.counts = dense_sweep(proposal, doc, log_prob, dense_prior(proposal, alpha, &allowed));
      }
    } else {
      SparseScratch ws = make_scratch(proposal);
      for (int step = 0; step < cfg.restart_forward_iters; ++step) {
        sparse_cycle(proposal, doc, log_prob, alpha, L, true, cfg.eps_active, ws);
      }
    }
    finalize(proposal, alpha);
    const double proposal_obj = doc_objective(proposal, doc, log_prob, alpha);
    const bool accept = proposal_obj > current_obj;
    ++current.restart_proposals;
    ++thread_counters().restart_proposals;
    if (log != nullptr) log->push_back(RestartRecord{topic, current_obj, proposal_obj, accept});
    if (accept) {
      const auto proposals = current.restart_proposals;
      const auto accepts = current.restart_accepts + 1;
      current = std::move(proposal);
      current.restart_proposals = proposals;
      current.restart_accepts = accepts;
      current_obj = proposal_obj;
      ++thread_counters().restart_accepts;
    }
  }
  return current;
}

DocState restart_proposal(const DocState& state, const Document& doc, const LdaGlobalState& g,
                          const LocalStepConfig& cfg, std::vector<RestartRecord>* log) {
  return restart_proposal(state, doc, g.log_prob, g.alpha, cfg, log);
}

DocState local_step_for_doc(const Document& doc, const LdaGlobalState& g,
                            const LocalStepConfig& cfg, const std::vector<double>* warm_counts,
                            std::vector<RestartRecord>* log) {
  DocState s = cfg.L == kDense ? dense_step_for_doc(doc, g, cfg, warm_counts)
                               : l_sparse_step_for_doc(doc, g, cfg, warm_counts);
  if (cfg.restarts_enabled) s = restart_proposal(s, doc, g, cfg, log);
  return s;
}

LdaSuffStats LdaSuffStats::zero(int K, int V) {
  LdaSuffStats out;
  out.topics.assign(static_cast<std::size_t>(K), CategoricalStat::zero(V));
  return out;
}

LdaSuffStats& LdaSuffStats::operator+=(const LdaSuffStats& o) {
  for (std::size_t k = 0; k < topics.size(); ++k) topics[k] += o.topics[k];
  n_docs += o.n_docs;
  n_tokens += o.n_tokens;
  entropy += o.entropy;
  alloc += o.alloc;
  return *this;
}

LdaSuffStats& LdaSuffStats::operator-=(const LdaSuffStats& o) {
  for (std::size_t k = 0; k < topics.size(); ++k) topics[k] -= o.topics[k];
  n_docs -= o.n_docs;
  n_tokens -= o.n_tokens;
  entropy -= o.entropy;
  alloc -= o.alloc;
  return *this;
}

LdaSuffStats LdaSuffStats::scaled(double factor) const {
  LdaSuffStats out;
  out.topics.reserve(topics.size());
  for (const auto& t : topics) out.topics.push_back(t.scaled(factor));
  out.n_docs = n_docs * factor;
  out.n_tokens = n_tokens * factor;
  out.entropy = entropy * factor;
  out.alloc = alloc * factor;
  return out;
}

void accumulate_doc(const Document& doc, const DocState& s, double alpha, LdaSuffStats& stats) {
  for (std::size_t u = 0; u < doc.n_unique(); ++u) {
    const auto v = static_cast<std::size_t>(doc.word_ids[u]);
    const double c = doc.counts[u];
    const std::size_t off = u * static_cast<std::size_t>(s.width);
    const int n = s.dense ? s.K : s.nnz[u];
    double h = 0.0;
    for (int l = 0; l < n; ++l) {
      const double r = s.values[off + static_cast<std::size_t>(l)];
      if (!(r > 0.0)) continue;
      const int k = s.dense ? l : s.indices[off + static_cast<std::size_t>(l)];
      auto& topic = stats.topics[static_cast<std::size_t>(k)];
      topic.s[v] += c * r;
      topic.n += c * r;
      h -= r * std::log(r);
    }
    stats.entropy += c * h;
    stats.n_tokens += c;
  }
  stats.alloc += doc_alloc_term(s, alpha);
  stats.n_docs += 1.0;
}

LdaSuffStats lda_summary(std::span<const Document> docs, std::span<const DocState> states,
                         double alpha, int V) {
  if (docs.size() != states.size()) throw ArgumentError("lda_summary: docs/states size mismatch");
  const int K = states.empty() ? 0 : states.front().K;
  LdaSuffStats stats = LdaSuffStats::zero(K, V);
  for (std::size_t d = 0; d < docs.size(); ++d) accumulate_doc(docs[d], states[d], alpha, stats);
  return stats;
}

LdaSuffStats lda_local_summary(const Corpus& corpus, std::size_t begin, std::size_t end,
                               const LdaGlobalState& g, const LocalStepConfig& cfg,
                               const ParallelOptions& opts,
                               std::vector<std::vector<double>>* warm) {
  cfg.validate(g.K());
  const LdaSuffStats zero = LdaSuffStats::zero(g.K(), g.V());
  return parallel_reduce(
      end - begin, opts, zero,
      [&](std::size_t b, std::size_t e) {
        LdaSuffStats stats = zero;
        for (std::size_t d = begin + b; d < begin + e; ++d) {
          const Document& doc = corpus.docs[d];
          if (doc.n_unique() == 0) continue;
          const std::vector<double>* warm_counts = nullptr;
          if (warm != nullptr && !(*warm)[d].empty()) warm_counts = &(*warm)[d];
          DocState s = local_step_for_doc(doc, g, cfg, warm_counts);
          accumulate_doc(doc, s, g.alpha, stats);
          if (warm != nullptr) (*warm)[d] = s.counts;
        }
        return stats;
      },
      [](LdaSuffStats& a, const LdaSuffStats& b) { a += b; });
}

LdaGlobalState lda_global_step(const LdaSuffStats& stats, double alpha, double lambda_bar) {
  std::vector<DirichletPosterior> topics;
  topics.reserve(stats.topics.size());
  for (const auto& t : stats.topics) topics.push_back(categorical_global_update(t, lambda_bar));
  return make_lda_state(std::move(topics), alpha, lambda_bar);
}

double lda_elbo(const LdaSuffStats& stats, const LdaGlobalState& g) {
  return stats.alloc + stats.entropy + l_data_categorical(stats.topics, g.lambda_bar, g.topics);
}

}  // namespace sparsevi
