#pragma once

// Variational inference for a finite Dirichlet mixture:
//   local step    weights -> responsibilities (dense or L-sparse)
//   summary step  responsibilities -> sufficient statistics
//   global step   statistics -> Dirichlet and observation posteriors
//   elbo          L_alloc + L_entropy + L_data from statistics alone
//
// Responsibilities never need to outlive a batch: the entropy of every
// batch is folded into its MixSuffStats, so the objective can be evaluated
// from aggregated statistics.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sparsevi/errors.hpp"
#include "sparsevi/expfam.hpp"
#include "sparsevi/parallel.hpp"
#include "sparsevi/resp.hpp"
#include "sparsevi/special_fn.hpp"
#include "sparsevi/types.hpp"

namespace sparsevi {

template <class F>
struct MixGlobalState {
  double alpha = 1.0;
  typename F::Prior prior{};
  DirichletPosterior theta;  // q(pi)
  std::vector<typename F::Posterior> posts;

  int K() const { return static_cast<int>(posts.size()); }
  /// E[ln pi_k] = psi(theta_k) - psi(sum theta)
  const std::vector<double>& expected_log_pi() const { return theta.expected_log(); }
};

template <class F>
struct MixSuffStats {
  std::vector<typename F::Stat> s;
  double count_obs = 0.0;
  double entropy = 0.0;

  static MixSuffStats zero(const typename F::Prior& prior, int K, int dim) {
    MixSuffStats out;
    out.s.assign(static_cast<std::size_t>(K), F::zero_stat(prior, dim));
    return out;
  }
  int K() const { return static_cast<int>(s.size()); }
  std::vector<double> counts() const {
    std::vector<double> n(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) n[k] = s[k].n;
    return n;
  }
  MixSuffStats& operator+=(const MixSuffStats& o) {
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += o.s[k];
    count_obs += o.count_obs;
    entropy += o.entropy;
    return *this;
  }
  MixSuffStats& operator-=(const MixSuffStats& o) {
    for (std::size_t k = 0; k < s.size(); ++k) s[k] -= o.s[k];
    count_obs -= o.count_obs;
    entropy -= o.entropy;
    return *this;
  }
  MixSuffStats scaled(double factor) const {
    MixSuffStats out;
    out.s.reserve(s.size());
    for (const auto& st : s) out.s.push_back(st.scaled(factor));
    out.count_obs = count_obs * factor;
    out.entropy = entropy * factor;
    return out;
  }
};

// Responsibilities for a contiguous batch of observations. Dense batches
// store n x K values; sparse batches store n x L values and indices, each
// row ordered by weight rank.
struct RespBatch {
  std::size_t n_obs = 0;
  int K = 0;
  int width = 0;
  bool dense = true;
  std::vector<double> values;
  std::vector<int> indices;
  double entropy = 0.0;
  double log_normalizer = 0.0;  // sum over observations of the optimal local objective

  DenseResp dense_at(std::size_t i) const;
  SparseResp sparse_at(std::size_t i) const;
};

/// W_k = E[ln pi_k] + E[ln F(x_i | phi_k)] for one observation.
template <class F>
std::vector<double> compute_weights(const typename F::Data& data, std::size_t i,
                                    const MixGlobalState<F>& g) {
  RowMatrix w = RowMatrix::Zero(1, g.K());
  F::log_lik_block(data, i, i + 1, g.posts, w);
  const auto& elog_pi = g.expected_log_pi();
  std::vector<double> out(static_cast<std::size_t>(g.K()));
  for (int k = 0; k < g.K(); ++k) out[static_cast<std::size_t>(k)] = w(0, k) + elog_pi[static_cast<std::size_t>(k)];
  return out;
}

/// Weights for observations [begin, end), one row per observation.
template <class F>
RowMatrix compute_weights_block(const typename F::Data& data, std::size_t begin, std::size_t end,
                                const MixGlobalState<F>& g) {
  RowMatrix w = RowMatrix::Zero(static_cast<Eigen::Index>(end - begin), g.K());
  F::log_lik_block(data, begin, end, g.posts, w);
  const auto& elog_pi = g.expected_log_pi();
  const Eigen::Map<const Eigen::RowVectorXd> prior_row(elog_pi.data(), g.K());
  w.rowwise() += prior_row;
  return w;
}

/// Converts a block of weights into responsibilities. L == kDense selects the
/// dense softmax; otherwise 1 <= L <= K (L == K runs the sparse code path
/// with a vacuous constraint).
RespBatch resp_from_weight_block(const RowMatrix& weights, int L);

template <class F>
RespBatch local_step(const typename F::Data& data, std::size_t begin, std::size_t end,
                     const MixGlobalState<F>& g, int L) {
  if (L != kDense && (L < 1 || L > g.K())) {
    throw ArgumentError("local_step: L = " + std::to_string(L) + " outside [1, " +
                        std::to_string(g.K()) + "]");
  }
  return resp_from_weight_block(compute_weights_block(data, begin, end, g), L);
}

/// Sufficient statistics for observations [begin, end) given their
/// responsibilities. Sparse batches touch only the L stored entries per row.
template <class F>
MixSuffStats<F> summary_step(const typename F::Data& data, std::size_t begin, std::size_t end,
                             const RespBatch& resp, const typename F::Prior& prior) {
  if (resp.n_obs != end - begin) throw ArgumentError("summary_step: batch/resp size mismatch");
  auto stats = MixSuffStats<F>::zero(prior, resp.K, F::data_dim(data));
  if (resp.dense) {
    const Eigen::Map<const RowMatrix> r(resp.values.data(), static_cast<Eigen::Index>(resp.n_obs),
                                        resp.K);
    F::accumulate_dense(data, begin, end, r, stats.s);
  } else {
    F::accumulate_sparse(data, begin, end, resp.width, resp.values, resp.indices, stats.s);
  }
  stats.count_obs = static_cast<double>(resp.n_obs);
  stats.entropy = resp.entropy;
  return stats;
}

/// Local and summary steps fused over chunks; responsibilities are discarded
/// as soon as each chunk's statistics exist.
template <class F>
MixSuffStats<F> local_summary(const typename F::Data& data, std::size_t begin, std::size_t end,
                              const MixGlobalState<F>& g, int L,
                              const ParallelOptions& opts = {}) {
  const auto zero = MixSuffStats<F>::zero(g.prior, g.K(), F::data_dim(data));
  return parallel_reduce(
      end - begin, opts, zero,
      [&](std::size_t b, std::size_t e) {
        const auto resp = local_step<F>(data, begin + b, begin + e, g, L);
        return summary_step<F>(data, begin + b, begin + e, resp, g.prior);
      },
      [](MixSuffStats<F>& a, const MixSuffStats<F>& b) { a += b; });
}

/// theta_k = alpha / K + N_k; observation posteriors from the family's
/// conjugate update.
template <class F>
MixGlobalState<F> global_step(const MixSuffStats<F>& stats, double alpha,
                              const typename F::Prior& prior) {
  const int K = stats.K();
  if (K < 1) throw ArgumentError("global_step: no clusters");
  MixGlobalState<F> g;
  g.alpha = alpha;
  g.prior = prior;
  std::vector<double> theta(static_cast<std::size_t>(K));
  g.posts.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto& st = stats.s[static_cast<std::size_t>(k)];
    theta[static_cast<std::size_t>(k)] = alpha / K + std::max(st.n, 0.0);
    g.posts.push_back(F::update(st, prior));
  }
  g.theta = DirichletPosterior(std::move(theta));
  return g;
}

/// c_dir(alpha/K) - c_dir(theta) + sum_k (N_k + alpha/K - theta_k) E[ln pi_k]
template <class F>
double l_alloc(const MixSuffStats<F>& stats, const MixGlobalState<F>& g) {
  const int K = g.K();
  const double a = g.alpha / K;
  double total = c_dir_symmetric(a, K) - g.theta.cumulant();
  const auto& theta = g.theta.lambda();
  const auto& elog = g.theta.expected_log();
  for (int k = 0; k < K; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    total += (stats.s[kk].n + a - theta[kk]) * elog[kk];
  }
  return total;
}

template <class F>
double elbo(const MixSuffStats<F>& stats, const MixGlobalState<F>& g) {
  return l_alloc(stats, g) + stats.entropy +
         F::l_data(stats.s, g.prior, g.posts, stats.count_obs);
}

using GaussianMixture = MixGlobalState<GaussianFamily>;
using CategoricalMixture = MixGlobalState<CategoricalFamily>;

}  // namespace sparsevi
