#pragma once

// Observation models with conjugate priors.
//
//   Zero-mean Gaussian likelihood, Wishart prior on the precision Phi.
//   Categorical likelihood, symmetric Dirichlet prior on the word
//   probabilities phi.
//
// Posterior objects are immutable; every expectation the local step needs is
// computed once at construction. The sufficient statistics form a
// commutative monoid under elementwise addition with the zero statistic as
// identity.

#include <span>
#include <vector>

#include <Eigen/Cholesky>

#include "sparsevi/dataset.hpp"
#include "sparsevi/types.hpp"

namespace sparsevi {

// ---------------------------------------------------------------- Gaussian

struct WishartPrior {
  double nu = 0.0;
  Matrix inverse_scale;  // Lambda^{-1}

  int dim() const { return static_cast<int>(inverse_scale.rows()); }
  static WishartPrior from_scale(double nu, const Matrix& scale);
};

/// Relative ridge added to M in default_wishart_prior, scaled by tr(M) / D.
inline constexpr double kDefaultPriorRidge = 1e-6;

/// nu = D + 2 and Lambda^{-1} = nu * (M + ridge * I), so the prior mean of
/// Phi is (approximately) M^{-1} for the empirical second moment M.
WishartPrior default_wishart_prior(const Matrix& second_moment);

class WishartPosterior {
 public:
  WishartPosterior() = default;
  /// Throws NotSpdError if `inverse_scale` is not SPD and DomainError if
  /// nu <= D - 1.
  WishartPosterior(double nu, Matrix inverse_scale);

  int dim() const { return static_cast<int>(inverse_scale_.rows()); }
  double nu() const { return nu_; }
  const Matrix& inverse_scale() const { return inverse_scale_; }
  const Matrix& scale() const { return scale_; }
  double log_det_inverse_scale() const { return log_det_inverse_scale_; }
  /// E[ln|Phi|] = sum_d psi((nu + 1 - d) / 2) + D ln 2 + ln|Lambda|
  double expected_log_det() const { return expected_log_det_; }
  /// E[Phi] = nu Lambda
  const Matrix& expected_precision() const { return expected_precision_; }
  /// Lower-triangular F with E[Phi] = F F^T.
  const Matrix& precision_factor() const { return precision_factor_; }
  double cumulant() const { return cumulant_; }

 private:
  double nu_ = 0.0;
  Matrix inverse_scale_;
  Matrix scale_;
  Matrix expected_precision_;
  Matrix precision_factor_;
  double log_det_inverse_scale_ = 0.0;
  double expected_log_det_ = 0.0;
  double cumulant_ = 0.0;
};

struct GaussianStat {
  double n = 0.0;
  Matrix s;  // sum_n r_n x_n x_n^T

  static GaussianStat zero(int dim);
  GaussianStat& operator+=(const GaussianStat& o);
  GaussianStat& operator-=(const GaussianStat& o);
  GaussianStat scaled(double factor) const;
};

/// -(D/2) ln 2 pi + (1/2) E[ln|Phi|] - (1/2) x^T E[Phi] x
double gaussian_expected_log_lik(std::span<const double> x, const WishartPosterior& post);

/// nu_hat = nu_bar + N, Lambda_hat^{-1} = Lambda_bar^{-1} + S.
WishartPosterior gaussian_global_update(const GaussianStat& stat, const WishartPrior& prior);

/// Expected log likelihood plus the prior/posterior terms, summed over
/// clusters. Residual pairings use the conjugate form
/// -(1/2) tr((S + Lambda_bar^{-1} - Lambda_hat^{-1}) E[Phi]), which vanishes
/// right after a global update. `n_obs` is the total observation count.
double l_data_gaussian(std::span<const GaussianStat> stats, const WishartPrior& prior,
                       std::span<const WishartPosterior> posts, double n_obs);

// ------------------------------------------------------------- Categorical

class DirichletPosterior {
 public:
  DirichletPosterior() = default;
  /// Throws DomainError if any entry is not positive.
  explicit DirichletPosterior(std::vector<double> lambda);

  int size() const { return static_cast<int>(lambda_.size()); }
  const std::vector<double>& lambda() const { return lambda_; }
  double total() const { return total_; }
  /// psi(lambda_v) - psi(sum lambda)
  const std::vector<double>& expected_log() const { return expected_log_; }
  double cumulant() const { return cumulant_; }
  /// Posterior mean lambda_v / sum lambda.
  std::vector<double> mean() const;

 private:
  std::vector<double> lambda_;
  std::vector<double> expected_log_;
  double total_ = 0.0;
  double cumulant_ = 0.0;
};

struct CategoricalStat {
  double n = 0.0;
  std::vector<double> s;  // expected word counts

  static CategoricalStat zero(int vocab_size);
  CategoricalStat& operator+=(const CategoricalStat& o);
  CategoricalStat& operator-=(const CategoricalStat& o);
  CategoricalStat scaled(double factor) const;
};

/// psi(lambda_v) - psi(sum lambda), from the cache. Throws ArgumentError for
/// v outside [0, V).
double categorical_expected_log_lik(int v, const DirichletPosterior& post);

/// lambda_v = lambda_bar + S_v.
DirichletPosterior categorical_global_update(const CategoricalStat& stat, double lambda_bar);
DirichletPosterior categorical_global_update(std::span<const double> word_counts,
                                             double lambda_bar);

/// sum_k c_dir(lambda_bar) - c_dir(lambda_hat_k)
///       + sum_kv (S_kv + lambda_bar - lambda_hat_kv) E[ln phi_kv]
double l_data_categorical(std::span<const CategoricalStat> stats, double lambda_bar,
                          std::span<const DirichletPosterior> posts);

// ------------------------------------------------------ family descriptors

// Family descriptors bind observation type, prior, posterior and statistic
// together for the mixture pipeline. Each provides:
//   data_dim, zero_stat, update, blend, l_data, log_lik_block (weights for a range of
//   observations), accumulate_dense and accumulate_sparse.

struct GaussianFamily {
  using Data = DenseDataset;
  using Prior = WishartPrior;
  using Posterior = WishartPosterior;
  using Stat = GaussianStat;

  static int data_dim(const Data& data) { return data.dim(); }
  static Stat zero_stat(const Prior& /*prior*/, int dim) { return Stat::zero(dim); }
  static Posterior update(const Stat& stat, const Prior& prior) {
    return gaussian_global_update(stat, prior);
  }
  /// Convex combination of natural parameters (nu, Lambda^{-1}).
  static Posterior blend(const Posterior& current, const Posterior& target, double rho);
  static double l_data(std::span<const Stat> stats, const Prior& prior,
                       std::span<const Posterior> posts, double n_obs) {
    return l_data_gaussian(stats, prior, posts, n_obs);
  }
  /// out(i, k) += E[ln N(x_{begin+i} | 0, Phi_k^{-1})] for i in [0, end - begin).
  static void log_lik_block(const Data& data, std::size_t begin, std::size_t end,
                            std::span<const Posterior> posts, RowMatrix& out);
  static void accumulate_dense(const Data& data, std::size_t begin, std::size_t end,
                               const RowMatrix& resp, std::span<Stat> stats);
  static void accumulate_sparse(const Data& data, std::size_t begin, std::size_t end,
                                int width, std::span<const double> values,
                                std::span<const int> indices, std::span<Stat> stats);
};

struct CategoricalFamily {
  using Data = TokenDataset;
  using Prior = double;  // symmetric Dirichlet parameter lambda_bar
  using Posterior = DirichletPosterior;
  using Stat = CategoricalStat;

  static int data_dim(const Data& data) { return data.vocab_size; }
  static Stat zero_stat(const Prior& /*prior*/, int vocab_size) {
    return Stat::zero(vocab_size);
  }
  static Posterior update(const Stat& stat, const Prior& prior) {
    return categorical_global_update(stat, prior);
  }
  static Posterior blend(const Posterior& current, const Posterior& target, double rho);
  static double l_data(std::span<const Stat> stats, const Prior& prior,
                       std::span<const Posterior> posts, double /*n_obs*/) {
    return l_data_categorical(stats, prior, posts);
  }
  static void log_lik_block(const Data& data, std::size_t begin, std::size_t end,
                            std::span<const Posterior> posts, RowMatrix& out);
  static void accumulate_dense(const Data& data, std::size_t begin, std::size_t end,
                               const RowMatrix& resp, std::span<Stat> stats);
  static void accumulate_sparse(const Data& data, std::size_t begin, std::size_t end,
                                int width, std::span<const double> values,
                                std::span<const int> indices, std::span<Stat> stats);
};

}  // namespace sparsevi
