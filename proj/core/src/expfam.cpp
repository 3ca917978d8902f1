#include "sparsevi/expfam.hpp"

#include <cmath>
#include <string>

#include "sparsevi/errors.hpp"
#include "sparsevi/special_fn.hpp"

namespace sparsevi {
namespace {

void symmetrize_from_lower(Matrix& m) {
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
}

}  // namespace

// ---------------------------------------------------------------- Gaussian

WishartPrior WishartPrior::from_scale(double nu, const Matrix& scale) {
  const auto llt = cholesky(scale);
  Matrix inv = llt.solve(Matrix::Identity(scale.rows(), scale.cols()));
  inv = 0.5 * (inv + inv.transpose()).eval();
  return WishartPrior{nu, std::move(inv)};
}

WishartPrior default_wishart_prior(const Matrix& second_moment) {
  const auto D = second_moment.rows();
  const double nu = static_cast<double>(D) + 2.0;
  // Small ridge keeps the prior proper when the data are rank deficient
  // (e.g. mean-removed patches lie in a hyperplane).
  const double ridge = kDefaultPriorRidge * second_moment.trace() / static_cast<double>(D);
  const Matrix m = second_moment + ridge * Matrix::Identity(D, D);
  return WishartPrior{nu, nu * m};
}

WishartPosterior::WishartPosterior(double nu, Matrix inverse_scale)
    : nu_(nu), inverse_scale_(std::move(inverse_scale)) {
  const int D = dim();
  if (!(nu_ > D - 1)) {
    throw DomainError("WishartPosterior: need nu > D - 1, got nu = " + std::to_string(nu_));
  }
  const auto llt = cholesky(inverse_scale_);
  log_det_inverse_scale_ = log_det_from_cholesky(llt);
  scale_ = llt.solve(Matrix::Identity(D, D));
  scale_ = 0.5 * (scale_ + scale_.transpose()).eval();
  double e_log_det = D * kLogTwo - log_det_inverse_scale_;
  for (int d = 1; d <= D; ++d) e_log_det += digamma(0.5 * (nu_ + 1 - d));
  expected_log_det_ = e_log_det;
  expected_precision_ = nu_ * scale_;
  precision_factor_ = cholesky(expected_precision_).matrixL();
  cumulant_ = c_wish_from_log_det(nu_, D, log_det_inverse_scale_);
}

GaussianStat GaussianStat::zero(int dim) { return GaussianStat{0.0, Matrix::Zero(dim, dim)}; }

GaussianStat& GaussianStat::operator+=(const GaussianStat& o) {
  n += o.n;
  s += o.s;
  return *this;
}

GaussianStat& GaussianStat::operator-=(const GaussianStat& o) {
  n -= o.n;
  s -= o.s;
  return *this;
}

GaussianStat GaussianStat::scaled(double factor) const {
  return GaussianStat{n * factor, s * factor};
}

double gaussian_expected_log_lik(std::span<const double> x, const WishartPosterior& post) {
  const int D = post.dim();
  if (static_cast<int>(x.size()) != D) {
    throw ArgumentError("gaussian_expected_log_lik: dimension mismatch");
  }
  const Eigen::Map<const Vector> xv(x.data(), D);
  const double quad = (post.precision_factor().transpose() * xv).squaredNorm();
  return -0.5 * D * kLogTwoPi + 0.5 * post.expected_log_det() - 0.5 * quad;
}

WishartPosterior gaussian_global_update(const GaussianStat& stat, const WishartPrior& prior) {
  return WishartPosterior(prior.nu + stat.n, prior.inverse_scale + stat.s);
}

double l_data_gaussian(std::span<const GaussianStat> stats, const WishartPrior& prior,
                       std::span<const WishartPosterior> posts, double n_obs) {
  if (stats.size() != posts.size()) {
    throw ArgumentError("l_data_gaussian: stats and posteriors differ in length");
  }
  if (stats.empty()) return 0.0;
  const int D = prior.dim();
  const double prior_cumulant = c_wish_from_inverse_scale(prior.nu, prior.inverse_scale);
  double total = -0.5 * n_obs * D * kLogTwoPi;
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& post = posts[k];
    total += prior_cumulant - post.cumulant();
    total += 0.5 * (stats[k].n + prior.nu - post.nu()) * post.expected_log_det();
    const Matrix residual = stats[k].s + prior.inverse_scale - post.inverse_scale();
    total -= 0.5 * residual.cwiseProduct(post.expected_precision()).sum();
  }
  return total;
}

WishartPosterior GaussianFamily::blend(const Posterior& current, const Posterior& target,
                                       double rho) {
  return WishartPosterior((1.0 - rho) * current.nu() + rho * target.nu(),
                          (1.0 - rho) * current.inverse_scale() + rho * target.inverse_scale());
}

void GaussianFamily::log_lik_block(const Data& data, std::size_t begin, std::size_t end,
                                   std::span<const Posterior> posts, RowMatrix& out) {
  const auto n = static_cast<Eigen::Index>(end - begin);
  const int D = data.dim();
  const auto block = data.x.middleRows(static_cast<Eigen::Index>(begin), n);
  RowMatrix projected(n, D);
  for (std::size_t k = 0; k < posts.size(); ++k) {
    const auto& post = posts[k];
    projected.noalias() = block * post.precision_factor();
    const double constant = -0.5 * D * kLogTwoPi + 0.5 * post.expected_log_det();
    out.col(static_cast<Eigen::Index>(k)).array() +=
        constant - 0.5 * projected.rowwise().squaredNorm().array();
  }
}

void GaussianFamily::accumulate_dense(const Data& data, std::size_t begin, std::size_t end,
                                      const RowMatrix& resp, std::span<Stat> stats) {
  const auto n = static_cast<Eigen::Index>(end - begin);
  const auto block = data.x.middleRows(static_cast<Eigen::Index>(begin), n);
  Matrix weighted(n, data.dim());
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto col = resp.col(static_cast<Eigen::Index>(k));
    weighted.noalias() = col.array().sqrt().matrix().asDiagonal() * block;
    stats[k].s.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
    symmetrize_from_lower(stats[k].s);
    stats[k].n += col.sum();
  }
}

void GaussianFamily::accumulate_sparse(const Data& data, std::size_t begin, std::size_t end,
                                       int width, std::span<const double> values,
                                       std::span<const int> indices, std::span<Stat> stats) {
  const std::size_t n = end - begin;
  const std::size_t K = stats.size();
  const int D = data.dim();
  // Counting sort of (observation, value) pairs by cluster.
  std::vector<std::size_t> offsets(K + 1, 0);
  for (std::size_t e = 0; e < n * width; ++e) {
    if (values[e] > 0.0) ++offsets[static_cast<std::size_t>(indices[e]) + 1];
  }
  for (std::size_t k = 0; k < K; ++k) offsets[k + 1] += offsets[k];
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<Eigen::Index> rows(offsets[K]);
  std::vector<double> weights(offsets[K]);
  for (std::size_t i = 0; i < n; ++i) {
    for (int l = 0; l < width; ++l) {
      const std::size_t e = i * width + l;
      if (!(values[e] > 0.0)) continue;
      const std::size_t slot = cursor[static_cast<std::size_t>(indices[e])]++;
      rows[slot] = static_cast<Eigen::Index>(begin + i);
      weights[slot] = values[e];
    }
  }
  Matrix weighted;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t count = offsets[k + 1] - offsets[k];
    if (count == 0) continue;
    weighted.resize(static_cast<Eigen::Index>(count), D);
    double mass = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t slot = offsets[k] + j;
      weighted.row(static_cast<Eigen::Index>(j)) = std::sqrt(weights[slot]) * data.x.row(rows[slot]);
      mass += weights[slot];
    }
    stats[k].s.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
    symmetrize_from_lower(stats[k].s);
    stats[k].n += mass;
  }
}

// ------------------------------------------------------------- Categorical

DirichletPosterior::DirichletPosterior(std::vector<double> lambda) : lambda_(std::move(lambda)) {
  total_ = 0.0;
  for (double v : lambda_) {
    if (!(v > 0.0)) {
      throw DomainError("DirichletPosterior: parameters must be positive, got " +
                        std::to_string(v));
    }
    total_ += v;
  }
  expected_log_.resize(lambda_.size());
  const double psi_total = lambda_.empty() ? 0.0 : digamma(total_);
  for (std::size_t v = 0; v < lambda_.size(); ++v) {
    expected_log_[v] = digamma(lambda_[v]) - psi_total;
  }
  cumulant_ = c_dir(lambda_);
}

std::vector<double> DirichletPosterior::mean() const {
  std::vector<double> out(lambda_.size());
  for (std::size_t v = 0; v < lambda_.size(); ++v) out[v] = lambda_[v] / total_;
  return out;
}

CategoricalStat CategoricalStat::zero(int vocab_size) {
  return CategoricalStat{0.0, std::vector<double>(static_cast<std::size_t>(vocab_size), 0.0)};
}

CategoricalStat& CategoricalStat::operator+=(const CategoricalStat& o) {
  n += o.n;
  for (std::size_t v = 0; v < s.size(); ++v) s[v] += o.s[v];
  return *this;
}

CategoricalStat& CategoricalStat::operator-=(const CategoricalStat& o) {
  n -= o.n;
  for (std::size_t v = 0; v < s.size(); ++v) s[v] -= o.s[v];
  return *this;
}

CategoricalStat CategoricalStat::scaled(double factor) const {
  CategoricalStat out{n * factor, s};
  for (double& v : out.s) v *= factor;
  return out;
}

double categorical_expected_log_lik(int v, const DirichletPosterior& post) {
  if (v < 0 || v >= post.size()) {
    throw ArgumentError("categorical_expected_log_lik: word id " + std::to_string(v) +
                        " outside [0, " + std::to_string(post.size()) + ")");
  }
  return post.expected_log()[static_cast<std::size_t>(v)];
}

DirichletPosterior categorical_global_update(std::span<const double> word_counts,
                                             double lambda_bar) {
  if (!(lambda_bar > 0.0)) throw DomainError("categorical_global_update: lambda_bar must be > 0");
  std::vector<double> lambda(word_counts.size());
  for (std::size_t v = 0; v < lambda.size(); ++v) {
    // Statistics built by subtraction can carry tiny negative round-off.
    lambda[v] = lambda_bar + std::max(word_counts[v], 0.0);
  }
  return DirichletPosterior(std::move(lambda));
}

DirichletPosterior categorical_global_update(const CategoricalStat& stat, double lambda_bar) {
  return categorical_global_update(stat.s, lambda_bar);
}

double l_data_categorical(std::span<const CategoricalStat> stats, double lambda_bar,
                          std::span<const DirichletPosterior> posts) {
  if (stats.size() != posts.size()) {
    throw ArgumentError("l_data_categorical: stats and posteriors differ in length");
  }
  if (stats.empty()) return 0.0;
  const int V = posts.front().size();
  const double prior_cumulant = c_dir_symmetric(lambda_bar, V);
  double total = 0.0;
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& post = posts[k];
    total += prior_cumulant - post.cumulant();
    const auto& lam = post.lambda();
    const auto& elog = post.expected_log();
    double residual = 0.0;
    for (std::size_t v = 0; v < lam.size(); ++v) {
      residual += (stats[k].s[v] + lambda_bar - lam[v]) * elog[v];
    }
    total += residual;
  }
  return total;
}

DirichletPosterior CategoricalFamily::blend(const Posterior& current, const Posterior& target,
                                            double rho) {
  std::vector<double> lambda(current.lambda().size());
  for (std::size_t v = 0; v < lambda.size(); ++v) {
    lambda[v] = (1.0 - rho) * current.lambda()[v] + rho * target.lambda()[v];
  }
  return DirichletPosterior(std::move(lambda));
}

void CategoricalFamily::log_lik_block(const Data& data, std::size_t begin, std::size_t end,
                                      std::span<const Posterior> posts, RowMatrix& out) {
  for (std::size_t i = begin; i < end; ++i) {
    const int v = data.tokens[i];
    for (std::size_t k = 0; k < posts.size(); ++k) {
      out(static_cast<Eigen::Index>(i - begin), static_cast<Eigen::Index>(k)) +=
          categorical_expected_log_lik(v, posts[k]);
    }
  }
}

void CategoricalFamily::accumulate_dense(const Data& data, std::size_t begin, std::size_t end,
                                         const RowMatrix& resp, std::span<Stat> stats) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto v = static_cast<std::size_t>(data.tokens[i]);
    for (std::size_t k = 0; k < stats.size(); ++k) {
      const double r = resp(static_cast<Eigen::Index>(i - begin), static_cast<Eigen::Index>(k));
      stats[k].s[v] += r;
      stats[k].n += r;
    }
  }
}

void CategoricalFamily::accumulate_sparse(const Data& data, std::size_t begin, std::size_t end,
                                          int width, std::span<const double> values,
                                          std::span<const int> indices, std::span<Stat> stats) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto v = static_cast<std::size_t>(data.tokens[i]);
    for (int l = 0; l < width; ++l) {
      const std::size_t e = (i - begin) * width + l;
      auto& stat = stats[static_cast<std::size_t>(indices[e])];
      stat.s[v] += values[e];
      stat.n += values[e];
    }
  }
}

}  // namespace sparsevi
