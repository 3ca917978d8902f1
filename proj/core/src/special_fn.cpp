#include "sparsevi/special_fn.hpp"

#include <array>
#include <cmath>
#include <string>

#include "sparsevi/errors.hpp"

namespace sparsevi {
namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

// Stirling series correction terms B_{2n} / (2n (2n - 1)) for ln Gamma.
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,   1.0 / 1260.0,      -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,   -3617.0 / 122400.0};

// Asymptotic digamma coefficients B_{2n} / (2n).
constexpr std::array<double, 8> kDigammaSeries = {
    1.0 / 12.0,   -1.0 / 120.0,        1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0,  -691.0 / 32760.0,    1.0 / 12.0,  -3617.0 / 8160.0};

double lanczos_log_gamma(double a) {
  const double x = a - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    sum += kLanczos[i] / (x + static_cast<double>(i));
  }
  const double t = x + kLanczosG + 0.5;
  return kHalfLogTwoPi + (x + 0.5) * std::log(t) - t + std::log(sum);
}

double stirling_log_gamma(double a) {
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double c : kStirling) {
    series += c * power;
    power *= inv2;
  }
  return (a - 0.5) * std::log(a) - a + kHalfLogTwoPi + series;
}

}  // namespace

double digamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("digamma: argument must be positive and finite, got " +
                      std::to_string(a));
  }
  // Small corrections are summed before the dominant -1/a so that tiny
  // arguments keep full absolute accuracy.
  double shift = 0.0;
  double x = a;
  if (x < 6.0) {
    x += 1.0;
    while (x < 6.0) {
      shift -= 1.0 / x;
      x += 1.0;
    }
  }
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  double power = inv2;
  for (double c : kDigammaSeries) {
    series += c * power;
    power *= inv2;
  }
  double result = std::log(x) - 0.5 / x - series;
  result += shift;
  if (a < 6.0) result -= 1.0 / a;
  return result;
}

double log_gamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(a));
  }
  if (a >= 10.0) return stirling_log_gamma(a);
  if (a < 0.5) return lanczos_log_gamma(a + 1.0) - std::log(a);
  return lanczos_log_gamma(a);
}

double log_multivariate_gamma(double a, int dim) {
  if (dim < 1) throw DomainError("log_multivariate_gamma: dimension must be >= 1");
  if (!(a > 0.5 * (dim - 1))) {
    throw DomainError("log_multivariate_gamma: need a > (D - 1) / 2, got a = " +
                      std::to_string(a) + ", D = " + std::to_string(dim));
  }
  double total = 0.25 * dim * (dim - 1) * kLogPi;
  for (int d = 1; d <= dim; ++d) total += log_gamma(a + 0.5 * (1 - d));
  return total;
}

double c_dir(std::span<const double> a) {
  double sum = 0.0;
  double sum_log_gamma = 0.0;
  for (double v : a) {
    if (!(v > 0.0)) {
      throw DomainError("c_dir: entries must be positive, got " + std::to_string(v));
    }
    sum += v;
    sum_log_gamma += log_gamma(v);
  }
  if (a.empty()) return 0.0;
  return log_gamma(sum) - sum_log_gamma;
}

double c_dir_symmetric(double a, int n) {
  if (!(a > 0.0)) throw DomainError("c_dir_symmetric: parameter must be positive");
  if (n < 1) return 0.0;
  return log_gamma(a * n) - n * log_gamma(a);
}

Eigen::LLT<Matrix> cholesky(const Matrix& m) {
  if (m.rows() != m.cols()) throw NotSpdError("cholesky: matrix is not square");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotSpdError("cholesky: matrix is not symmetric positive definite");
  }
  const auto diag = llt.matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) {
      throw NotSpdError("cholesky: matrix is not symmetric positive definite");
    }
  }
  return llt;
}

double log_det_from_cholesky(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double log_det_spd(const Matrix& m) { return log_det_from_cholesky(cholesky(m)); }

double c_wish_from_log_det(double nu, int dim, double log_det_inverse_scale) {
  if (!(nu > dim - 1)) {
    throw DomainError("c_wish: need nu > D - 1, got nu = " + std::to_string(nu) +
                      ", D = " + std::to_string(dim));
  }
  return -0.5 * nu * dim * kLogTwo - log_multivariate_gamma(0.5 * nu, dim) +
         0.5 * nu * log_det_inverse_scale;
}

double c_wish(double nu, const Matrix& scale) {
  const int dim = static_cast<int>(scale.rows());
  if (!(nu > dim - 1)) {
    throw DomainError("c_wish: need nu > D - 1");
  }
  // ln|Lambda^{-1}| = -ln|Lambda|
  return c_wish_from_log_det(nu, dim, -log_det_spd(scale));
}

double c_wish_from_inverse_scale(double nu, const Matrix& inverse_scale) {
  const int dim = static_cast<int>(inverse_scale.rows());
  if (!(nu > dim - 1)) {
    throw DomainError("c_wish: need nu > D - 1");
  }
  return c_wish_from_log_det(nu, dim, log_det_spd(inverse_scale));
}

}  // namespace sparsevi
