#pragma once

// Scalar and matrix special functions used by every expectation and ELBO
// term: digamma, log-gamma, the multivariate log-gamma, and the log
// cumulants of the Dirichlet and Wishart families.
//
// All functions are pure and thread-safe. Domain violations throw
// DomainError; failed Cholesky factorizations throw NotSpdError.

#include <span>

#include <Eigen/Cholesky>

#include "sparsevi/types.hpp"

namespace sparsevi {

inline constexpr double kLogTwoPi = 1.8378770664093454836;
inline constexpr double kLogPi = 1.1447298858494001741;
inline constexpr double kLogTwo = 0.69314718055994530942;

/// psi(a) for a > 0. Shifts the argument up to 6 with the recurrence
/// psi(a) = psi(a + 1) - 1/a, then applies an 8-term asymptotic series.
double digamma(double a);

/// ln Gamma(a) for a > 0.
double log_gamma(double a);

/// ln Gamma_D(a) = D(D-1)/4 ln(pi) + sum_{d=1..D} ln Gamma(a + (1 - d)/2).
double log_multivariate_gamma(double a, int dim);

/// Dirichlet log cumulant: ln Gamma(sum a) - sum ln Gamma(a_k).
double c_dir(std::span<const double> a);

/// c_dir of a symmetric parameter vector [a, ..., a] of length n.
double c_dir_symmetric(double a, int n);

/// Cholesky factor of an SPD matrix. Throws NotSpdError on failure.
Eigen::LLT<Matrix> cholesky(const Matrix& m);

/// ln|M| from the diagonal of a computed Cholesky factor.
double log_det_from_cholesky(const Eigen::LLT<Matrix>& llt);

/// ln|M| for SPD M.
double log_det_spd(const Matrix& m);

/// Wishart log cumulant
///   -(nu D / 2) ln 2 - ln Gamma_D(nu / 2) + (nu / 2) ln|Lambda^{-1}|
/// for scale matrix Lambda. ln|Lambda^{-1}| comes from a Cholesky factor of
/// Lambda.
double c_wish(double nu, const Matrix& scale);

/// Same cumulant, taking the inverse scale Lambda^{-1} directly. This is the
/// form the conjugate update produces, so posteriors use it.
double c_wish_from_inverse_scale(double nu, const Matrix& inverse_scale);

/// Cumulant from a precomputed ln|Lambda^{-1}|.
double c_wish_from_log_det(double nu, int dim, double log_det_inverse_scale);

}  // namespace sparsevi
