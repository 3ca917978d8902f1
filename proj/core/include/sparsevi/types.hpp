#pragma once

#include <Eigen/Dense>

namespace sparsevi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Marker for "no sparsity constraint" wherever an L value is accepted.
inline constexpr int kDense = 0;

}  // namespace sparsevi
