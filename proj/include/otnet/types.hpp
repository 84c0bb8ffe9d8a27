#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace otnet {

using Index = Eigen::Index;

/// Row-major point cloud: one point per row.
template <typename Scalar>
using PointsX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using PointSet = PointsX<double>;
using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Inputs that break a type or operation contract.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The dual ascent hit max_iters before the validation gradient met grad_tol.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace otnet
