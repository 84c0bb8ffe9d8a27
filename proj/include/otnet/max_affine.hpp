#pragma once

#include "otnet/types.hpp"

namespace otnet {

/// phi(x) = max_j (x . slopes_j + offsets_j).
template <typename Scalar>
struct MaxAffine {
  PointsX<Scalar> slopes;  // n x d
  VectorX<Scalar> offsets; // n

  Index size() const { return slopes.rows(); }
  Index dim() const { return slopes.cols(); }

  /// Index of the active piece; the smallest index wins ties.
  template <typename Derived>
  Index argmax(const Eigen::MatrixBase<Derived>& x) const {
    Index best = 0;
    Scalar best_value = slopes.row(0).dot(x.derived().transpose().template cast<Scalar>()) + offsets(0);
    for (Index j = 1; j < size(); ++j) {
      const Scalar v = slopes.row(j).dot(x.derived().transpose().template cast<Scalar>()) + offsets(j);
      if (v > best_value) {
        best_value = v;
        best = j;
      }
    }
    return best;
  }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& x) const {
    return ((slopes * x.derived().template cast<Scalar>()) + offsets).maxCoeff();
  }
};

/// (Sub)gradient of the max-affine potential: the slope of the active piece.
/// This is the transport map T(x) = grad phi(x).
template <typename Scalar, typename Derived>
VectorX<Scalar> gradient(const MaxAffine<Scalar>& phi, const Eigen::MatrixBase<Derived>& x) {
  if (phi.size() == 0) throw ValidationError("gradient: empty coefficient list");
  if (x.size() != phi.dim()) throw ValidationError("gradient: dimension mismatch");
  return phi.slopes.row(phi.argmax(x)).transpose();
}

}  // namespace otnet
