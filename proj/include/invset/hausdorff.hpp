#pragma once

#include "invset/core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace invset {

/// Squared Euclidean distance between column `i` of `x` and column `j` of `y`.
/// Sequential summation, so the value does not depend on vectorization.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar squared_distance(const Eigen::MatrixBase<DerivedX>& x, Eigen::Index i,
                                           const Eigen::MatrixBase<DerivedY>& y, Eigen::Index j) {
  using Scalar = typename DerivedX::Scalar;
  Scalar acc(0);
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    const Scalar d = x(k, i) - y(k, j);
    acc += d * d;
  }
  return acc;
}

/// Distance from a single point (column vector) to the nearest column of `y`.
template <typename DerivedP, typename DerivedY>
typename DerivedY::Scalar point_to_set(const Eigen::MatrixBase<DerivedP>& point,
                                       const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedY::Scalar;
  if (y.cols() == 0) throw DomainError("distance to an empty point set");
  if (point.rows() != y.rows()) throw StructuralError("point and set dimensions differ");
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const Scalar d = squared_distance(point, 0, y, j);
    if (d < best) best = d;
  }
  using std::sqrt;
  return sqrt(best);
}

/// max_{x in X} min_{y in Y} |x - y| over the columns of `x` and `y`.
///
/// The inner scan stops as soon as it finds a point closer than the running
/// maximum, which cannot change the result.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar directed_hausdorff(const Eigen::MatrixBase<DerivedX>& x,
                                             const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.cols() == 0 || y.cols() == 0) throw DomainError("Hausdorff distance of an empty set");
  if (x.rows() != y.rows()) throw StructuralError("point sets have different dimensions");
  Scalar worst(0);
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      const Scalar d = squared_distance(x, i, y, j);
      if (d < best) {
        best = d;
        if (best <= worst) break;
      }
    }
    if (best > worst) worst = best;
  }
  using std::sqrt;
  return sqrt(worst);
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar hausdorff(const Eigen::MatrixBase<DerivedX>& x,
                                    const Eigen::MatrixBase<DerivedY>& y) {
  const auto forward = directed_hausdorff(x, y);
  const auto backward = directed_hausdorff(y, x);
  return forward > backward ? forward : backward;
}

}  // namespace invset
