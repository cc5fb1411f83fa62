#pragma once

#include <Eigen/Core>

#include "dsf/common.hpp"

namespace dsf {

// Row-major storage throughout: every hand-written kernel walks memory in
// row-major ascending order, which is what makes results reproducible.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws std::invalid_argument when a precondition does not hold.
void require(bool condition, const char* what);

/// Throws NumericalError when the matrix contains NaN or Inf.
void require_finite(const DenseMatrix& m, const char* what);

}  // namespace dsf
