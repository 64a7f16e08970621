#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace angio {

using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;

/// Assembled sparse operator (column-major, compressed).
using LinearOperator = Eigen::SparseMatrix<double>;

/// Nodal coefficients of a P1 field on a tetrahedral mesh.
using NodalField = Eigen::VectorXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files, invalid geometry, bad configuration values.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Solver breakdown, Newton divergence, singular systems.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace angio
