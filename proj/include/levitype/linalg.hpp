#pragma once

// Dense exact linear algebra over Q.

#include <vector>

#include "levitype/rational.hpp"

namespace levitype {

using RMatrix = std::vector<RVector>;  // row-major

struct AffineSolution {
  bool consistent = false;
  int rank = 0;
  RVector particular;             // valid when consistent
  std::vector<RVector> nullspace;  // basis of the homogeneous solutions
};

/// Solves A x = b by Gauss-Jordan elimination.
/// `num_cols` is needed when A has no rows.
AffineSolution solve_affine(const RMatrix& A, const RVector& b, int num_cols);

int rank(const RMatrix& A);

/// Coefficients c_0..c_n of det(t I - A), monic (c_n = 1).
RVector characteristic_polynomial(const RMatrix& A);

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/// Inertia of a real symmetric matrix from the signs of its characteristic
/// polynomial. All roots are real, so Descartes' rule counts exactly.
Inertia symmetric_inertia(const RMatrix& A);

}  // namespace levitype
