#ifndef BNPR_TRIDIAG_HPP
#define BNPR_TRIDIAG_HPP

#include "bnpr/common.hpp"

namespace bnpr {

// Thomas elimination for a general tridiagonal system. sub and sup have
// length n-1. The caller guarantees the matrix is safely factorable
// (symmetric positive definite in all uses here); a vanishing pivot throws.
Vector tridiag_solve(const Vector& sub, const Vector& diag, const Vector& sup,
                     const Vector& rhs);

// LDL^T factorization of a symmetric positive definite tridiagonal matrix
// with main diagonal `diag` and first off-diagonal `off` (length n-1).
// Backs the Newton solves, the log-determinant, and the marginal variances.
class SymTridiagLDLT {
 public:
  SymTridiagLDLT() = default;
  SymTridiagLDLT(const Vector& diag, const Vector& off) { compute(diag, off); }

  void compute(const Vector& diag, const Vector& off);

  Vector solve(const Vector& rhs) const;
  double log_det() const;

  // Diagonal of the inverse via the Takahashi recursion on the factors;
  // exact on the tridiagonal pattern.
  Vector inverse_diagonal() const;

  Index size() const { return d_.size(); }

 private:
  Vector d_;  // pivots
  Vector l_;  // unit-lower-bidiagonal multipliers
};

}  // namespace bnpr

#endif  // BNPR_TRIDIAG_HPP
