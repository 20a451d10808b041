#include "bnpr/tridiag.hpp"

#include <cmath>

namespace bnpr {

Vector tridiag_solve(const Vector& sub, const Vector& diag, const Vector& sup,
                     const Vector& rhs) {
  const Index n = diag.size();
  if (sub.size() != n - 1 || sup.size() != n - 1 || rhs.size() != n) {
    throw InvalidInput("tridiag_solve: inconsistent lengths");
  }
  Vector c(n - 1), x(n);
  double piv = diag[0];
  if (piv == 0.0 || !std::isfinite(piv)) throw NumericError("tridiag_solve: zero pivot");
  c[0] = sup[0] / piv;
  x[0] = rhs[0] / piv;
  for (Index i = 1; i < n; ++i) {
    piv = diag[i] - sub[i - 1] * c[i - 1];
    if (piv == 0.0 || !std::isfinite(piv)) throw NumericError("tridiag_solve: zero pivot");
    if (i < n - 1) c[i] = sup[i] / piv;
    x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / piv;
  }
  for (Index i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  return x;
}

void SymTridiagLDLT::compute(const Vector& diag, const Vector& off) {
  const Index n = diag.size();
  if (off.size() != n - 1) throw InvalidInput("SymTridiagLDLT: inconsistent lengths");
  d_.resize(n);
  l_.resize(n - 1);
  double piv = diag[0];
  if (piv <= 0.0 || !std::isfinite(piv)) {
    throw NumericError("SymTridiagLDLT: matrix not positive definite");
  }
  d_[0] = piv;
  for (Index i = 1; i < n; ++i) {
    l_[i - 1] = off[i - 1] / d_[i - 1];
    piv = diag[i] - l_[i - 1] * off[i - 1];
    if (piv <= 0.0 || !std::isfinite(piv)) {
      throw NumericError("SymTridiagLDLT: matrix not positive definite");
    }
    d_[i] = piv;
  }
}

Vector SymTridiagLDLT::solve(const Vector& rhs) const {
  const Index n = d_.size();
  if (rhs.size() != n) throw InvalidInput("SymTridiagLDLT::solve: length mismatch");
  Vector x = rhs;
  for (Index i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
  x.array() /= d_.array();
  for (Index i = n - 2; i >= 0; --i) x[i] -= l_[i] * x[i + 1];
  return x;
}

double SymTridiagLDLT::log_det() const { return d_.array().log().sum(); }

Vector SymTridiagLDLT::inverse_diagonal() const {
  const Index n = d_.size();
  Vector z(n);
  z[n - 1] = 1.0 / d_[n - 1];
  for (Index i = n - 2; i >= 0; --i) {
    z[i] = 1.0 / d_[i] + l_[i] * l_[i] * z[i + 1];
  }
  return z;
}

}  // namespace bnpr
