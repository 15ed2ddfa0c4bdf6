#pragma once

namespace afw3d {

/// Largest polynomial order r̃ the polynomial-space machinery supports.
inline constexpr int kMaxOrder = 9;

/// Default cap on r̃ accepted by the command-line front end.
inline constexpr int kDefaultOrderCap = 4;

/// Largest quadrature exactness degree, 2 * kMaxOrder + 6.
inline constexpr int kMaxQuadratureDegree = 2 * kMaxOrder + 6;

/// Quadrature degree used when sampling non-polynomial fields on an element.
inline constexpr int kFieldQuadratureDegree = 14;

/// Numerical tolerances shared by all modules.
struct Tolerances {
  double lu_pivot = 1e-13;          // relative pivot floor for dense LU
  double rank = 1e-10;              // relative singular value cutoff
  double antisymmetry = 1e-12;      // vec_of_antisym input check
  double eig_residual = 1e-8;       // generalized eigen residual
  int eig_max_iterations = 500;
  double degenerate_volume = 1e-14; // |T| <= tol * h^3 is degenerate
  double conformity = 1e-10;        // interface trace mismatch
  double solve_residual = 1e-9;     // relative residual after saddle solve
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace afw3d
