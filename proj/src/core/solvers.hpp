#pragma once

#include "core/simplex.hpp"

namespace recov {

// min ||A x - b||_2 (dense, rank-revealing).
Vector least_squares(const Matrix& A, const Vector& b);

// min ||x||_2  s.t.  A x = b  (A must have full row rank).
Vector least_norm(const Matrix& A, const Vector& b);

struct FitResult {
  double value = 0.0;   // achieved norm of the residual
  Vector coeffs;        // minimizing coefficients
  int iterations = 0;
  bool converged = true;
};

// min_c max_i |x_i - (B c)_i|.  Solved through the dual program (basis size
// dim(c)+1 regardless of how many grid rows there are); the optimal c is
// read off the dual multipliers, then polished by a least-norm tie-break.
FitResult minimax_fit(const Vector& x, const Matrix& B);

// min_c sum_i w_i |x_i - (B c)_i|  (weighted ell_1 fit by LP).
FitResult weighted_l1_fit(const Vector& x, const Matrix& B, const Vector& w);

// min_c (sum_i w_i |x_i - (B c)_i|^p)^(1/p), 1 < p < inf, by damped IRLS
// (relative tolerance 1e-9, at most 500 sweeps).
FitResult pnorm_fit(const Vector& x, const Matrix& B, const Vector& w, double p);

// min (sum_i w_i |x_i|^p)^(1/p)  s.t.  M x = rhs, same IRLS core on the
// null-space parametrization x = x_part + N z.
FitResult pnorm_min_coset(const Matrix& M, const Vector& rhs, const Vector& w, double p);

}  // namespace recov
