#pragma once

#include "core/measure.hpp"

namespace recov {

// How the data-space fit is computed.  MINIMAX_LP is the uniform-norm method
// (LP, exact vertex solution), LEAST_SQUARES the Hilbert method (normal
// equations in the interpolation metric), PNORM the L_p method (IRLS for
// p > 1, LP for p = 1).
enum class ApproxMethod { MinimaxLp, LeastSquares, Pnorm };

struct ApproxResult {
  Vector z;                // best approximation to w from Z = M(V)
  Vector coeffs;           // c with z = M(V c)
  double residual = 0.0;   // ||w - z|| in the data norm
  int iterations = 0;
  bool converged = true;
  bool condition_warning = false;  // M restricted to V is nearly singular
  std::string method;
};

// Near-best approximation onto Z = M(V) under the data norm.  The map is
// exact (constant 1) for the LP and least-squares methods and exact up to
// the IRLS tolerance for PNORM with p > 1.
class ApproxMap {
public:
  // Validates that the method matches the ambient norm and that V meets the
  // kernel of M only at zero (otherwise the fit is not well posed).
  ApproxMap(MeasurementOperator M, Subspace V, ApproxMethod method, double p = 2.0);

  const MeasurementOperator& op() const { return M_; }
  const Subspace& subspace() const { return V_; }
  ApproxMethod method() const { return method_; }
  double p() const { return p_; }

  // Near-best constant: 1 for exact methods, 1 + tolerance for IRLS.
  double lambda() const { return lambda_; }

  // Image of the subspace basis under the measurements (m x dim V).
  const Matrix& image() const { return MV_; }

  // Condition number of the measurement matrix restricted to V.
  double condition() const { return cond_; }

  ApproxResult approximate(const Vector& w) const;

  // Best (constant-1) approximation error E(w) = dist(w, Z) in the data
  // norm, computed by the exact method for the ambient kind.
  double error_E(const Vector& w) const;

private:
  ApproxResult solve(const Vector& w) const;

  MeasurementOperator M_;
  Subspace V_;
  ApproxMethod method_;
  double p_;
  double lambda_;
  Matrix MV_;
  double cond_;
};

}  // namespace recov
