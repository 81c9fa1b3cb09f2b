#pragma once

#include "core/common.hpp"

namespace recov {

// min 1/2 x.Qx + q.x  s.t.  A x <= b,  E x = f,  from a feasible start.
// Primal active-set method for small dense problems; Q must be positive
// definite on the null space of each working set encountered (true for the
// ridge-regularized or identity-Hessian problems this toolkit builds).
struct QpResult {
  Vector x;
  int iterations = 0;
  bool converged = true;
};

QpResult solve_qp(const Matrix& Q, const Vector& q,
                  const Matrix& A, const Vector& b,
                  const Matrix& E, const Vector& f,
                  const Vector& x0, int max_iter = 500);

}  // namespace recov
