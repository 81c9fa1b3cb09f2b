#pragma once

#include <string>
#include <vector>

#include "core/common.hpp"

namespace recov {

enum class Relation { Le, Eq, Ge };

// min objective . x   subject to   A x (rel) rhs,  lower <= x <= upper.
// Bounds may be +-inf.  Rows are genuine constraints; simple bounds should
// go in lower/upper (the solver's work per iteration scales with row count).
struct LinearProgram {
  Vector objective;
  Matrix A;
  std::vector<Relation> relations;
  Vector rhs;
  Vector lower, upper;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  // Convenience: all-free or all-nonnegative variable blocks.
  static LinearProgram make(int vars, int rows);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct SolveReport {
  LpStatus status = LpStatus::Optimal;
  Vector solution;        // primal values for the original variables
  double objective = 0.0;
  Vector duals;           // one multiplier per constraint row
  int iterations = 0;
  // Certificates evaluated on the returned point:
  double primal_residual = 0.0;  // max constraint/bound violation
  double duality_gap = 0.0;      // |primal obj - dual obj| (Optimal only)
  std::string note;
};

// Deterministic two-phase revised simplex on bounded variables.  Pivot
// selection is Dantzig with least-index tie-breaks, switching to Bland's
// least-index rule after a run of degenerate pivots, so cycling terminates.
SolveReport solve_lp(const LinearProgram& lp);

// max direction . x  over  {x : G x <= h}.  Solved through the dual program
// (rows = dim x), which keeps the simplex basis small when G has many rows.
// status Unbounded means the polytope is unbounded in this direction;
// Infeasible means the polytope is empty.
struct SupportResult {
  LpStatus status = LpStatus::Optimal;
  double value = 0.0;
  Vector argmax;
};
SupportResult maximize_over_polytope(const Vector& direction, const Matrix& G, const Vector& h);

}  // namespace recov
