#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace recov {

// Discretized ambient space: a node set with quadrature weights and one of
// the supported norms.  SUP is the uniform norm over nodes (weights only
// influence integral functionals, never the norm); LP(p) and HILBERT are the
// weighted p-norms used as discrete surrogates of L_p / L_2.
enum class NormKind { Sup, Lp, Hilbert };

class Space {
public:
  // Closed uniform grid on [a,b] (endpoints included, trapezoid weights).
  static std::shared_ptr<const Space> uniform_closed(double a, double b, int n, NormKind k, double p = 2.0);
  // Periodic uniform grid: nodes a + i*(b-a)/n, constant weights (b-a)/n.
  static std::shared_ptr<const Space> uniform_periodic(double a, double b, int n, NormKind k, double p = 2.0);
  // Midpoint grid: nodes a + (i+1/2)h, weights h.  Dyadic cell layouts use this.
  static std::shared_ptr<const Space> uniform_midpoint(double a, double b, int n, NormKind k, double p = 2.0);
  // Abstract index set {0,...,n-1} with unit weights (sequence spaces).
  static std::shared_ptr<const Space> sequence(int n, NormKind k, double p = 2.0);
  // Fully explicit construction.
  static std::shared_ptr<const Space> custom(Vector nodes, Vector weights, NormKind k, double p = 2.0);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Vector& nodes() const { return nodes_; }
  const Vector& weights() const { return weights_; }
  NormKind kind() const { return kind_; }
  double p() const { return p_; }
  bool periodic() const { return periodic_; }
  double domain_a() const { return a_; }
  double domain_b() const { return b_; }

  double norm(const Vector& values) const;

  // Dual norm of a functional given by its coefficient row (the functional
  // acts as row . values).  This is the exact dual of norm() above.
  double dual_norm(const Vector& row) const;

  // Hilbert inner product <x,y> = sum w_i x_i y_i (HILBERT spaces only).
  double inner(const Vector& x, const Vector& y) const;

private:
  Space(Vector nodes, Vector weights, NormKind k, double p, bool periodic, double a, double b);

  Vector nodes_, weights_;
  NormKind kind_;
  double p_;
  bool periodic_;
  double a_, b_;
};

using SpacePtr = std::shared_ptr<const Space>;

// A vector of node values tied to its space.
struct Element {
  SpacePtr space;
  Vector values;

  double norm() const { return space->norm(values); }
};

// Finite-dimensional subspace given by a basis of node-value columns.
// Construction verifies the columns are independent (relative tol 1e-10).
class Subspace {
public:
  Subspace(SpacePtr space, Matrix basis);

  const SpacePtr& space() const { return space_; }
  const Matrix& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.cols()); }

  Vector combine(const Vector& coeffs) const { return basis_ * coeffs; }

  // Basis orthonormalized in the weighted Hilbert inner product (computed
  // once; valid for HILBERT spaces, used internally for projections).
  const Matrix& orthonormal_basis() const { return ortho_; }

private:
  SpacePtr space_;
  Matrix basis_;
  Matrix ortho_;
};

// Result of a best-approximation computation: the distance, the minimizing
// coefficients, and how the value was certified.
struct DistanceResult {
  double value = 0.0;
  Vector coeffs;       // argmin coefficients in the subspace basis
  Vector best;         // basis * coeffs
  std::string method;  // "lp-dual", "projection", "irls", ...
  int iterations = 0;
  bool converged = true;
};

// Distance from x to V in the ambient norm.  SUP and LP(1) are solved by
// linear programming (exact vertex solutions), HILBERT by orthogonal
// projection, LP(p) by damped IRLS (tol 1e-9, max 500 iterations).
DistanceResult dist_to_subspace(const Vector& x, const Subspace& V);

// Subspace presets.
//   trig(n):   1, cos t, sin t, ..., cos nt, sin nt        (dim 2n+1)
//   poly(n):   Chebyshev basis mapped to the domain        (dim n+1)
//   coordinate(idx): unit vectors e_i for i in idx
Subspace make_trig_subspace(const SpacePtr& s, int degree);
Subspace make_poly_subspace(const SpacePtr& s, int degree);
Subspace make_coordinate_subspace(const SpacePtr& s, const std::vector<int>& idx);

}  // namespace recov
