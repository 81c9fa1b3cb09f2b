#pragma once

#include "core/measure.hpp"

namespace recov {

// Right inverses of the measurement map: x = lift(w) satisfies M x = w.
// DUAL_BASIS and ORTHONORMAL are linear; MIN_NORM and RIESZ_PRODUCT are
// nonlinear but positively homogeneous.
enum class LiftKind { DualBasis, Orthonormal, MinNorm, RieszProduct };

class Lifting {
public:
  // Linear lifting w -> sum_j w_j psi_j.  Validates M psi_j = e_j to 1e-9.
  static Lifting dual_basis(MeasurementOperator M, Matrix psi);
  // Hilbert minimal-norm linear lifting (representer combination); reduces
  // to sum_j w_j phi_j when the measurement rows are orthonormal.  Norm 1.
  static Lifting orthonormal(MeasurementOperator M);
  // Minimal p-norm element of the data coset (unique for 1 < p < inf).
  static Lifting min_norm(MeasurementOperator M, double p);
  // Product of sign-pattern factors on a dyadic grid; nonnegative on the
  // unit data cube and of norm one.  Needs a Rademacher operator.
  static Lifting riesz_product(MeasurementOperator M);

  LiftKind kind() const { return kind_; }
  const MeasurementOperator& op() const { return M_; }
  double p() const { return p_; }
  bool linear() const { return kind_ == LiftKind::DualBasis || kind_ == LiftKind::Orthonormal; }

  // Documented upper bound on sup ||lift(w)|| / ||w||_M.  Exactly 1 for the
  // minimal-norm constructions; conservative for DUAL_BASIS (sharp only when
  // the psi_j have disjoint supports in a SUP ambient).
  double norm_bound() const { return norm_bound_; }

  Element lift(const Vector& w) const;

private:
  Lifting(MeasurementOperator M, LiftKind k, Matrix psi, double p, double bound);

  MeasurementOperator M_;
  LiftKind kind_;
  Matrix psi_;  // linear kinds: lift(w) = psi_ * w
  double p_;
  double norm_bound_;
};

struct LiftNormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  bool certified = false;  // lower == upper by an exact mechanism
  std::string method;
};

enum class LiftNormMode { ExactVertex, MonteCarlo };

// Operator norm of the lifting over the data-norm unit ball.  EXACT_VERTEX
// enumerates the 2^m sign patterns (halved by symmetry) and requires the
// ball to be a cube with m <= 20; MONTE_CARLO reports the best sampled
// ratio as a lower bound and the construction's norm_bound as the upper.
LiftNormEstimate lifting_norm(const Lifting& lift, LiftNormMode mode, int samples = 2000,
                              uint64_t seed = 0x11f7);

// Minimal p-norm coset element (the value the data norm infimizes) for
// strictly convex ambients: LP(p) with 1 < p < inf, or HILBERT with p = 2.
Element min_norm_coset_element(const MeasurementOperator& M, const Vector& w, double p);

}  // namespace recov
