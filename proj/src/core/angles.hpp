#pragma once

#include "core/measure.hpp"

namespace recov {

// A possibly-infinite angle constant.  Infinite means the subspace meets the
// kernel of the measurements, so worst-case recovery radii blow up.
struct AngleValue {
  double value = 0.0;
  bool infinite = false;
};

// Angle constants of the pair (V, ker M) with certificates.  SUP and HILBERT
// ambients are exact; other L_p values are intervals: value carries the
// certified upper bound, lower the best ratio an ascent search achieved, and
// certificates reproduce the lower end.
struct AngleReport {
  AngleValue mu_v_n;  // sup ||v|| / ||M v||_M over v in V  (norm of the inverse)
  AngleValue mu_n_v;  // sup { ||eta|| : eta in ker M, dist(eta, V) <= 1 }
  double mu_v_n_lower = 0.0, mu_v_n_upper = 0.0;
  double mu_n_v_lower = 0.0, mu_n_v_upper = 0.0;
  bool exact = true;
  std::string method;
  Vector cert_v;    // grid values achieving the reported (or lower) v-ratio
  Vector cert_eta;  // grid values achieving the reported (or lower) kernel ratio
};

AngleReport angle_report(const MeasurementOperator& M, const Subspace& V);
AngleValue mu_V_N(const MeasurementOperator& M, const Subspace& V);
AngleValue mu_N_V(const MeasurementOperator& M, const Subspace& V);

// sup { ||x|| : x in X, dist(x, Y) <= 1 } for an arbitrary subspace pair
// (SUP ambient by exact LP sweep, HILBERT by principal angles).
AngleValue mu_subspaces(const Subspace& X, const Subspace& Y);

// Tight constants alpha = sup ||x||_p / ||x||_2 and beta = sup ||x||_2 /
// ||x||_p over the weighted discrete space; used to transfer exact Hilbert
// angle values into certified L_p upper bounds.
struct NormEquiv {
  double alpha = 1.0;
  double beta = 1.0;
};
NormEquiv norm_equiv_constants(const Space& s);

// A priori Chebyshev-radius bounds for the data-consistent model set
// { x : M x = w, dist(x, V) <= eps } (or its worst case over w when w is
// absent).  Consistent data pins the radius to eps * mu_n_v exactly.
struct RadiusBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool infinite = false;
  bool exact = false;  // lower == upper by an exact mechanism
  bool empty = false;  // no x matches the data within eps
};
RadiusBounds radius_bounds(const MeasurementOperator& M, const Subspace& V, double eps,
                           const Vector* w = nullptr);

}  // namespace recov
