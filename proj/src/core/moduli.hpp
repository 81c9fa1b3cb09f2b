#pragma once

#include <string>

#include "core/chebgeo.hpp"

namespace recov {

enum class ModulusKind { HilbertExact, LpAsymptotic };
enum class ModulusWhich { Delta, Rho };

// Convexity/smoothness moduli of the ambient norm.  The Hilbert pair is
// exact (parallelogram identity); the L_p pair carries only the leading
// asymptotic term and is tagged as such — downstream checks that use it
// must stay in the small-argument regime.
class ModulusPair {
public:
  static ModulusPair hilbert_exact();
  static ModulusPair lp_asymptotic(double p);  // 1 < p < inf

  ModulusKind kind() const { return kind_; }
  double p() const { return p_; }
  bool asymptotic() const { return kind_ == ModulusKind::LpAsymptotic; }

  // delta: [0,2] -> [0, delta(2)], nondecreasing, delta(0) = 0.
  double delta(double eps) const;
  // rho: [0,inf) -> [0,inf), convex nondecreasing, rho(0) = 0.
  double rho(double tau) const;

  // Exact closed-form inverses; f(f_inv(y)) = y on the stated ranges.
  // delta_inv accepts [0, delta(2)], rho_inv accepts [0, inf).
  double delta_inv(double t) const;
  double rho_inv(double s) const;

private:
  ModulusPair(ModulusKind k, double p) : kind_(k), p_(p) {}
  ModulusKind kind_;
  double p_;
};

double modulus_value(const ModulusPair& m, ModulusWhich which, double t);

// Relative model misfit of the data slice: gamma = E(w)/eps with E the best
// achievable data misfit over the model set (computed by the exact ambient
// method).  gamma > 1 means no model element matches the data within eps;
// the slice is empty and the result carries the out-of-class tag.
struct GammaResult {
  double gamma = 0.0;
  double misfit = 0.0;  // E(w) itself
  bool out_of_class = false;
};
GammaResult gamma_of_Kw(const RecoveryProblem& P, const Vector& w);

// Exact diameter of the Hilbert data slice by a generalized eigensolve on
// the kernel-coordinate ellipsoid, with the achieving pair as certificate.
struct SliceDiameter {
  double value = 0.0;
  Vector x, y;  // members of the slice realizing the value
  double gamma = 0.0;
};
SliceDiameter hilbert_slice_diameter(const RecoveryProblem& P, const Vector& w);

// Random-restart alternating-support ascent on ||x - y|| over the Hilbert
// data slice.  Monotone, so the best pair is a certified lower bound on the
// diameter regardless of convergence.
struct AscentDiameter {
  double value = 0.0;
  Vector x, y;
  int restarts = 0;
  int iterations = 0;  // total support steps taken
};
AscentDiameter ascent_diameter(const RecoveryProblem& P, const Vector& w, int restarts = 256,
                               uint64_t seed = 0xa5ce);

// Two-sided diameter check for strictly convex ambients: the measured slice
// diameter must sit between the smoothness lower bound and the convexity
// upper bound.  A non-exact oracle (itself only a lower bound) degrades the
// lower comparison to bound consistency.  Uniform ambients are rejected:
// the argument needs single-valued best approximations.
struct SandwichRow {
  double gamma = 0.0;
  double mu = 0.0;     // certified upper value of the kernel angle constant
  double lower = 0.0;  // smoothness bound (>= the general (1-gamma) bound)
  double oracle = 0.0;
  double upper = 0.0;  // convexity bound
  bool pass = false;
  bool oracle_exact = false;
  std::string regime;  // "exact" (Hilbert) or "asymptotic" (L_p)
};
SandwichRow diameter_sandwich_check(const RecoveryProblem& P, const Vector& w,
                                    const DiameterResult& oracle_diam);

}  // namespace recov
