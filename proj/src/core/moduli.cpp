#include "core/moduli.hpp"

#include <algorithm>
#include <cmath>

#include "core/recover.hpp"
#include "core/solvers.hpp"

namespace recov {

namespace {

// Leading-term coefficients of the p-norm moduli.  The two branches agree
// at p = 2, where both reduce to the Euclidean leading terms e^2/8 and
// tau^2/2.
double lp_delta_coeff(double p) {
  return p < 2.0 ? (p - 1.0) / 8.0 : 1.0 / (p * std::pow(2.0, p));
}
double lp_delta_power(double p) { return p < 2.0 ? 2.0 : p; }
double lp_rho_coeff(double p) { return p <= 2.0 ? 1.0 / p : (p - 1.0) / 2.0; }
double lp_rho_power(double p) { return p <= 2.0 ? p : 2.0; }

// Quadratic description of a Hilbert data slice in kernel coordinates:
// members are x0 + K z with (z - zc)' H (z - zc) <= rho^2, and the ambient
// metric restricted to the kernel is MK.  phi is the least model distance
// over the data fiber, so rho^2 = eps^2 - phi^2.
struct SliceGeometry {
  Vector x0;
  Matrix K;
  Matrix MK;
  Matrix H;
  Eigen::LDLT<Matrix> H_solver;
  Vector zc;
  double rho = 0.0;
  double phi = 0.0;

  Vector point(const Vector& z) const { return x0 + K * z; }
};

SliceGeometry slice_geometry(const RecoveryProblem& P, const Vector& w) {
  const SpacePtr& s = P.space();
  require(s->kind() == NormKind::Hilbert,
          "slice geometry needs a Hilbert ambient; other norms have no quadratic slice form");
  require(P.epsilon() > 0.0, "slice geometry: the model accuracy must be positive");
  require(w.size() == P.op().count(), "slice geometry: data vector length mismatch");

  SliceGeometry G;
  G.x0 = least_norm(P.op().rows(), w);
  G.K = P.op().nullspace_basis();

  const int n = s->size();
  const Matrix& Bo = P.subspace().orthonormal_basis();
  Vector root_w = s->weights().array().sqrt();
  Matrix Qm = root_w.asDiagonal() *
              (Matrix::Identity(n, n) - Bo * (Bo.transpose() * s->weights().asDiagonal()));
  Matrix A = Qm * G.K;
  Vector q0 = Qm * G.x0;
  G.MK = G.K.transpose() * s->weights().asDiagonal() * G.K;
  G.H = A.transpose() * A;

  const double eps = P.epsilon();
  if (G.H.cols() == 0) {  // measurements pin the fiber to a single point
    G.zc = Vector::Zero(0);
    G.phi = q0.norm();
    require(G.phi <= eps * (1.0 + 1e-9) + 1e-12,
            "slice geometry: data out of class, the slice is empty");
    G.phi = std::min(G.phi, eps);
    return G;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(G.H);
  require(eig.eigenvalues().minCoeff() >
              1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()),
          "slice geometry: the measurement kernel meets the model subspace; "
          "the slice is unbounded");
  G.H_solver.compute(G.H);
  G.zc = -G.H_solver.solve(A.transpose() * q0);
  G.phi = (q0 + A * G.zc).norm();
  const double rho2 = eps * eps - G.phi * G.phi;
  // Same tolerance band the slice builder uses when it declares data
  // reachable, so borderline inputs never produce contradictory answers.
  require(rho2 >= -3e-9 * (1.0 + eps * eps),
          "slice geometry: data out of class, the slice is empty");
  G.rho = std::sqrt(std::max(0.0, rho2));
  G.phi = std::min(G.phi, eps);
  return G;
}

}  // namespace

ModulusPair ModulusPair::hilbert_exact() {
  return ModulusPair(ModulusKind::HilbertExact, 2.0);
}

ModulusPair ModulusPair::lp_asymptotic(double p) {
  require(p > 1.0 && std::isfinite(p),
          "lp_asymptotic: the moduli pair needs 1 < p < inf");
  return ModulusPair(ModulusKind::LpAsymptotic, p);
}

double ModulusPair::delta(double eps) const {
  require(eps >= 0.0 && eps <= 2.0, "delta: argument outside [0, 2]");
  if (kind_ == ModulusKind::HilbertExact) {
    // 1 - sqrt(1 - e^2/4), written to stay accurate near e = 2.
    return 1.0 - std::sqrt((1.0 - 0.5 * eps) * (1.0 + 0.5 * eps));
  }
  return lp_delta_coeff(p_) * std::pow(eps, lp_delta_power(p_));
}

double ModulusPair::rho(double tau) const {
  require(tau >= 0.0, "rho: argument must be nonnegative");
  if (kind_ == ModulusKind::HilbertExact)
    return std::sqrt(1.0 + tau * tau) - 1.0;
  return lp_rho_coeff(p_) * std::pow(tau, lp_rho_power(p_));
}

double ModulusPair::delta_inv(double t) const {
  const double top = delta(2.0);
  require(t >= 0.0 && t <= top * (1.0 + 1e-12),
          "delta_inv: argument outside [0, delta(2)]");
  t = std::min(t, top);
  if (kind_ == ModulusKind::HilbertExact)
    return 2.0 * std::sqrt(t * (2.0 - t));
  return std::pow(t / lp_delta_coeff(p_), 1.0 / lp_delta_power(p_));
}

double ModulusPair::rho_inv(double s) const {
  require(s >= 0.0, "rho_inv: argument must be nonnegative");
  if (kind_ == ModulusKind::HilbertExact) return std::sqrt(s * (s + 2.0));
  return std::pow(s / lp_rho_coeff(p_), 1.0 / lp_rho_power(p_));
}

double modulus_value(const ModulusPair& m, ModulusWhich which, double t) {
  return which == ModulusWhich::Delta ? m.delta(t) : m.rho(t);
}

GammaResult gamma_of_Kw(const RecoveryProblem& P, const Vector& w) {
  require(P.epsilon() > 0.0, "gamma_of_Kw: the model accuracy must be positive");
  require(w.size() == P.op().count(), "gamma_of_Kw: data vector length mismatch");
  GammaResult out;
  out.misfit = default_approx_map(P).error_E(w);
  out.gamma = out.misfit / P.epsilon();
  out.out_of_class = out.gamma > 1.0 + 1e-9;
  if (!out.out_of_class) out.gamma = std::min(out.gamma, 1.0);
  return out;
}

SliceDiameter hilbert_slice_diameter(const RecoveryProblem& P, const Vector& w) {
  SliceGeometry G = slice_geometry(P, w);
  SliceDiameter out;
  out.gamma = G.phi / P.epsilon();
  if (G.H.cols() == 0 || G.rho <= 0.0) {
    out.x = out.y = G.point(G.zc);
    return out;
  }
  // Widest chord of the ellipsoid image: pair the ambient metric on the
  // kernel against the constraint metric and take the top generalized
  // eigenvector (normalized so v' H v = 1, hence zc +- rho v is feasible).
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(G.MK, G.H);
  require(ges.info() == Eigen::Success,
          "hilbert_slice_diameter: generalized eigensolve failed");
  Vector v = ges.eigenvectors().col(G.MK.cols() - 1);
  out.x = G.point(G.zc + G.rho * v);
  out.y = G.point(G.zc - G.rho * v);
  out.value = P.space()->norm(out.x - out.y);
  return out;
}

AscentDiameter ascent_diameter(const RecoveryProblem& P, const Vector& w,
                               int restarts, uint64_t seed) {
  require(restarts >= 1, "ascent_diameter: needs at least one restart");
  SliceGeometry G = slice_geometry(P, w);
  AscentDiameter out;
  out.restarts = restarts;
  const int kd = static_cast<int>(G.H.cols());
  if (kd == 0 || G.rho <= 0.0) {
    out.x = out.y = G.point(G.zc);
    return out;
  }

  // Alternating support steps: given a chord direction, move both ends to
  // the boundary points extremal for it, then re-read the direction from
  // the new chord.  Each step is a support computation, so the chord length
  // never decreases and the best value is a certified lower bound.
  Rng rng(seed);
  double best = -1.0;
  Vector best_d;
  for (int r = 0; r < restarts; ++r) {
    Vector c = rng.normal_vector(kd);
    double val = 0.0;
    Vector d = Vector::Zero(kd);
    for (int it = 0; it < 200; ++it) {
      Vector hc = G.H_solver.solve(c);
      const double quad = c.dot(hc);
      if (!(quad > 0.0)) break;
      d = (G.rho / std::sqrt(quad)) * hc;
      const double cur = 2.0 * std::sqrt(std::max(0.0, d.dot(G.MK * d)));
      ++out.iterations;
      c = G.MK * d;
      if (cur <= val + 1e-13 * std::max(1.0, val)) {
        val = std::max(val, cur);
        break;
      }
      val = cur;
    }
    if (val > best) {
      best = val;
      best_d = d;
    }
  }
  out.x = G.point(G.zc + best_d);
  out.y = G.point(G.zc - best_d);
  out.value = P.space()->norm(out.x - out.y);
  return out;
}

SandwichRow diameter_sandwich_check(const RecoveryProblem& P, const Vector& w,
                                    const DiameterResult& oracle_diam) {
  const SpacePtr& s = P.space();
  const bool hilbert = s->kind() == NormKind::Hilbert;
  const bool lp = s->kind() == NormKind::Lp && s->p() > 1.0;
  require(hilbert || lp,
          "diameter_sandwich_check: the two-sided bound needs a strictly convex "
          "ambient (Hilbert, or p-norm with p > 1)");

  GammaResult g = gamma_of_Kw(P, w);
  require(!g.out_of_class,
          "diameter_sandwich_check: data out of class, the slice is empty");
  const AngleReport& ang = P.angles();
  require(!ang.mu_n_v.infinite,
          "diameter_sandwich_check: the kernel angle constant is infinite");

  ModulusPair mod =
      hilbert ? ModulusPair::hilbert_exact() : ModulusPair::lp_asymptotic(s->p());
  const double eps = P.epsilon();
  const double gamma = g.gamma;
  const double mu_up = ang.mu_n_v.value;   // certified upper value
  const double mu_lo = ang.mu_n_v_lower;   // achieved lower value

  SandwichRow row;
  row.gamma = gamma;
  row.mu = mu_up;
  row.regime = mod.asymptotic() ? "asymptotic" : "exact";
  row.oracle = oracle_diam.value;
  row.oracle_exact = oracle_diam.exact;

  // Convexity upper bound; once 1 - gamma exceeds delta(2) it saturates at
  // the trivial two-ball-radii width.
  const double arg = 1.0 - gamma;
  row.upper = arg >= mod.delta(2.0) ? 2.0 * eps * mu_up
                                    : eps * mu_up * mod.delta_inv(arg);

  // Smoothness (chord) lower bound, never below the general-norm bound
  // eps (1 - gamma) mu; the chord form has a removable 0/0 at gamma = 0.
  const double base = eps * arg * mu_lo;
  double chord = base;
  if (gamma > 1e-9)
    chord = 2.0 * eps * mu_lo * gamma * mod.rho_inv(arg / (2.0 * gamma));
  row.lower = std::max(base, chord);

  // Everything in the row scales like eps * mu, so the slack does too;
  // otherwise a fully saturated slice (upper = 0, oracle = rounding noise)
  // would fail on numerical dust.
  const double slack = 1e-6 * std::max({1.0, eps * mu_up, row.upper});
  bool ok = row.oracle <= row.upper + slack && row.lower <= row.upper + slack;
  if (row.oracle_exact) ok = ok && row.oracle >= row.lower - slack;
  row.pass = ok;
  return row;
}

}  // namespace recov
