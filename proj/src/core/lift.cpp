#include "core/lift.hpp"

#include <cmath>
#include <utility>

#include "core/solvers.hpp"

namespace recov {

namespace {

// Columns with pairwise disjoint nonzero patterns let the sup norm of a
// combination split into a max over the columns.
bool disjoint_columns(const Matrix& psi) {
  for (int i = 0; i < psi.rows(); ++i) {
    int used = 0;
    for (int j = 0; j < psi.cols(); ++j)
      if (psi(i, j) != 0.0) ++used;
    if (used > 1) return false;
  }
  return true;
}

}  // namespace

Lifting::Lifting(MeasurementOperator M, LiftKind k, Matrix psi, double p, double bound)
    : M_(std::move(M)), kind_(k), psi_(std::move(psi)), p_(p), norm_bound_(bound) {}

Lifting Lifting::dual_basis(MeasurementOperator M, Matrix psi) {
  require(psi.rows() == M.space()->size() && psi.cols() == M.count(),
          "dual basis must have one ambient column per measurement");
  Matrix gram = M.rows() * psi;
  require((gram - Matrix::Identity(M.count(), M.count())).cwiseAbs().maxCoeff() <= 1e-9,
          "dual basis does not biorthogonal-match the measurements");

  // |w_j| <= ||l_j||_* ||w||_M bounds each coefficient, so the triangle
  // inequality gives sum_j ||psi_j|| ||l_j||_*; with disjoint supports in a
  // SUP ambient the sum collapses to a max.
  double bound = 0.0;
  const bool sup_disjoint =
      M.space()->kind() == NormKind::Sup && disjoint_columns(psi);
  for (int j = 0; j < psi.cols(); ++j) {
    const double term =
        M.space()->norm(psi.col(j)) * M.space()->dual_norm(M.rows().row(j).transpose());
    bound = sup_disjoint ? std::max(bound, term) : bound + term;
  }
  return Lifting(std::move(M), LiftKind::DualBasis, std::move(psi), 2.0, bound);
}

Lifting Lifting::orthonormal(MeasurementOperator M) {
  require(M.space()->kind() == NormKind::Hilbert,
          "orthonormal lifting needs a Hilbert ambient space");
  // Minimal-norm right inverse: x = W^{-1/2} A^T (A A^T)^{-1} w with
  // A the root-weight-whitened rows.  ||x|| = ||w||_M, so the norm is 1.
  Vector sw = M.space()->weights().array().sqrt();
  Matrix Aw = M.rows() * sw.cwiseInverse().asDiagonal();
  Matrix G = Aw * Aw.transpose();
  Matrix psi = sw.cwiseInverse().asDiagonal() * Aw.transpose() * G.llt().solve(
                   Matrix::Identity(M.count(), M.count()));
  return Lifting(std::move(M), LiftKind::Orthonormal, std::move(psi), 2.0, 1.0);
}

Lifting Lifting::min_norm(MeasurementOperator M, double p) {
  const NormKind nk = M.space()->kind();
  require((nk == NormKind::Lp && p > 1.0 && p == M.space()->p() && std::isfinite(p)) ||
              (nk == NormKind::Hilbert && p == 2.0),
          "minimal-norm lifting needs a strictly convex ambient matching p");
  return Lifting(std::move(M), LiftKind::MinNorm, Matrix(), p, 1.0);
}

Lifting Lifting::riesz_product(MeasurementOperator M) {
  require(M.kind() == MeasureKind::Rademacher,
          "product lifting needs sign-pattern average measurements");
  require(M.space()->kind() == NormKind::Lp && M.space()->p() == 1.0,
          "product lifting is an L1 construction");
  return Lifting(std::move(M), LiftKind::RieszProduct, Matrix(), 1.0, 1.0);
}

Element Lifting::lift(const Vector& w) const {
  require(static_cast<int>(w.size()) == M_.count(), "lift: data length mismatch");
  switch (kind_) {
    case LiftKind::DualBasis:
    case LiftKind::Orthonormal:
      return Element{M_.space(), psi_ * w};
    case LiftKind::MinNorm: {
      if (M_.space()->kind() == NormKind::Hilbert)
        return Element{M_.space(), m_norm_detail(M_, w).minimizer};
      FitResult f = pnorm_min_coset(M_.rows(), w, M_.space()->weights(), p_);
      return Element{M_.space(), f.coeffs};
    }
    case LiftKind::RieszProduct:
      return Element{M_.space(), riesz_product_values(M_, w)};
  }
  throw StructuralError("lift: unreachable kind");
}

LiftNormEstimate lifting_norm(const Lifting& lift, LiftNormMode mode, int samples,
                              uint64_t seed) {
  const MeasurementOperator& M = lift.op();
  const int m = M.count();
  LiftNormEstimate out;

  if (mode == LiftNormMode::ExactVertex) {
    require(m_norm_ball_is_cube(M),
            "vertex enumeration needs a cube data ball (point evaluations, "
            "disjoint averages, or sign-pattern averages)");
    if (m > 20) throw StructuralError("vertex enumeration is limited to 20 measurements");
    // The ball is [-1,1]^m; for a linear (or homogeneous norm-one) lifting
    // the supremum over the ball is attained at a vertex.  The +-w symmetry
    // halves the enumeration: pin the first sign to +1.
    Vector w(m);
    double best = 0.0;
    const uint64_t patterns = uint64_t{1} << (m - 1);
    for (uint64_t bits = 0; bits < patterns; ++bits) {
      w[0] = 1.0;
      for (int j = 1; j < m; ++j) w[j] = (bits >> (j - 1)) & 1 ? -1.0 : 1.0;
      best = std::max(best, lift.lift(w).norm());
    }
    out.lower = out.upper = best;
    out.certified = true;
    out.method = "exact-vertex";
    return out;
  }

  // Sampled lower bound: signed coordinate probes plus random directions,
  // each scaled to the data-norm unit sphere.
  Rng rng(seed);
  double best = 0.0;
  auto probe = [&](const Vector& w) {
    const double wn = m_norm(M, w);
    if (wn > 1e-12) best = std::max(best, lift.lift(w).norm() / wn);
  };
  for (int j = 0; j < m; ++j) probe(Vector::Unit(m, j));
  for (int k = 0; k < samples; ++k) probe(rng.normal_vector(m));
  out.lower = best;
  out.upper = lift.norm_bound();
  out.certified = false;
  out.method = "monte-carlo";
  return out;
}

Element min_norm_coset_element(const MeasurementOperator& M, const Vector& w, double p) {
  return Lifting::min_norm(M, p).lift(w);
}

}  // namespace recov
