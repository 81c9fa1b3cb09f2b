#include "core/approx.hpp"

#include <utility>

#include "core/solvers.hpp"

namespace recov {

namespace {

// What the data norm of a residual vector reduces to.  These are exactly the
// cases the data-norm module certifies in closed form; everything else goes
// through the ambient-space coset solve.
enum class DataProfile { Linf, Lp, Gram, None };

DataProfile data_profile(const MeasurementOperator& M) {
  const NormKind kind = M.space()->kind();
  if (kind == NormKind::Hilbert) return DataProfile::Gram;
  if (kind == NormKind::Sup &&
      (M.kind() == MeasureKind::PointEval || M.kind() == MeasureKind::DisjointAvg))
    return DataProfile::Linf;
  if (kind == NormKind::Lp && M.space()->p() == 1.0 && M.kind() == MeasureKind::Rademacher)
    return DataProfile::Linf;
  if (kind == NormKind::Lp && M.kind() == MeasureKind::DisjointAvg) return DataProfile::Lp;
  return DataProfile::None;
}

}  // namespace

ApproxMap::ApproxMap(MeasurementOperator M, Subspace V, ApproxMethod method, double p)
    : M_(std::move(M)), V_(std::move(V)), method_(method), p_(p) {
  require(M_.space() == V_.space(), "measurements and subspace live on different spaces");
  MV_ = M_.rows() * V_.basis();
  if (MV_.cols() > MV_.rows())
    throw StructuralError("more subspace dimensions than measurements: V meets the kernel");
  Eigen::JacobiSVD<Matrix> svd(MV_);
  const Vector& sv = svd.singularValues();
  if (sv[sv.size() - 1] <= kRankTol * sv[0])
    throw StructuralError("subspace meets the measurement kernel: fit is not well posed");
  cond_ = sv[0] / sv[sv.size() - 1];

  const NormKind kind = M_.space()->kind();
  switch (method_) {
    case ApproxMethod::MinimaxLp:
      require(kind == NormKind::Sup || data_profile(M_) == DataProfile::Linf,
              "MINIMAX_LP requires a uniform-norm data space");
      lambda_ = 1.0;
      break;
    case ApproxMethod::LeastSquares:
      require(kind == NormKind::Hilbert, "LEAST_SQUARES requires a Hilbert ambient space");
      lambda_ = 1.0;
      break;
    case ApproxMethod::Pnorm:
      require(kind == NormKind::Lp, "PNORM requires an L_p ambient space");
      require(p_ == M_.space()->p(), "PNORM exponent must match the ambient exponent");
      lambda_ = (p_ > 1.0) ? 1.0 + 1e-6 : 1.0;
      break;
  }
}

ApproxResult ApproxMap::solve(const Vector& w) const {
  require(static_cast<int>(w.size()) == M_.count(), "data length mismatch");
  ApproxResult out;
  out.condition_warning = cond_ > 1e8;

  // Consistent data: the interpolating coefficients are the unique answer
  // and the fit must reproduce w itself.
  Vector c_fit = least_squares(MV_, w);
  if ((MV_ * c_fit - w).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + w.cwiseAbs().maxCoeff())) {
    out.coeffs = c_fit;
    out.z = MV_ * c_fit;
    out.residual = m_norm(M_, w - out.z);
    out.method = "interpolation";
    return out;
  }

  const DataProfile profile = data_profile(M_);
  switch (method_) {
    case ApproxMethod::MinimaxLp:
      if (profile == DataProfile::Linf) {
        FitResult f = minimax_fit(w, MV_);
        out.coeffs = f.coeffs;
        out.iterations = f.iterations;
        out.converged = f.converged;
        out.method = "data-minimax-lp";
      }
      break;
    case ApproxMethod::LeastSquares: {
      // The data norm is Euclidean after whitening by the inverse Cholesky
      // factor of the row Gram matrix (rows divided by root weights).
      Vector sw = M_.space()->weights().array().sqrt();
      Matrix whitened_rows = M_.rows() * sw.cwiseInverse().asDiagonal();
      Eigen::LLT<Matrix> llt(Matrix(whitened_rows * whitened_rows.transpose()));
      Matrix B = llt.matrixL().solve(MV_);
      Vector y = llt.matrixL().solve(w);
      out.coeffs = least_squares(B, y);
      out.method = "gram-least-squares";
      break;
    }
    case ApproxMethod::Pnorm:
      if (profile == DataProfile::Lp) {
        FitResult f = (p_ == 1.0) ? weighted_l1_fit(w, MV_, Vector::Ones(M_.count()))
                                  : pnorm_fit(w, MV_, Vector::Ones(M_.count()), p_);
        out.coeffs = f.coeffs;
        out.iterations = f.iterations;
        out.converged = f.converged;
        out.method = (p_ == 1.0) ? "data-l1-lp" : "data-irls";
      }
      break;
  }

  if (out.method.empty()) {
    // No closed data-norm form: lift the data to any interpolant and find
    // its best approximation from V + ker(M) in the ambient norm.  The
    // V-block of the minimizing coefficients is the fit.
    Vector y0 = least_norm(M_.rows(), w);
    const int n = V_.dim();
    const Matrix& K = M_.nullspace_basis();
    Matrix big(y0.size(), n + K.cols());
    big << V_.basis(), K;
    DistanceResult d = dist_to_subspace(y0, Subspace(M_.space(), big));
    out.coeffs = d.coeffs.head(n);
    out.iterations = d.iterations;
    out.converged = d.converged;
    out.method = "ambient-coset-" + d.method;
  }

  out.z = MV_ * out.coeffs;
  out.residual = m_norm(M_, w - out.z);
  return out;
}

ApproxResult ApproxMap::approximate(const Vector& w) const { return solve(w); }

double ApproxMap::error_E(const Vector& w) const { return solve(w).residual; }

}  // namespace recov
