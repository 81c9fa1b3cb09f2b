#include "core/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "core/qp.hpp"

namespace recov {

Vector least_squares(const Matrix& A, const Vector& b) {
  return A.colPivHouseholderQr().solve(b);
}

Vector least_norm(const Matrix& A, const Vector& b) {
  // QR of A^T: A^T P = Q R, so A x = b becomes R1^T (Q^T x)_head = P^T b and
  // the minimum-norm solution zeroes the remaining Q^T x components.
  const int m = static_cast<int>(A.rows());
  const int N = static_cast<int>(A.cols());
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  require(qr.rank() == m, "least_norm: rows are dependent");
  Matrix R1 = qr.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  Vector u = Vector::Zero(N);
  u.head(m) = R1.transpose().triangularView<Eigen::Lower>().solve(
      qr.colsPermutation().transpose() * b);
  return qr.householderQ() * u;
}

FitResult minimax_fit(const Vector& x, const Matrix& B) {
  const int N = static_cast<int>(x.size());
  const int n = static_cast<int>(B.cols());
  require(B.rows() == N, "minimax_fit: shape mismatch");

  // dual program: max x.(u - v)  s.t.  B^T (u - v) = 0, sum(u + v) = 1, u,v >= 0.
  // The multipliers of its rows recover (-c, -t) of the primal fit.
  LinearProgram d = LinearProgram::make(2 * N, n + 1);
  for (int i = 0; i < N; ++i) {
    d.objective[i] = -x[i];
    d.objective[N + i] = x[i];
    d.A.block(0, i, n, 1) = B.row(i).transpose();
    d.A.block(0, N + i, n, 1) = -B.row(i).transpose();
    d.A(n, i) = 1.0;
    d.A(n, N + i) = 1.0;
  }
  d.rhs[n] = 1.0;
  d.lower = Vector::Zero(2 * N);

  SolveReport r = solve_lp(d);
  require(r.status == LpStatus::Optimal, "minimax_fit: dual solve failed");
  FitResult out;
  out.value = -r.objective;
  out.coeffs = -r.duals.head(n);
  out.iterations = r.iterations;

  // Least-norm tie-break among coefficient vectors achieving the optimum;
  // keeps the fit single-valued where the minimax solution is not unique.
  if (n > 0) {
    const double slack = out.value + 1e-9 * (1.0 + std::abs(out.value));
    Matrix A(2 * N, n);
    Vector b(2 * N);
    A.topRows(N) = B;
    A.bottomRows(N) = -B;
    b.head(N) = x.array() + slack;
    b.tail(N) = slack - x.array();
    QpResult q = solve_qp(2.0 * Matrix::Identity(n, n), Vector::Zero(n), A, b,
                          Matrix(0, n), Vector(0), out.coeffs);
    if (q.converged) out.coeffs = q.x;
  }
  return out;
}

FitResult weighted_l1_fit(const Vector& x, const Matrix& B, const Vector& w) {
  const int N = static_cast<int>(x.size());
  const int n = static_cast<int>(B.cols());
  require(B.rows() == N && w.size() == N, "weighted_l1_fit: shape mismatch");

  // variables: [c (free) | r+ | r-], rows: B c + r+ - r- = x
  LinearProgram lp = LinearProgram::make(n + 2 * N, N);
  lp.A.leftCols(n) = B;
  lp.A.block(0, n, N, N) = Matrix::Identity(N, N);
  lp.A.block(0, n + N, N, N) = -Matrix::Identity(N, N);
  lp.rhs = x;
  for (int i = 0; i < N; ++i) {
    lp.objective[n + i] = w[i];
    lp.objective[n + N + i] = w[i];
    lp.lower[n + i] = 0.0;
    lp.lower[n + N + i] = 0.0;
  }
  SolveReport r = solve_lp(lp);
  require(r.status == LpStatus::Optimal, "weighted_l1_fit: solve failed");
  FitResult out;
  out.value = r.objective;
  out.coeffs = r.solution.head(n);
  out.iterations = r.iterations;
  return out;
}

namespace {

double pnorm_value(const Vector& r, const Vector& w, double p) {
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i) s += w[i] * std::pow(std::abs(r[i]), p);
  return std::pow(s, 1.0 / p);
}

// shared IRLS loop: minimize sum w_i |x0_i - (B z)_i|^p over z.  The
// reweighted least-squares displacement equals (p-1) times the Newton step
// of the smooth objective, so rescaling it by 1/(p-1) gives quadratic local
// convergence; a backtracking fallback keeps global progress.
FitResult irls(const Vector& x0, const Matrix& B, const Vector& w, double p) {
  constexpr int kMaxIter = 500;
  const int N = static_cast<int>(x0.size());
  const int n = static_cast<int>(B.cols());

  FitResult out;
  // weighted least-squares start
  Vector sw = w.array().sqrt();
  Vector z = least_squares(sw.asDiagonal() * B, sw.cwiseProduct(x0));
  Vector r = x0 - B * z;
  double val = pnorm_value(r, w, p);
  const double scale = r.cwiseAbs().maxCoeff() + 1e-30;

  for (int it = 0; it < kMaxIter; ++it) {
    out.iterations = it + 1;
    const double floor_eps = 1e-12 * scale;
    Vector theta(N);
    for (int i = 0; i < N; ++i)
      theta[i] = w[i] * std::pow(std::max(std::abs(r[i]), floor_eps), p - 2.0);
    Vector st = theta.array().sqrt();
    Vector z_ls = least_squares(st.asDiagonal() * B, st.cwiseProduct(x0));
    Vector d = z_ls - z;

    // Newton-scaled step first, halving until the true objective drops
    double step = 1.0 / (p - 1.0);
    Vector z_try = z;
    double val_try = val;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      z_try = z + step * d;
      val_try = pnorm_value(x0 - B * z_try, w, p);
      if (val_try <= val * (1.0 + 1e-15) + 1e-300) { accepted = true; break; }
      step *= 0.5;
    }
    if (!accepted) break;  // no further progress representable
    const double move = (step * d).cwiseAbs().maxCoeff();
    z = z_try;
    r = x0 - B * z;
    val = val_try;
    if (move <= 1e-12 * (1.0 + z.cwiseAbs().maxCoeff()) && it >= 1) break;
  }

  // first-order residual certificate: grad of sum w |r|^p over coefficients
  Vector g = Vector::Zero(n);
  for (int i = 0; i < N; ++i)
    g -= B.row(i).transpose() *
         (w[i] * p * std::pow(std::abs(r[i]) + 1e-300, p - 1.0) * (r[i] >= 0 ? 1.0 : -1.0));
  out.converged = g.cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + val) * (1.0 + B.cwiseAbs().maxCoeff());
  out.value = val;
  out.coeffs = z;
  return out;
}

}  // namespace

FitResult pnorm_fit(const Vector& x, const Matrix& B, const Vector& w, double p) {
  require(p > 1.0 && std::isfinite(p), "pnorm_fit: requires 1 < p < inf");
  require(B.rows() == x.size() && w.size() == x.size(), "pnorm_fit: shape mismatch");
  return irls(x, B, w, p);
}

FitResult pnorm_min_coset(const Matrix& M, const Vector& rhs, const Vector& w, double p) {
  require(p > 1.0 && std::isfinite(p), "pnorm_min_coset: requires 1 < p < inf");
  const int N = static_cast<int>(M.cols());
  const int m = static_cast<int>(M.rows());
  Eigen::ColPivHouseholderQR<Matrix> qr(M.transpose());
  require(qr.rank() == m, "pnorm_min_coset: rows are dependent");
  Vector x_part = least_norm(M, rhs);
  Matrix Q = qr.householderQ();
  Matrix nullb = Q.rightCols(N - m);  // orthonormal basis of ker M

  // minimize over z the p-norm of x_part - nullb * (-z)  ==  x_part + nullb z
  FitResult fit = irls(x_part, -nullb, w, p);
  FitResult out;
  out.value = fit.value;
  out.coeffs = x_part + nullb * fit.coeffs;  // the coset element itself
  out.iterations = fit.iterations;
  out.converged = fit.converged;
  return out;
}

}  // namespace recov
