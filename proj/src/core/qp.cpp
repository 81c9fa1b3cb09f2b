#include "core/qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace recov {

QpResult solve_qp(const Matrix& Q, const Vector& q,
                  const Matrix& A, const Vector& b,
                  const Matrix& E, const Vector& f,
                  const Vector& x0, int max_iter) {
  const int n = static_cast<int>(x0.size());
  const int mi = static_cast<int>(A.rows());
  const int me = static_cast<int>(E.rows());
  require(Q.rows() == n && Q.cols() == n, "solve_qp: Q shape");
  require(mi == 0 || A.cols() == n, "solve_qp: A shape");
  require(me == 0 || E.cols() == n, "solve_qp: E shape");

  QpResult res;
  res.x = x0;
  constexpr double kTol = 1e-10;

  // working set of active inequalities (equalities are always active)
  std::vector<int> work;
  for (int i = 0; i < mi; ++i)
    if (std::abs(A.row(i).dot(res.x) - b[i]) < kTol) work.push_back(i);

  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    const int mw = static_cast<int>(work.size());
    const int dim = n + mw + me;

    Matrix K = Matrix::Zero(dim, dim);
    K.topLeftCorner(n, n) = Q;
    for (int k = 0; k < mw; ++k) {
      K.block(n + k, 0, 1, n) = A.row(work[k]);
      K.block(0, n + k, n, 1) = A.row(work[k]).transpose();
    }
    if (me > 0) {
      K.block(n + mw, 0, me, n) = E;
      K.block(0, n + mw, n, me) = E.transpose();
    }
    Vector rhs = Vector::Zero(dim);
    rhs.head(n) = -(Q * res.x + q);
    if (me > 0) rhs.segment(n + mw, me) = f - E * res.x;

    Eigen::FullPivLU<Matrix> lu(K);
    if (!lu.isInvertible()) {
      // redundant active row: drop the most recently added one
      if (work.empty()) { res.converged = false; return res; }
      work.pop_back();
      continue;
    }
    Vector sol = lu.solve(rhs);
    Vector d = sol.head(n);

    if (d.norm() <= kTol * (1.0 + res.x.norm())) {
      // stationary on the working set; check inequality multipliers
      int drop = -1;
      double most_neg = -1e-9;
      for (int k = 0; k < mw; ++k) {
        const double lam = sol[n + k];
        if (lam < most_neg) { most_neg = lam; drop = k; }
      }
      if (drop < 0) return res;  // KKT satisfied
      work.erase(work.begin() + drop);
      continue;
    }

    // step length to the nearest blocking inequality
    double alpha = 1.0;
    int block = -1;
    for (int i = 0; i < mi; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double ad = A.row(i).dot(d);
      if (ad > kTol) {
        const double room = (b[i] - A.row(i).dot(res.x)) / ad;
        if (room < alpha - 1e-14) { alpha = std::max(room, 0.0); block = i; }
      }
    }
    res.x += alpha * d;
    if (block >= 0) work.push_back(block);
  }
  res.converged = false;
  return res;
}

}  // namespace recov
