#include "core/angles.hpp"

#include <cmath>

#include "core/approx.hpp"
#include "core/solvers.hpp"

namespace recov {

namespace {

// Right singular vector of the smallest singular value of M restricted to V;
// empty when the restriction has full column rank.
Vector kernel_witness(const Matrix& MV) {
  Eigen::JacobiSVD<Matrix> svd(MV, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (MV.cols() <= MV.rows() && sv[sv.size() - 1] > kRankTol * sv[0]) return Vector();
  return svd.matrixV().col(MV.cols() - 1);
}

struct BoundPair {
  double value = 0.0;
  Vector cert;  // coefficients (v-side) or grid values (kernel side)
};

// sup (V c)_i over { (c, x) : M V c = M x, |x_j| <= 1 }, swept over all grid
// coordinates i.  The feasible region is +- symmetric, so one sign per
// coordinate suffices; the sweep is exact for any SUP ambient.
BoundPair sup_mu_v_n(const MeasurementOperator& M, const Subspace& V, bool* unbounded) {
  const int N = M.space()->size(), m = M.count(), n = V.dim();
  LinearProgram base = LinearProgram::make(n + N, m);
  base.A.leftCols(n) = M.rows() * V.basis();
  base.A.rightCols(N) = -M.rows();
  base.lower.tail(N).setConstant(-1.0);
  base.upper.tail(N).setConstant(1.0);
  BoundPair best;
  best.cert = Vector::Zero(n);
  for (int i = 0; i < N; ++i) {
    LinearProgram lp = base;
    lp.objective.head(n) = -V.basis().row(i).transpose();
    SolveReport r = solve_lp(lp);
    if (r.status == LpStatus::Unbounded) {
      *unbounded = true;
      return best;
    }
    require(r.status == LpStatus::Optimal, "angle sweep LP failed");
    if (-r.objective > best.value) {
      best.value = -r.objective;
      best.cert = r.solution.head(n);
    }
  }
  return best;
}

// sup (u + V c)_i over { M u + M V c = 0, |u_j| <= 1 }: u parametrizes the
// gap eta - V c, so eta = u + V c ranges exactly over the kernel elements
// with dist(eta, V) <= 1.  Exact for any SUP ambient, m-row programs only.
BoundPair sup_mu_n_v(const MeasurementOperator& M, const Subspace& V, bool* unbounded) {
  const int N = M.space()->size(), m = M.count(), n = V.dim();
  LinearProgram base = LinearProgram::make(N + n, m);
  base.A.leftCols(N) = M.rows();
  base.A.rightCols(n) = M.rows() * V.basis();
  base.lower.head(N).setConstant(-1.0);
  base.upper.head(N).setConstant(1.0);
  BoundPair best;
  best.cert = Vector::Zero(N);
  for (int i = 0; i < N; ++i) {
    LinearProgram lp = base;
    lp.objective[i] = -1.0;
    lp.objective.tail(n) = -V.basis().row(i).transpose();
    SolveReport r = solve_lp(lp);
    if (r.status == LpStatus::Unbounded) {
      *unbounded = true;
      return best;
    }
    require(r.status == LpStatus::Optimal, "angle sweep LP failed");
    if (-r.objective > best.value) {
      best.value = -r.objective;
      best.cert = r.solution.head(N) + V.basis() * r.solution.tail(n);
    }
  }
  return best;
}

// Smallest eigenvalue (with vector) of the n x n cosine matrix
// T = (Q^T R)(R^T Q), where Q is an orthonormal basis of the whitened V and
// R one of the whitened row space.  Both angle constants equal
// 1/sqrt(lambda_min) in a Hilbert ambient.
struct HilbertAngles {
  double lambda_min = 0.0;
  Vector y;       // eigenvector in V-coefficient space of Q
  Matrix q;       // whitened orthonormal V basis
  Matrix r;       // whitened orthonormal row-space basis
};

HilbertAngles hilbert_cosines(const MeasurementOperator& M, const Subspace& V) {
  Vector sw = M.space()->weights().array().sqrt();
  HilbertAngles h;
  h.q = sw.asDiagonal() * V.orthonormal_basis();
  Matrix At = (M.rows() * sw.cwiseInverse().asDiagonal()).transpose();
  Eigen::HouseholderQR<Matrix> qr(At);
  h.r = qr.householderQ() * Matrix::Identity(At.rows(), At.cols());
  Matrix c = h.q.transpose() * h.r;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c * c.transpose());
  h.lambda_min = eig.eigenvalues()[0];
  h.y = eig.eigenvectors().col(0);
  return h;
}

double ratio_v(const MeasurementOperator& M, const Subspace& V, const Vector& c) {
  Vector v = V.combine(c);
  const double nv = M.space()->norm(v);
  const double mn = m_norm(M, M.apply(v));
  return mn > 1e-14 * (1.0 + nv) ? nv / mn : 0.0;
}

double ratio_eta(const MeasurementOperator& M, const Subspace& V, const Vector& eta) {
  const double ne = M.space()->norm(eta);
  const double d = dist_to_subspace(eta, V).value;
  return d > 1e-14 * (1.0 + ne) ? ne / d : 0.0;
}

// Coordinate-wise hill climb with shrinking step; returns the best ratio
// found.  Only ever used to certify lower ends of L_p intervals.
template <typename Ratio>
double polish(Vector& z, const Ratio& ratio, double step) {
  double best = ratio(z);
  while (step > 1e-5) {
    bool improved = false;
    for (int j = 0; j < z.size(); ++j) {
      for (double sgn : {1.0, -1.0}) {
        Vector trial = z;
        trial[j] += sgn * step;
        const double r = ratio(trial);
        if (r > best * (1.0 + 1e-12)) {
          best = r;
          z = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

NormEquiv norm_equiv_constants(const Space& s) {
  NormEquiv e;
  if (s.kind() == NormKind::Hilbert || (s.kind() == NormKind::Lp && s.p() == 2.0)) return e;
  require(s.kind() == NormKind::Lp, "norm equivalence constants are an L_p notion");
  const double p = s.p();
  const double sumw = s.weights().sum(), minw = s.weights().minCoeff();
  if (p < 2.0) {
    e.alpha = std::pow(sumw, 1.0 / p - 0.5);
    e.beta = std::pow(minw, 0.5 - 1.0 / p);
  } else {
    e.alpha = std::pow(minw, 1.0 / p - 0.5);
    e.beta = std::pow(sumw, 0.5 - 1.0 / p);
  }
  return e;
}

AngleReport angle_report(const MeasurementOperator& M, const Subspace& V) {
  require(M.space() == V.space(), "measurements and subspace live on different spaces");
  AngleReport rep;

  Vector witness = kernel_witness(M.rows() * V.basis());
  if (witness.size() > 0) {
    rep.mu_v_n.infinite = rep.mu_n_v.infinite = true;
    rep.exact = true;
    rep.method = "kernel-witness";
    rep.cert_v = rep.cert_eta = V.combine(witness);
    return rep;
  }

  const NormKind kind = M.space()->kind();
  if (kind == NormKind::Sup) {
    bool unbounded = false;
    BoundPair a = sup_mu_v_n(M, V, &unbounded);
    BoundPair b = sup_mu_n_v(M, V, &unbounded);
    if (unbounded) {
      rep.mu_v_n.infinite = rep.mu_n_v.infinite = true;
      rep.method = "sup-sweep-unbounded";
      return rep;
    }
    rep.mu_v_n.value = rep.mu_v_n_lower = rep.mu_v_n_upper = a.value;
    rep.mu_n_v.value = rep.mu_n_v_lower = rep.mu_n_v_upper = b.value;
    rep.cert_v = V.combine(a.cert);
    rep.cert_eta = b.cert;
    rep.method = "sup-coordinate-lp-sweep";
    return rep;
  }

  if (kind == NormKind::Hilbert) {
    HilbertAngles h = hilbert_cosines(M, V);
    if (h.lambda_min <= 1e-14) {
      rep.mu_v_n.infinite = rep.mu_n_v.infinite = true;
      rep.method = "hilbert-degenerate";
      return rep;
    }
    const double mu = 1.0 / std::sqrt(h.lambda_min);
    rep.mu_v_n.value = rep.mu_v_n_lower = rep.mu_v_n_upper = mu;
    rep.mu_n_v.value = rep.mu_n_v_lower = rep.mu_n_v_upper = mu;
    Vector sw = M.space()->weights().array().sqrt();
    rep.cert_v = sw.cwiseInverse().asDiagonal() * (h.q * h.y);
    Vector q = h.q * h.y;
    Vector etaw = q - h.r * (h.r.transpose() * q);
    rep.cert_eta = sw.cwiseInverse().asDiagonal() * etaw;
    rep.method = "hilbert-principal-angles";
    return rep;
  }

  // L_p interval: exact Hilbert twin values transferred by the tight norm
  // equivalence give the upper ends; probes plus a hill climb give lowers.
  auto twin = Space::custom(M.space()->nodes(), M.space()->weights(), NormKind::Hilbert);
  Subspace Vt(twin, V.basis());
  auto Mt = MeasurementOperator::general(twin, M.rows());
  AngleReport hil = angle_report(Mt, Vt);
  NormEquiv eq = norm_equiv_constants(*M.space());
  const double factor = eq.alpha * eq.beta;
  rep.mu_v_n_upper = factor * hil.mu_v_n.value;
  rep.mu_n_v_upper = factor * hil.mu_n_v.value;
  rep.exact = false;
  rep.method = "lp-interval";

  const int n = V.dim();
  Rng rng(0xA11CE5);
  auto rv = [&](const Vector& c) { return ratio_v(M, V, c); };
  Vector best_c = Vector::Zero(n);
  double best_v = 0.0;
  auto try_v = [&](Vector c) {
    const double r0 = rv(c);
    if (r0 > best_v) {
      best_v = r0;
      best_c = c;
    }
  };
  // start from the Hilbert certificate and coordinate directions
  try_v(least_squares(V.basis(), hil.cert_v));
  for (int j = 0; j < n; ++j) try_v(Vector::Unit(n, j));
  for (int t = 0; t < 8; ++t) try_v(rng.normal_vector(n));
  best_v = polish(best_c, rv, 0.5);
  rep.mu_v_n_lower = best_v;
  rep.cert_v = V.combine(best_c);

  const Matrix& K = M.nullspace_basis();
  auto re_full = [&](const Vector& z) { return ratio_eta(M, V, K * z); };
  Vector best_z = Vector::Zero(K.cols());
  double best_e = 0.0;
  auto try_e = [&](const Vector& z) {
    const double r0 = re_full(z);
    if (r0 > best_e) {
      best_e = r0;
      best_z = z;
    }
  };
  try_e(K.transpose() * hil.cert_eta);  // kernel is shared with the twin
  for (int t = 0; t < 8; ++t) try_e(rng.normal_vector(K.cols()));
  if (K.cols() <= 16) {
    best_e = polish(best_z, re_full, 0.5);
  } else {
    // climb inside a fixed random slice of the kernel coordinates
    Matrix slice(K.cols(), 8);
    for (int i = 0; i < slice.rows(); ++i)
      for (int j = 0; j < 8; ++j) slice(i, j) = rng.normal();
    Vector s0 = Vector::Zero(8);
    auto re_slice = [&](const Vector& s) { return re_full(best_z + slice * s); };
    best_e = polish(s0, re_slice, 0.5);
    best_z += slice * s0;
  }
  rep.mu_n_v_lower = best_e;
  rep.cert_eta = K * best_z;

  rep.mu_v_n.value = rep.mu_v_n_upper;
  rep.mu_n_v.value = rep.mu_n_v_upper;
  return rep;
}

AngleValue mu_V_N(const MeasurementOperator& M, const Subspace& V) {
  return angle_report(M, V).mu_v_n;
}

AngleValue mu_N_V(const MeasurementOperator& M, const Subspace& V) {
  return angle_report(M, V).mu_n_v;
}

AngleValue mu_subspaces(const Subspace& X, const Subspace& Y) {
  require(X.space() == Y.space(), "subspace pair must share a space");
  const NormKind kind = X.space()->kind();
  AngleValue out;

  if (kind == NormKind::Hilbert) {
    Vector sw = X.space()->weights().array().sqrt();
    Matrix qx = sw.asDiagonal() * X.orthonormal_basis();
    Matrix qy = sw.asDiagonal() * Y.orthonormal_basis();
    const double sigma = Eigen::JacobiSVD<Matrix>(Matrix(qx.transpose() * qy))
                             .singularValues()[0];
    if (sigma >= 1.0 - 1e-12) {
      out.infinite = true;
      return out;
    }
    out.value = 1.0 / std::sqrt(1.0 - sigma * sigma);
    return out;
  }

  require(kind == NormKind::Sup, "subspace pair angles: SUP or HILBERT ambients only");
  // x = X a, gap u = X a - Y b boxed to the unit cube, swept per coordinate
  const int N = X.space()->size(), nx = X.dim(), ny = Y.dim();
  LinearProgram base = LinearProgram::make(nx + ny + N, N);
  base.A.leftCols(nx) = X.basis();
  base.A.middleCols(nx, ny) = -Y.basis();
  base.A.rightCols(N) = -Matrix::Identity(N, N);
  base.lower.tail(N).setConstant(-1.0);
  base.upper.tail(N).setConstant(1.0);
  for (int i = 0; i < N; ++i) {
    LinearProgram lp = base;
    lp.objective.head(nx) = -X.basis().row(i).transpose();
    SolveReport r = solve_lp(lp);
    if (r.status == LpStatus::Unbounded) {
      out.infinite = true;
      return out;
    }
    require(r.status == LpStatus::Optimal, "subspace pair sweep LP failed");
    out.value = std::max(out.value, -r.objective);
  }
  return out;
}

RadiusBounds radius_bounds(const MeasurementOperator& M, const Subspace& V, double eps,
                           const Vector* w) {
  require(eps >= 0.0, "radius bounds need a nonnegative eps");
  RadiusBounds out;
  AngleReport rep = angle_report(M, V);
  if (rep.mu_n_v.infinite) {
    out.infinite = true;
    return out;
  }
  if (eps == 0.0) {
    out.exact = true;
    return out;
  }
  if (w == nullptr) {
    out.lower = eps * rep.mu_n_v_lower;
    out.upper = 2.0 * eps * rep.mu_n_v_upper;
    return out;
  }

  // E(w) <= eps decides whether the set is nonempty; consistent data pins
  // the radius at eps * mu exactly.
  ApproxMethod method = ApproxMethod::MinimaxLp;
  double p = 2.0;
  if (M.space()->kind() == NormKind::Hilbert) method = ApproxMethod::LeastSquares;
  if (M.space()->kind() == NormKind::Lp) {
    method = ApproxMethod::Pnorm;
    p = M.space()->p();
  }
  const double E = ApproxMap(M, V, method, p).error_E(*w);
  if (E > eps * (1.0 + 1e-9)) {
    out.empty = true;
    return out;
  }
  if (E <= 1e-9 * (1.0 + w->cwiseAbs().maxCoeff())) {
    out.lower = eps * rep.mu_n_v_lower;
    out.upper = eps * rep.mu_n_v_upper;
    out.exact = rep.exact;
    return out;
  }
  out.lower = 0.0;
  out.upper = 2.0 * eps * rep.mu_n_v_upper;
  return out;
}

}  // namespace recov
