#include "core/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/solvers.hpp"

namespace recov {

MeasurementOperator::MeasurementOperator(SpacePtr s, Matrix rows, MeasureKind k, std::vector<int> idx)
    : space_(std::move(s)), rows_(std::move(rows)), kind_(k), point_idx_(std::move(idx)) {
  require(rows_.cols() == space_->size(), "measurements: row length must match grid");
  require(rows_.rows() >= 1, "measurements: need at least one functional");
  require(rows_.rows() <= rows_.cols(), "measurements: more functionals than grid points");
  Eigen::ColPivHouseholderQR<Matrix> qr(rows_.transpose());
  qr.setThreshold(kRankTol);
  require(qr.rank() == rows_.rows(), "measurements: functionals are dependent");
}

MeasurementOperator MeasurementOperator::point_eval(SpacePtr s, const std::vector<double>& points) {
  std::vector<int> idx;
  const double span = std::max(1.0, s->domain_b() - s->domain_a());
  for (double p : points) {
    int best = 0;
    double bd = kInf;
    for (int i = 0; i < s->size(); ++i) {
      const double d = std::abs(s->nodes()[i] - p);
      if (d < bd) { bd = d; best = i; }
    }
    require(bd <= 1e-9 * span, "point_eval: point is not a grid node");
    idx.push_back(best);
  }
  return point_eval_indices(std::move(s), std::move(idx));
}

MeasurementOperator MeasurementOperator::point_eval_indices(SpacePtr s, std::vector<int> idx) {
  const int m = static_cast<int>(idx.size());
  Matrix rows = Matrix::Zero(m, s->size());
  for (int j = 0; j < m; ++j) {
    require(idx[j] >= 0 && idx[j] < s->size(), "point_eval: index out of range");
    rows(j, idx[j]) = 1.0;
  }
  return MeasurementOperator(std::move(s), std::move(rows), MeasureKind::PointEval, std::move(idx));
}

MeasurementOperator MeasurementOperator::disjoint_avg(SpacePtr s,
                                                      const std::vector<std::vector<int>>& supports) {
  const int m = static_cast<int>(supports.size());
  Matrix rows = Matrix::Zero(m, s->size());
  std::set<int> used;
  for (int j = 0; j < m; ++j) {
    require(!supports[j].empty(), "disjoint_avg: empty support block");
    for (int i : supports[j]) {
      require(i >= 0 && i < s->size(), "disjoint_avg: index out of range");
      require(used.insert(i).second, "disjoint_avg: support blocks overlap");
      rows(j, i) = s->weights()[i];
    }
    const double dn = s->dual_norm(rows.row(j).transpose());
    rows.row(j) /= dn;  // unit dual norm
  }
  return MeasurementOperator(std::move(s), std::move(rows), MeasureKind::DisjointAvg, {});
}

namespace {

// sign of sin(2^(j+1) pi s) evaluated away from zeros
double rademacher_sign(int j, double s) {
  const double u = std::ldexp(s, j + 1);  // s * 2^(j+1)
  const long long fl = static_cast<long long>(std::floor(u));
  return (fl % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

MeasurementOperator MeasurementOperator::rademacher(SpacePtr s, int m) {
  require(m >= 1 && m <= 62, "rademacher: bad count");
  const int N = s->size();
  const long long cells = 1ll << (m + 1);
  require(N % cells == 0, "rademacher: grid must have a multiple of 2^(m+1) equal cells");
  const double w0 = s->weights()[0];
  require((s->weights().array() - w0).abs().maxCoeff() < 1e-15 * w0,
          "rademacher: grid cells must be equal");
  const double a = s->domain_a(), b = s->domain_b();
  Matrix rows(m, N);
  for (int i = 0; i < N; ++i) {
    const double t = (s->nodes()[i] - a) / (b - a);  // normalized cell midpoint
    for (int j = 1; j <= m; ++j) rows(j - 1, i) = rademacher_sign(j, t) * s->weights()[i];
  }
  return MeasurementOperator(std::move(s), std::move(rows), MeasureKind::Rademacher, {});
}

MeasurementOperator MeasurementOperator::fourier(SpacePtr s, int m) {
  require(m >= 1, "fourier: bad count");
  require(s->periodic(), "fourier: needs a periodic grid");
  const int N = s->size();
  Matrix rows(m, N);
  for (int i = 0; i < N; ++i) {
    const double t = s->nodes()[i];
    const double w = s->weights()[i];
    for (int j = 0; j < m; ++j) {
      if (j == 0) {
        rows(0, i) = w / (2.0 * M_PI);
      } else {
        const int k = (j + 1) / 2;
        rows(j, i) = (j % 2 == 1) ? w * std::cos(k * t) / M_PI : w * std::sin(k * t) / M_PI;
      }
    }
  }
  return MeasurementOperator(std::move(s), std::move(rows), MeasureKind::Fourier, {});
}

MeasurementOperator MeasurementOperator::general(SpacePtr s, Matrix rows) {
  return MeasurementOperator(std::move(s), std::move(rows), MeasureKind::General, {});
}

Vector MeasurementOperator::apply(const Vector& values) const {
  require(values.size() == space_->size(), "apply: wrong length");
  return rows_ * values;
}

const Matrix& MeasurementOperator::nullspace_basis() const {
  if (!null_basis_) {
    const int N = static_cast<int>(rows_.cols());
    const int m = count();
    Eigen::ColPivHouseholderQR<Matrix> qr(rows_.transpose());
    qr.setThreshold(kRankTol);
    Matrix Q = qr.householderQ();
    null_basis_ = Q.rightCols(N - m);
  }
  return *null_basis_;
}

MeasurementOperator MeasurementOperator::prefix(int k) const {
  require(k >= 1 && k <= count(), "prefix: bad row count");
  std::vector<int> idx;
  if (kind_ == MeasureKind::PointEval)
    idx.assign(point_idx_.begin(), point_idx_.begin() + k);
  return MeasurementOperator(space_, rows_.topRows(k), kind_, std::move(idx));
}

double m_dual_norm(const MeasurementOperator& M, const Vector& alpha) {
  require(alpha.size() == M.count(), "m_dual_norm: wrong length");
  return M.space()->dual_norm(M.rows().transpose() * alpha);
}

Vector riesz_product_values(const MeasurementOperator& M, const Vector& w) {
  require(M.kind() == MeasureKind::Rademacher, "riesz product: Rademacher operators only");
  const int m = M.count();
  require(w.size() == m, "riesz product: wrong data length");
  const int N = M.space()->size();
  const double winf = w.cwiseAbs().maxCoeff();
  Vector vals = Vector::Zero(N);
  if (winf == 0.0) return vals;
  // normalize onto the sup sphere, take the product cell by cell, scale back
  for (int i = 0; i < N; ++i) {
    double prod = 1.0;
    for (int j = 0; j < m; ++j) {
      const double rji = M.rows()(j, i) / M.space()->weights()[i];  // +-1
      prod *= 1.0 + (w[j] / winf) * rji;
    }
    vals[i] = winf * prod;
  }
  return vals;
}

namespace {

// gauge LP: 1 / max{ s : M x = s w, |x_i| <= 1 }  (sup ambient, any kind).
// The data vector is normalized first: the optimal s scales like 1/||w||,
// so feeding near-zero residuals directly would make the LP numerically
// unbounded.  Homogeneity restores the answer afterwards.
MNormResult m_norm_sup_lp(const MeasurementOperator& M, const Vector& w) {
  const int N = M.space()->size();
  const int m = M.count();
  const double scale = w.cwiseAbs().maxCoeff();
  LinearProgram lp = LinearProgram::make(N + 1, m);
  lp.objective[N] = -1.0;
  lp.A.leftCols(N) = M.rows();
  lp.A.col(N) = -w / scale;
  lp.lower.head(N).setConstant(-1.0);
  lp.upper.head(N).setConstant(1.0);
  lp.lower[N] = 0.0;
  SolveReport r = solve_lp(lp);
  require(r.status == LpStatus::Optimal, "m_norm: gauge LP failed");
  const double s = -r.objective;
  require(s > 0, "m_norm: gauge LP degenerate");
  MNormResult out;
  out.value = scale / s;
  out.minimizer = r.solution.head(N) * (scale / s);
  out.method = "gauge-lp";
  return out;
}

MNormResult m_norm_hilbert(const MeasurementOperator& M, const Vector& w) {
  // whiten, then the least-norm coset element is the answer
  Vector sw = M.space()->weights().array().sqrt();
  Matrix Aw = M.rows() * sw.cwiseInverse().asDiagonal();
  Vector xw = least_norm(Aw, w);
  MNormResult out;
  out.value = xw.norm();
  out.minimizer = sw.cwiseInverse().asDiagonal() * xw;
  out.method = "hilbert-least-norm";
  return out;
}

MNormResult m_norm_l1_lp(const MeasurementOperator& M, const Vector& w) {
  // min sum w_i (x+ + x-)  s.t.  M (x+ - x-) = w
  const int N = M.space()->size();
  const int m = M.count();
  LinearProgram lp = LinearProgram::make(2 * N, m);
  lp.A.leftCols(N) = M.rows();
  lp.A.rightCols(N) = -M.rows();
  lp.rhs = w;
  lp.lower = Vector::Zero(2 * N);
  lp.objective.head(N) = M.space()->weights();
  lp.objective.tail(N) = M.space()->weights();
  SolveReport r = solve_lp(lp);
  require(r.status == LpStatus::Optimal, "m_norm: l1 LP failed");
  MNormResult out;
  out.value = r.objective;
  out.minimizer = r.solution.head(N) - r.solution.tail(N);
  out.method = "l1-lp";
  return out;
}

}  // namespace

MNormResult m_norm_detail(const MeasurementOperator& M, const Vector& w) {
  require(w.size() == M.count(), "m_norm: wrong data length");
  const NormKind nk = M.space()->kind();
  MNormResult out;
  if (w.cwiseAbs().maxCoeff() == 0.0) {
    out.minimizer = Vector::Zero(M.space()->size());
    out.method = "zero";
    return out;
  }

  // closed forms certified by the construction kind
  if (nk == NormKind::Sup &&
      (M.kind() == MeasureKind::PointEval || M.kind() == MeasureKind::DisjointAvg)) {
    out.value = w.cwiseAbs().maxCoeff();
    out.method = "closed-form-cube";
    out.minimizer = Vector::Zero(M.space()->size());
    if (M.kind() == MeasureKind::PointEval) {
      for (int j = 0; j < M.count(); ++j) out.minimizer[M.point_indices()[j]] = w[j];
    } else {
      for (int j = 0; j < M.count(); ++j)
        for (int i = 0; i < M.space()->size(); ++i)
          if (M.rows()(j, i) != 0.0) out.minimizer[i] = (M.rows()(j, i) > 0 ? w[j] : -w[j]);
    }
    return out;
  }
  if (nk == NormKind::Lp && M.space()->p() == 1.0 && M.kind() == MeasureKind::Rademacher) {
    out.value = w.cwiseAbs().maxCoeff();
    out.method = "closed-form-riesz";
    out.minimizer = riesz_product_values(M, w);
    return out;
  }
  if (nk == NormKind::Lp && M.kind() == MeasureKind::DisjointAvg) {
    // disjoint unit-dual-norm rows: the data norm is the plain ell_p norm
    const double p = M.space()->p();
    double s = 0.0;
    for (int j = 0; j < M.count(); ++j) s += std::pow(std::abs(w[j]), p);
    out.value = std::pow(s, 1.0 / p);
    out.method = "closed-form-lp";
    // constant-profile blocks: the minimal interpolant is constant per block
    out.minimizer = Vector::Zero(M.space()->size());
    for (int j = 0; j < M.count(); ++j) {
      double lw = 0.0;
      for (int i = 0; i < M.space()->size(); ++i)
        if (M.rows()(j, i) != 0.0) lw += M.rows()(j, i);
      for (int i = 0; i < M.space()->size(); ++i)
        if (M.rows()(j, i) != 0.0) out.minimizer[i] = w[j] / lw;
    }
    return out;
  }

  switch (nk) {
    case NormKind::Sup: return m_norm_sup_lp(M, w);
    case NormKind::Hilbert: return m_norm_hilbert(M, w);
    case NormKind::Lp: {
      if (M.space()->p() == 1.0) return m_norm_l1_lp(M, w);
      FitResult f = pnorm_min_coset(M.rows(), w, M.space()->weights(), M.space()->p());
      out.value = f.value;
      out.minimizer = f.coeffs;
      out.method = "irls-coset";
      out.converged = f.converged;
      return out;
    }
  }
  throw SolverError("m_norm: unreachable");
}

double m_norm(const MeasurementOperator& M, const Vector& w) { return m_norm_detail(M, w).value; }

bool m_norm_ball_is_cube(const MeasurementOperator& M) {
  const NormKind nk = M.space()->kind();
  if (nk == NormKind::Sup)
    return M.kind() == MeasureKind::PointEval || M.kind() == MeasureKind::DisjointAvg;
  return nk == NormKind::Lp && M.space()->p() == 1.0 && M.kind() == MeasureKind::Rademacher;
}

NetDesign design_net_measurements(const Subspace& V, double delta) {
  const Space& s = *V.space();
  require(s.kind() == NormKind::Sup, "net design: sup ambient only");
  require(delta > 0.0 && delta < 1.0, "net design: delta must be in (0,1)");
  const int n = V.dim();
  const int N = s.size();

  // deterministic candidate cloud on the unit sphere of V
  const int K = 64 * n * n;
  Rng rng(0x5eedULL);
  Matrix cand(n, 0);
  std::vector<Vector> cand_vals;
  cand.resize(n, K);
  int kept = 0;
  for (int k = 0; k < K; ++k) {
    Vector c = rng.normal_vector(n);
    Vector v = V.combine(c);
    const double nv = v.cwiseAbs().maxCoeff();
    if (nv < 1e-12) continue;
    cand.col(kept) = c / nv;
    cand_vals.push_back(v / nv);
    ++kept;
  }
  cand.conservativeResize(n, kept);
  require(kept > 0, "net design: no usable candidate directions");

  // greedy covering: add the farthest candidate until everything is within delta
  std::vector<int> net;
  std::vector<double> dist(kept, kInf);
  int next = 0;  // deterministic start at the first candidate
  double far_val = kInf;
  while (true) {
    net.push_back(next);
    for (int k = 0; k < kept; ++k) {
      const double d = (cand_vals[k] - cand_vals[next]).cwiseAbs().maxCoeff();
      if (d < dist[k]) dist[k] = d;
    }
    far_val = 0.0;
    next = -1;
    for (int k = 0; k < kept; ++k)
      if (dist[k] > far_val + 1e-15) { far_val = dist[k]; next = k; }
    if (next < 0 || far_val <= delta) break;
    if (static_cast<int>(net.size()) > 4 * N)
      throw SolverError("net design: net exceeded grid capacity");
  }

  // signed norming node of each net member; signs drop out, nodes dedupe
  std::set<int> nodes;
  for (int idx : net) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < N; ++i) {
      const double a = std::abs(cand_vals[idx][i]);
      if (a > best + 1e-15) { best = a; arg = i; }
    }
    nodes.insert(arg);
  }

  Matrix net_coeffs(n, static_cast<int>(net.size()));
  for (size_t j = 0; j < net.size(); ++j) net_coeffs.col(static_cast<int>(j)) = cand.col(net[j]);

  NetDesign out{MeasurementOperator::point_eval_indices(
                    V.space(), std::vector<int>(nodes.begin(), nodes.end())),
                std::move(net_coeffs),
                delta,
                far_val,
                2.0 / (1.0 - delta),
                kept};
  return out;
}

}  // namespace recov
