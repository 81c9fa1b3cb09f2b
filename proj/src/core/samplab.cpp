#include "core/samplab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/simplex.hpp"

namespace recov {

// ---------------------------------------------------------------------------
// Nested family.

NestedFamily::NestedFamily(std::vector<Subspace> spaces, std::vector<double> eps,
                           FamilyPreset preset)
    : spaces_(std::move(spaces)), eps_(std::move(eps)), preset_(preset) {
  require(!spaces_.empty(), "nested family needs at least one level");
  require(eps_.size() == spaces_.size(), "nested family needs one accuracy per level");
  const SpacePtr& s = spaces_.front().space();
  for (const Subspace& v : spaces_)
    require(v.space() == s, "nested family levels must share one ambient space");
  for (std::size_t i = 0; i + 1 < spaces_.size(); ++i) {
    const Matrix& lo = spaces_[i].basis();
    const Matrix& hi = spaces_[i + 1].basis();
    Eigen::ColPivHouseholderQR<Matrix> qr(hi);
    for (int j = 0; j < lo.cols(); ++j) {
      const Vector col = lo.col(j);
      const double res = (col - hi * qr.solve(col)).norm();
      require(res <= 1e-9 * (1.0 + col.norm()),
              "nested family levels must be nested: a basis vector escapes the next level");
    }
  }
  for (std::size_t i = 0; i < eps_.size(); ++i) {
    require(std::isfinite(eps_[i]) && eps_[i] > 0.0,
            "nested family accuracies must be positive");
    if (i > 0)
      require(eps_[i] <= eps_[i - 1] * (1.0 + 1e-12),
              "nested family accuracies must be nonincreasing");
  }
}

NestedFamily NestedFamily::lip_alpha(std::vector<Subspace> spaces, double C, double alpha) {
  require(std::isfinite(C) && C > 0.0, "algebraic accuracy preset needs C > 0");
  require(std::isfinite(alpha) && alpha > 0.0, "algebraic accuracy preset needs alpha > 0");
  std::vector<double> eps(spaces.size());
  for (std::size_t n = 0; n < eps.size(); ++n)
    eps[n] = C * std::pow(static_cast<double>(n) + 1.0, -alpha);
  return NestedFamily(std::move(spaces), std::move(eps), FamilyPreset::LipAlpha);
}

NestedFamily NestedFamily::bernstein(std::vector<Subspace> spaces, double C, double rho) {
  require(std::isfinite(C) && C > 0.0, "geometric accuracy preset needs C > 0");
  require(std::isfinite(rho) && rho > 1.0, "geometric accuracy preset needs rho > 1");
  std::vector<double> eps(spaces.size());
  for (std::size_t n = 0; n < eps.size(); ++n)
    eps[n] = C * std::pow(rho, -static_cast<double>(n));
  return NestedFamily(std::move(spaces), std::move(eps), FamilyPreset::Bernstein);
}

NestedFamily NestedFamily::custom(std::vector<Subspace> spaces, std::vector<double> epsilons) {
  return NestedFamily(std::move(spaces), std::move(epsilons), FamilyPreset::Custom);
}

const Subspace& NestedFamily::level(int n) const {
  require(n >= 0 && n < count(), "nested family level index out of range");
  return spaces_[static_cast<std::size_t>(n)];
}

double NestedFamily::epsilon(int n) const {
  require(n >= 0 && n < count(), "nested family level index out of range");
  return eps_[static_cast<std::size_t>(n)];
}

// ---------------------------------------------------------------------------
// Model-order selection.

SelectResult select_n(const NestedFamily& F, const MeasurementOperator& M) {
  require(M.space() == F.space(), "selection needs measurements on the family's space");
  SelectResult out;
  bool found = false;
  for (int n = 0; n < F.count(); ++n) {
    if (F.level(n).dim() > M.count()) continue;
    const AngleValue a = mu_V_N(M, F.level(n));
    if (a.infinite) continue;
    const double score = a.value * F.epsilon(n);
    if (!found || score < out.score) {
      found = true;
      out.n_star = n;
      out.score = score;
      out.mu = a.value;
    }
  }
  require(found,
          "no admissible level: every candidate exceeds the measurement count or meets "
          "the kernel");
  return out;
}

// ---------------------------------------------------------------------------
// Progressive sweep.

SweepTable sweep(const NestedFamily& F, const std::vector<MeasurementOperator>& schedule,
                 const Vector& f_probe) {
  require(!schedule.empty(), "sweep needs at least one measurement stage");
  const SpacePtr& s = F.space();
  require(f_probe.size() == s->size(), "sweep probe must live in the family's space");
  for (const MeasurementOperator& M : schedule)
    require(M.space() == s, "sweep schedule must measure the family's space");
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
    const Matrix& a = schedule[i].rows();
    const Matrix& b = schedule[i + 1].rows();
    require(b.rows() >= a.rows(), "sweep stages must not drop rows");
    require((b.topRows(a.rows()) - a).cwiseAbs().maxCoeff() <= 1e-12,
            "sweep stages must extend the earlier stage's rows");
  }

  SweepTable out;
  for (const MeasurementOperator& M : schedule) {
    const SelectResult sel = select_n(F, M);
    const Subspace& V = F.level(sel.n_star);
    const double eps = F.epsilon(sel.n_star);
    RecoveryProblem P(M, V, eps);
    const ApproxMap fit = default_approx_map(P);
    const Lifting lift = default_lifting(P);
    const RecoveryReport rep = recover(P, M.apply(f_probe), fit, lift);

    SweepRow row;
    row.m = M.count();
    row.n_of_m = sel.n_star;
    row.mu = sel.mu;
    row.epsilon = eps;
    row.bound = rep.bound_global;
    row.actual_error = s->norm(rep.reconstruction.values - f_probe);
    const NormKind kind = s->kind();
    // Exact norming routes exist for the uniform and Euclidean ambients;
    // elsewhere fall back on the duality identity with the (possibly
    // interval-upper) angle constant, which under-reports the level.
    row.gamma = (kind == NormKind::Sup || kind == NormKind::Hilbert)
                    ? gamma_norming(M, V)
                    : (sel.mu > 0.0 ? 1.0 / sel.mu : 0.0);
    out.rows.push_back(row);
  }
  out.converged = out.rows.back().actual_error <= 1e-3 * std::max(1.0, s->norm(f_probe));
  return out;
}

std::string SweepTable::to_csv() const {
  std::ostringstream out;
  out << "m,n_of_m,mu,epsilon,bound,actual_error,gamma\n";
  for (const SweepRow& r : rows)
    out << r.m << ',' << r.n_of_m << ',' << fmt12(r.mu) << ',' << fmt12(r.epsilon) << ','
        << fmt12(r.bound) << ',' << fmt12(r.actual_error) << ',' << fmt12(r.gamma) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Norming level of the measurement span on a model subspace.

namespace {

// Euclidean route: for v = Bo c with Bo orthonormal in the ambient inner
// product, the minimal filling of M v has squared norm c^T R^T G^+ R c with
// R = M Bo and G the representer Gram, so the squared norming level is the
// least eigenvalue of that quadratic form on the unit sphere.
double gamma_hilbert(const MeasurementOperator& M, const Subspace& V) {
  const SpacePtr& s = M.space();
  const Matrix G =
      M.rows() * s->weights().cwiseInverse().asDiagonal() * M.rows().transpose();
  const Matrix R = M.rows() * V.orthonormal_basis();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);
  Matrix S = R.transpose() * cod.pseudoInverse() * R;
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  require(es.info() == Eigen::Success, "norming-level eigensolve failed");
  const double lam = es.eigenvalues()(0);
  return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

// Uniform-norm route: the reciprocal level is the largest coordinate value
// any model vector can reach while its measurements admit a filling from the
// unit cube.  One support program per ambient coordinate and sign; an
// unbounded program certifies a model direction the rows cannot see.
double gamma_sup(const MeasurementOperator& M, const Subspace& V) {
  const int n = M.space()->size();
  const int k = V.dim();
  const int m = M.count();
  const Matrix& rows = M.rows();
  const Matrix& B = V.basis();
  const Matrix MB = rows * B;

  double best = 0.0;
  for (int coord = 0; coord < n; ++coord) {
    for (int sign = -1; sign <= 1; sign += 2) {
      LinearProgram lp = LinearProgram::make(n + k, m);
      for (int i = 0; i < n; ++i) {
        lp.lower[i] = -1.0;
        lp.upper[i] = 1.0;
      }
      for (int r = 0; r < m; ++r) {
        for (int i = 0; i < n; ++i) lp.A(r, i) = rows(r, i);
        for (int j = 0; j < k; ++j) lp.A(r, n + j) = -MB(r, j);
      }
      for (int j = 0; j < k; ++j) lp.objective[n + j] = -sign * B(coord, j);
      const SolveReport rep = solve_lp(lp);
      if (rep.status == LpStatus::Unbounded) return 0.0;
      require(rep.status == LpStatus::Optimal,
              "norming-level support program failed: " + rep.note);
      best = std::max(best, -rep.objective);
    }
  }
  require(best > 0.0, "norming-level sweep saw only the zero model vector");
  return 1.0 / best;
}

}  // namespace

double gamma_norming(const MeasurementOperator& M, const Subspace& V) {
  require(M.space() == V.space(), "norming level needs measurements on the model's space");
  const NormKind kind = M.space()->kind();
  require(kind == NormKind::Sup || kind == NormKind::Hilbert,
          "norming level is computed for uniform and Euclidean ambients only");
  return kind == NormKind::Hilbert ? gamma_hilbert(M, V) : gamma_sup(M, V);
}

// ---------------------------------------------------------------------------
// Stability probe.

ConditionEstimate condition_estimate(const RecoveryProblem& P, const ApproxMap& fit,
                                     const Lifting* lift, int k, double h, uint64_t seed) {
  require(k >= 1, "stability probe needs at least one base point");
  require(std::isfinite(h) && h > 0.0, "stability probe needs a positive step");
  const SpacePtr& s = P.space();
  const MeasurementOperator& M = P.op();
  Rng rng(seed);

  ConditionEstimate out;
  out.h = h;
  double best = 0.0;
  for (int i = 0; i < k; ++i) {
    const Vector w0 = M.apply(rng.normal_vector(s->size()));
    for (int j = 0; j < k; ++j) {
      Vector g = rng.normal_vector(M.count());
      const double gnorm = m_norm(M, g);
      if (!(gnorm > 0.0) || !std::isfinite(gnorm)) continue;
      g /= gnorm;
      const Vector up = lift ? recover(P, w0 + h * g, fit, *lift).reconstruction.values
                             : recover_into_V(P, w0 + h * g, fit).reconstruction.values;
      const Vector dn = lift ? recover(P, w0 - h * g, fit, *lift).reconstruction.values
                             : recover_into_V(P, w0 - h * g, fit).reconstruction.values;
      best = std::max(best, s->norm(up - dn) / (2.0 * h));
      ++out.samples;
    }
  }
  out.estimate = best;

  // Lipschitz product: data-norm stability of the fit map times the
  // inverse-stability constant, plus the lifting's own contribution when the
  // corrected pipeline is probed.  The Euclidean fit is an orthogonal
  // projection in the data norm (constant 1); otherwise use the
  // square-root-of-dimension linear-projector reference constant.
  const AngleValue mu = P.angles().mu_v_n;
  const double lip_fit = fit.method() == ApproxMethod::LeastSquares
                             ? 1.0
                             : std::sqrt(static_cast<double>(P.subspace().dim()));
  if (mu.infinite) {
    out.structural = std::numeric_limits<double>::infinity();
  } else {
    out.structural = mu.value * lip_fit;
    if (lift != nullptr) out.structural += lift->norm_bound() * (1.0 + lip_fit);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Totality-without-norming demonstration.

namespace {

struct TotalityStage {
  double dist = 0.0;
  double mu = 0.0;
};

// Stage-m functionals on the N-coordinate absolute-sum space: the first row
// weights every later coordinate by -a, the rest read single coordinates.
// The kernel is spanned by tail directions e_j + a e_1.
TotalityStage totality_stage(double a, int m, int N) {
  SpacePtr s = Space::sequence(N, NormKind::Lp, 1.0);
  Matrix rows = Matrix::Zero(m, N);
  rows(0, 0) = 1.0;
  for (int j = 1; j < N; ++j) rows(0, j) = -a;
  for (int r = 1; r < m; ++r) rows(r, r) = 1.0;
  const MeasurementOperator M = MeasurementOperator::general(s, rows);

  Matrix K = Matrix::Zero(N, N - m);
  for (int j = m; j < N; ++j) {
    K(0, j - m) = a;
    K(j, j - m) = 1.0;
  }
  require((rows * K).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + a),
          "tail directions must annihilate every functional");

  Vector e1 = Vector::Zero(N);
  e1[0] = 1.0;

  TotalityStage st;
  st.dist = dist_to_subspace(e1, Subspace(s, K)).value;
  const double fill = m_norm(M, M.apply(e1));
  require(fill > 0.0 && std::isfinite(fill),
          "first coordinate vector must have a positive minimal filling");
  st.mu = 1.0 / fill;
  return st;
}

}  // namespace

TotalityReport l1_totality_demo(double a, int m, int n_trunc) {
  require(std::isfinite(a) && a > 1.0, "totality demo needs weight a > 1");
  require(m >= 1, "totality demo needs at least one functional");
  require(n_trunc >= m + 1,
          "truncation too small: no tail coordinate survives the functionals");

  TotalityReport rep;
  rep.a = a;
  rep.m = m;
  rep.n_trunc = n_trunc;
  rep.expected_dist = 1.0 / a;

  std::vector<int> grid;
  int gap = 1;
  for (int N = m + 1; N < n_trunc; N += gap, gap *= 2) grid.push_back(N);
  grid.push_back(n_trunc);

  for (int N : grid) {
    const TotalityStage st = totality_stage(a, m, N);
    rep.truncation_sweep.push_back({N, st.dist, st.mu});
  }
  rep.dist = rep.truncation_sweep.back().dist;
  rep.mu = rep.truncation_sweep.back().mu;

  // Thin truncations carry a warning plus a linear continuation of the last
  // two sweep values (the exact distance is truncation-independent, so the
  // continuation simply repeats it once the sweep is flat).
  rep.truncated_warning = n_trunc < m + 3;
  if (rep.truncated_warning) {
    const auto& sw = rep.truncation_sweep;
    rep.extrapolated_dist =
        sw.size() >= 2 ? sw.back().dist + (sw.back().dist - sw[sw.size() - 2].dist)
                       : rep.dist;
  }
  return rep;
}

}  // namespace recov
