#include "core/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace recov {
namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr int kRefactorEvery = 100;
constexpr int kDegenerateRun = 40;  // pivots before switching to Bland's rule

// Internal computational form: min c.x  s.t.  W x = b,  lo <= x <= up, where
// columns are [structural | slacks | artificials].  Free structural
// variables are split into a difference of nonnegatives beforehand.
struct Tableau {
  Matrix W;
  Vector c, b, lo, up;
  int rows = 0, cols = 0;
};

bool finite(double v) { return std::isfinite(v); }

}  // namespace

LinearProgram LinearProgram::make(int vars, int rows) {
  LinearProgram lp;
  lp.objective = Vector::Zero(vars);
  lp.A = Matrix::Zero(rows, vars);
  lp.relations.assign(rows, Relation::Eq);
  lp.rhs = Vector::Zero(rows);
  lp.lower = Vector::Constant(vars, -kInf);
  lp.upper = Vector::Constant(vars, kInf);
  return lp;
}

SolveReport solve_lp(const LinearProgram& lp) {
  const int nv = lp.num_vars();
  const int nr = lp.num_rows();
  require(lp.A.rows() == nr && lp.A.cols() == nv, "solve_lp: shape mismatch");
  require(static_cast<int>(lp.relations.size()) == nr, "solve_lp: relations size");
  require(lp.lower.size() == nv && lp.upper.size() == nv, "solve_lp: bounds size");
  for (int j = 0; j < nv; ++j)
    require(lp.lower[j] <= lp.upper[j] + 1e-15, "solve_lp: empty variable bound range");

  // --- build computational form ------------------------------------------
  // Column map back to original variables: col j represents sign[j] * x[orig[j]].
  std::vector<int> orig;
  std::vector<double> sign;
  Tableau t;
  {
    std::vector<Vector> cols;
    std::vector<double> clo, cup, cost;
    for (int j = 0; j < nv; ++j) {
      const bool lo_f = finite(lp.lower[j]), up_f = finite(lp.upper[j]);
      if (lo_f || up_f) {
        cols.push_back(lp.A.col(j));
        cost.push_back(lp.objective[j]);
        clo.push_back(lp.lower[j]);
        cup.push_back(lp.upper[j]);
        orig.push_back(j);
        sign.push_back(1.0);
      } else {
        // free variable: x = x+ - x-
        cols.push_back(lp.A.col(j));
        cost.push_back(lp.objective[j]);
        clo.push_back(0.0);
        cup.push_back(kInf);
        orig.push_back(j);
        sign.push_back(1.0);
        cols.push_back(-lp.A.col(j));
        cost.push_back(-lp.objective[j]);
        clo.push_back(0.0);
        cup.push_back(kInf);
        orig.push_back(j);
        sign.push_back(-1.0);
      }
    }
    const int ns = static_cast<int>(cols.size());
    t.rows = nr;
    t.cols = ns + nr;  // one slack per row
    t.W = Matrix::Zero(nr, t.cols);
    t.c = Vector::Zero(t.cols);
    t.lo = Vector::Zero(t.cols);
    t.up = Vector::Zero(t.cols);
    for (int j = 0; j < ns; ++j) {
      t.W.col(j) = cols[j];
      t.c[j] = cost[j];
      t.lo[j] = clo[j];
      t.up[j] = cup[j];
    }
    for (int i = 0; i < nr; ++i) {
      const int sj = ns + i;
      t.W(i, sj) = 1.0;
      switch (lp.relations[i]) {
        case Relation::Le: t.lo[sj] = 0.0;   t.up[sj] = kInf; break;
        case Relation::Ge: t.lo[sj] = -kInf; t.up[sj] = 0.0;  break;
        case Relation::Eq: t.lo[sj] = 0.0;   t.up[sj] = 0.0;  break;
      }
    }
    t.b = lp.rhs;
  }
  const int n_struct = static_cast<int>(orig.size());

  // --- state ---------------------------------------------------------------
  // status per column: -1 nonbasic at lower, +1 nonbasic at upper, 0 basic.
  std::vector<int> stat(t.cols + t.rows, -1);
  std::vector<int> basis(t.rows);
  Vector xval = Vector::Zero(t.cols + t.rows);  // artificials appended later

  auto bound_start = [&](int j) {
    if (finite(t.lo[j])) return std::make_pair(-1, t.lo[j]);
    return std::make_pair(+1, t.up[j]);  // at least one bound is finite here
  };

  // start: structural columns at a bound, slacks basic
  for (int j = 0; j < n_struct; ++j) {
    auto [st, v] = bound_start(j);
    stat[j] = st;
    xval[j] = v;
  }
  Vector act = Vector::Zero(t.rows);  // A x_nonbasic (structural part)
  for (int j = 0; j < n_struct; ++j)
    if (xval[j] != 0.0) act += t.W.col(j) * xval[j];

  // Slack i basic with value b_i - act_i; if outside its range, clamp the
  // slack to the nearest bound (it becomes nonbasic) and give the row an
  // artificial column carrying the residual.
  int n_art = 0;
  std::vector<int> art_col_of_row(t.rows, -1);
  {
    std::vector<std::pair<int, double>> art;  // (row, coefficient)
    for (int i = 0; i < t.rows; ++i) {
      const int sj = n_struct + i;
      double v = t.b[i] - act[i];
      if (v >= t.lo[sj] - kFeasTol && v <= t.up[sj] + kFeasTol) {
        basis[i] = sj;
        stat[sj] = 0;
        xval[sj] = v;
      } else {
        const double sb = (v < t.lo[sj]) ? t.lo[sj] : t.up[sj];
        stat[sj] = (v < t.lo[sj]) ? -1 : +1;
        xval[sj] = sb;
        const double resid = v - sb;
        art.emplace_back(i, resid >= 0 ? 1.0 : -1.0);
        art_col_of_row[i] = t.cols + static_cast<int>(art.size()) - 1;
      }
    }
    n_art = static_cast<int>(art.size());
    if (n_art > 0) {
      Matrix W2 = Matrix::Zero(t.rows, t.cols + n_art);
      W2.leftCols(t.cols) = t.W;
      Vector c2 = Vector::Zero(t.cols + n_art), lo2 = Vector::Zero(t.cols + n_art),
             up2 = Vector::Zero(t.cols + n_art);
      c2.head(t.cols) = t.c;
      lo2.head(t.cols) = t.lo;
      up2.head(t.cols) = t.up;
      for (int k = 0; k < n_art; ++k) {
        const int col = t.cols + k;
        W2(art.at(k).first, col) = art.at(k).second;
        lo2[col] = 0.0;
        up2[col] = kInf;
      }
      t.W = std::move(W2);
      t.c = std::move(c2);
      t.lo = std::move(lo2);
      t.up = std::move(up2);
      t.cols += n_art;
      for (int i = 0; i < t.rows; ++i) {
        const int ac = art_col_of_row[i];
        if (ac < 0) continue;
        const int sj = n_struct + i;
        basis[i] = ac;
        stat[ac] = 0;
        xval[ac] = std::abs(t.b[i] - act[i] - xval[sj]);
      }
    }
  }
  xval.conservativeResize(t.cols);

  Matrix Binv = Matrix::Identity(t.rows, t.rows);
  auto refactor = [&]() {
    Matrix B(t.rows, t.rows);
    for (int i = 0; i < t.rows; ++i) B.col(i) = t.W.col(basis[i]);
    Eigen::PartialPivLU<Matrix> lu(B);
    Binv = lu.inverse();
    // recompute basic values from scratch
    Vector rhs = t.b;
    for (int j = 0; j < t.cols; ++j)
      if (stat[j] != 0 && xval[j] != 0.0) rhs -= t.W.col(j) * xval[j];
    Vector xB = Binv * rhs;
    for (int i = 0; i < t.rows; ++i) xval[basis[i]] = xB[i];
  };
  refactor();

  SolveReport rep;
  int total_iters = 0;

  // --- runs the simplex for the given cost vector; returns false on unbounded
  auto run = [&](const Vector& cost, bool phase1) -> bool {
    int degen_run = 0;
    bool bland = false;
    int since_refactor = 0;
    for (;;) {
      if (++total_iters > 20000 + 50 * (t.rows + t.cols))
        throw SolverError("simplex: iteration limit exceeded");
      // duals for current basis
      Vector cB(t.rows);
      for (int i = 0; i < t.rows; ++i) cB[i] = cost[basis[i]];
      Vector y = Binv.transpose() * cB;

      // pricing
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < t.cols; ++j) {
        if (stat[j] == 0) continue;
        if (t.lo[j] == t.up[j]) continue;  // fixed
        const double d = cost[j] - y.dot(t.W.col(j));
        const bool eligible = (stat[j] < 0) ? (d < -kDualTol) : (d > kDualTol);
        if (!eligible) continue;
        if (bland) { enter = j; break; }
        const double score = std::abs(d);
        if (score > best + 1e-15) { best = score; enter = j; }
      }
      if (enter < 0) return true;  // optimal for this cost

      const double dir = (stat[enter] < 0) ? 1.0 : -1.0;  // direction of x_enter
      Vector tcol = Binv * t.W.col(enter);

      // ratio test
      double theta = kInf;
      int leave_pos = -1;     // position in basis, -1 means bound flip
      double own_range = t.up[enter] - t.lo[enter];
      if (finite(own_range)) theta = own_range;
      for (int i = 0; i < t.rows; ++i) {
        const double move = -dir * tcol[i];  // d(x_basic_i)/d(theta)
        if (move > kPivotTol) {
          if (finite(t.up[basis[i]])) {
            const double room = (t.up[basis[i]] - xval[basis[i]]) / move;
            if (room < theta - 1e-12 ||
                (room < theta + 1e-12 && (leave_pos < 0 || basis[i] < basis[leave_pos]))) {
              theta = std::max(room, 0.0);
              leave_pos = i;
            }
          }
        } else if (move < -kPivotTol) {
          if (finite(t.lo[basis[i]])) {
            const double room = (t.lo[basis[i]] - xval[basis[i]]) / move;
            if (room < theta - 1e-12 ||
                (room < theta + 1e-12 && (leave_pos < 0 || basis[i] < basis[leave_pos]))) {
              theta = std::max(room, 0.0);
              leave_pos = i;
            }
          }
        }
      }
      if (!finite(theta)) {
        if (phase1) throw SolverError("simplex: phase-1 unbounded (internal)");
        return false;  // genuinely unbounded
      }

      // anti-cycling bookkeeping
      if (theta <= 1e-12) {
        if (++degen_run > kDegenerateRun) bland = true;
      } else {
        degen_run = 0;
        bland = false;
      }

      // apply step
      for (int i = 0; i < t.rows; ++i) xval[basis[i]] -= theta * dir * tcol[i];
      if (leave_pos < 0) {
        // bound flip: entering travels to its other bound
        xval[enter] = (stat[enter] < 0) ? t.up[enter] : t.lo[enter];
        stat[enter] = -stat[enter];
        continue;
      }
      const int leave = basis[leave_pos];
      const double move = -dir * tcol[leave_pos];
      stat[leave] = (move > 0) ? +1 : -1;
      xval[leave] = (move > 0) ? t.up[leave] : t.lo[leave];
      xval[enter] = ((stat[enter] < 0) ? t.lo[enter] : t.up[enter]) + dir * theta;
      basis[leave_pos] = enter;
      stat[enter] = 0;

      // pivot update of Binv
      const double piv = tcol[leave_pos];
      if (std::abs(piv) < kPivotTol) {
        refactor();
      } else {
        Vector brow = Binv.row(leave_pos) / piv;
        for (int i = 0; i < t.rows; ++i) {
          if (i == leave_pos) continue;
          const double f = tcol[i];
          if (f != 0.0) Binv.row(i) -= f * brow.transpose();
        }
        Binv.row(leave_pos) = brow.transpose();
      }
      if (++since_refactor >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      }
    }
  };

  // --- phase 1 -------------------------------------------------------------
  if (n_art > 0) {
    Vector c1 = Vector::Zero(t.cols);
    for (int k = t.cols - n_art; k < t.cols; ++k) c1[k] = 1.0;
    run(c1, true);
    double infeas = 0.0;
    for (int k = t.cols - n_art; k < t.cols; ++k) infeas += xval[k];
    if (infeas > 1e-7) {
      rep.status = LpStatus::Infeasible;
      rep.note = "phase-1 optimum " + std::to_string(infeas);
      rep.iterations = total_iters;
      return rep;
    }
    // freeze artificials at zero
    for (int k = t.cols - n_art; k < t.cols; ++k) {
      t.lo[k] = t.up[k] = 0.0;
      if (stat[k] != 0) xval[k] = 0.0;
    }
  }

  // --- phase 2 -------------------------------------------------------------
  Vector c2 = Vector::Zero(t.cols);
  c2.head(t.c.size()) = t.c;
  // artificial costs stay zero (they are fixed at zero anyway)
  if (!run(c2, false)) {
    rep.status = LpStatus::Unbounded;
    rep.iterations = total_iters;
    return rep;
  }
  refactor();  // tighten values before extraction

  // --- extraction ----------------------------------------------------------
  rep.status = LpStatus::Optimal;
  rep.iterations = total_iters;
  rep.solution = Vector::Zero(nv);
  for (int j = 0; j < n_struct; ++j) rep.solution[orig.at(j)] += sign.at(j) * xval[j];
  rep.objective = lp.objective.dot(rep.solution);

  Vector cB(t.rows);
  for (int i = 0; i < t.rows; ++i) cB[i] = c2[basis[i]];
  rep.duals = Binv.transpose() * cB;

  // certificates
  double viol = 0.0;
  Vector ax = lp.A * rep.solution;
  for (int i = 0; i < nr; ++i) {
    const double r = ax[i] - lp.rhs[i];
    switch (lp.relations[i]) {
      case Relation::Le: viol = std::max(viol, r); break;
      case Relation::Ge: viol = std::max(viol, -r); break;
      case Relation::Eq: viol = std::max(viol, std::abs(r)); break;
    }
  }
  for (int j = 0; j < nv; ++j) {
    if (finite(lp.lower[j])) viol = std::max(viol, lp.lower[j] - rep.solution[j]);
    if (finite(lp.upper[j])) viol = std::max(viol, rep.solution[j] - lp.upper[j]);
  }
  rep.primal_residual = viol;

  double dual_obj = rep.duals.dot(t.b);
  for (int j = 0; j < t.cols; ++j) {
    if (stat[j] == 0 || xval[j] == 0.0) continue;
    const double d = c2[j] - rep.duals.dot(t.W.col(j));
    dual_obj += d * xval[j];
  }
  rep.duality_gap = std::abs(dual_obj - rep.objective);
  return rep;
}

SupportResult maximize_over_polytope(const Vector& direction, const Matrix& G, const Vector& h) {
  const int n = static_cast<int>(direction.size());
  const int k = static_cast<int>(G.rows());
  require(G.cols() == n && h.size() == k, "maximize_over_polytope: shape mismatch");

  // dual program: min h.z  s.t.  G^T z = direction, z >= 0
  LinearProgram d = LinearProgram::make(k, n);
  d.objective = h;
  d.A = G.transpose();
  d.rhs = direction;
  d.lower = Vector::Zero(k);

  SolveReport r = solve_lp(d);
  SupportResult out;
  if (r.status == LpStatus::Infeasible) {
    out.status = LpStatus::Unbounded;  // no dual-feasible point: direction unbounded
    return out;
  }
  if (r.status == LpStatus::Unbounded) {
    out.status = LpStatus::Infeasible;  // dual unbounded below: empty polytope
    return out;
  }
  out.value = r.objective;
  out.argmax = r.duals;
  return out;
}

}  // namespace recov
