#include "core/chebgeo.hpp"

#include <algorithm>
#include <vector>

#include "core/qp.hpp"
#include "core/solvers.hpp"

namespace recov {

namespace {

constexpr int kEnumDimCap = 6;
constexpr long long kComboCap = 250000;

// Stacked inequality view G y <= h of a constraint system (equalities split
// into opposing inequality pairs), as maximize_over_polytope expects.
void stack_as_inequalities(const PolytopeSet& S, Matrix& G, Vector& h) {
  const int d = S.ambient_dims() + S.aux_dims();
  const int ne = static_cast<int>(S.eq_lhs().rows());
  const int ni = static_cast<int>(S.in_lhs().rows());
  G.resize(ni + 2 * ne, d);
  h.resize(ni + 2 * ne);
  if (ni > 0) {
    G.topRows(ni) = S.in_lhs();
    h.head(ni) = S.in_rhs();
  }
  if (ne > 0) {
    G.middleRows(ni, ne) = S.eq_lhs();
    h.segment(ni, ne) = S.eq_rhs();
    G.bottomRows(ne) = -S.eq_lhs();
    h.tail(ne) = -S.eq_rhs();
  }
}

// Euclidean geometry of a Hilbert model slice, reduced to the equality
// system's kernel: members are x0 + K z with ||q0 + A z||_2 <= eps, i.e. an
// ellipsoid (z - zc)' H (z - zc) <= rho^2 in kernel coordinates.
struct SliceEllipsoid {
  Vector x0;      // particular solution of the equality system
  Matrix K;       // orthonormal kernel basis of the equality system
  Matrix H;       // A'A with A the whitened model-complement map on K
  Vector zc;      // ellipsoid center in kernel coordinates
  double rho = 0.0;
  bool degenerate = false;  // H singular: the slice is unbounded
  bool dry = false;         // equality system misses the model ball
  Eigen::LDLT<Matrix> H_solver;

  Vector point(const Vector& z) const { return x0 + K * z; }
};

SliceEllipsoid analyze_slice(const PolytopeSet& S) {
  const SpacePtr& s = S.space();
  const int n = S.ambient_dims();
  SliceEllipsoid E;

  const Matrix& eq = S.eq_lhs();
  if (eq.rows() == 0) {
    E.x0 = Vector::Zero(n);
    E.K = Matrix::Identity(n, n);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(eq);
    E.x0 = cod.solve(S.eq_rhs());
    require((eq * E.x0 - S.eq_rhs()).cwiseAbs().maxCoeff() <=
                1e-8 * (1.0 + S.eq_rhs().cwiseAbs().maxCoeff()),
            "model_slice: equality system is inconsistent");
    Eigen::JacobiSVD<Matrix> svd(eq, Eigen::ComputeFullV);
    int rank = 0;
    const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > kRankTol * std::max(1.0, smax)) ++rank;
    E.K = svd.matrixV().rightCols(n - rank);
  }

  // Whitened projector onto the model complement: Qm x = W^(1/2)(x - proj x).
  Subspace model(s, S.ball_basis());
  const Matrix& Bo = model.orthonormal_basis();
  Vector root_w = s->weights().array().sqrt();
  Matrix Qm = root_w.asDiagonal() *
              (Matrix::Identity(n, n) - Bo * (Bo.transpose() * s->weights().asDiagonal()));

  Matrix A = Qm * E.K;
  Vector q0 = Qm * E.x0;
  E.H = A.transpose() * A;
  if (E.H.cols() == 0) {  // equality system pins a single point
    E.zc = Vector::Zero(0);
    E.rho = 0.0;
    E.dry = q0.norm() > S.ball_eps() + 1e-8 * (1.0 + S.ball_eps());
    return E;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(E.H);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, lmax)) {
    E.degenerate = true;
    return E;
  }
  E.H_solver.compute(E.H);
  E.zc = -E.H_solver.solve(A.transpose() * q0);
  const double phi2 = (q0 + A * E.zc).squaredNorm();
  const double rho2 = S.ball_eps() * S.ball_eps() - phi2;
  // Dryness band matches the slack build_Kw tolerates when it declares the
  // slice nonempty, so borderline data never yields a contradictory object.
  if (rho2 < -3e-9 * (1.0 + S.ball_eps() * S.ball_eps())) {
    E.dry = true;
    return E;
  }
  E.rho = std::sqrt(std::max(0.0, rho2));
  return E;
}

// Farthest member of the ellipsoid in a linear direction g (ambient space).
Vector ellipsoid_support(const SliceEllipsoid& E, const Vector& g) {
  if (E.zc.size() == 0) return E.x0;
  Vector c = E.K.transpose() * g;
  const double scale = c.cwiseAbs().maxCoeff();
  if (scale <= 1e-14) return E.point(E.zc);
  Vector Hc = E.H_solver.solve(c);
  return E.point(E.zc + (E.rho / std::sqrt(c.dot(Hc))) * Hc);
}

long long comb_count(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > 4 * kComboCap) return 4 * kComboCap;  // saturate, caller only compares
  }
  return r;
}

void dedupe_columns(std::vector<Vector>& pts, double tol) {
  std::vector<Vector> out;
  for (const Vector& p : pts) {
    bool seen = false;
    for (const Vector& q : out)
      if ((p - q).cwiseAbs().maxCoeff() <= tol) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(p);
  }
  pts.swap(out);
}

// --- minimal enclosing Euclidean ball (exact, Welzl's move-to-front) ---

struct EuclBall {
  Vector c;
  double r = -1.0;  // r < 0 encodes "no ball yet"
  bool contains(const Vector& p) const {
    return r >= 0.0 && (p - c).norm() <= r * (1.0 + 1e-12) + 1e-12;
  }
};

// Circumball of a support set, taken in its affine hull.
EuclBall circumball(const Matrix& Q, const std::vector<int>& R) {
  EuclBall b;
  if (R.empty()) return b;
  const int s = static_cast<int>(R.size());
  Matrix E(Q.rows(), s - 1);
  Vector rhs(s - 1);
  for (int j = 1; j < s; ++j) {
    E.col(j - 1) = Q.col(R[j]) - Q.col(R[0]);
    rhs[j - 1] = 0.5 * E.col(j - 1).squaredNorm();
  }
  Vector z = (s > 1)
                 ? Vector(Eigen::CompleteOrthogonalDecomposition<Matrix>(
                              Matrix(E.transpose() * E))
                              .solve(rhs))
                 : Vector(Vector::Zero(0));
  b.c = Q.col(R[0]) + ((s > 1) ? Vector(E * z) : Vector(Vector::Zero(Q.rows())));
  b.r = 0.0;
  for (int j = 0; j < s; ++j) b.r = std::max(b.r, (Q.col(R[j]) - b.c).norm());
  return b;
}

EuclBall welzl(const Matrix& Q, std::vector<int>& order, int n, std::vector<int>& R) {
  if (n == 0 || static_cast<int>(R.size()) == Q.rows() + 1) return circumball(Q, R);
  const int p = order[n - 1];
  EuclBall b = welzl(Q, order, n - 1, R);
  if (b.contains(Q.col(p))) return b;
  R.push_back(p);
  b = welzl(Q, order, n - 1, R);
  R.pop_back();
  return b;
}

EuclBall min_enclosing_ball(const Matrix& Q) {
  const int k = static_cast<int>(Q.cols());
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  Rng rng(0x5e1f);  // fixed shuffle keeps the recursion deterministic
  for (int i = k - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);
  std::vector<int> R;
  EuclBall b = welzl(Q, order, k, R);
  if (b.r < 0.0) b = EuclBall{Vector::Zero(Q.rows()), 0.0};
  return b;
}

// --- vertex-list radius solves per ambient norm ---

// min_a max_k ||p_k - a||_inf separates per coordinate: the radius is half
// the largest coordinate range, the optimal centers form a box, and the
// least-Euclidean-norm tie-break clamps zero into that box.
ChebyshevBall sup_ball(const Matrix& P) {
  const int n = static_cast<int>(P.rows());
  Vector hi = P.rowwise().maxCoeff(), lo = P.rowwise().minCoeff();
  ChebyshevBall out;
  out.radius = 0.5 * (hi - lo).maxCoeff();
  out.center.resize(n);
  for (int i = 0; i < n; ++i) {
    double c_lo = hi[i] - out.radius, c_hi = lo[i] + out.radius;
    if (c_lo > c_hi) c_lo = c_hi = 0.5 * (c_lo + c_hi);  // rounding at the widest coordinate
    out.center[i] = std::clamp(0.0, c_lo, c_hi);
  }
  out.exact = true;
  out.method = "coordinate-range";
  return out;
}

// Weighted ell_1 covering ball by LP over (center, per-point deviations,
// radius), then a least-norm tie-break on the center at the optimal radius.
ChebyshevBall l1_ball(const Matrix& P, const Vector& w) {
  const int n = static_cast<int>(P.rows());
  const int k = static_cast<int>(P.cols());
  const int nt = k * n;                      // t(j,i) >= |p_{j,i} - a_i|
  LinearProgram lp = LinearProgram::make(n + nt + 1, 2 * nt + k);
  lp.objective[n + nt] = 1.0;
  for (int i = 0; i < nt + 1; ++i) lp.lower[n + i] = 0.0;
  int row = 0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      lp.A(row, i) = 1.0;
      lp.A(row, n + j * n + i) = -1.0;
      lp.relations[row] = Relation::Le;
      lp.rhs[row++] = P(i, j);
      lp.A(row, i) = -1.0;
      lp.A(row, n + j * n + i) = -1.0;
      lp.relations[row] = Relation::Le;
      lp.rhs[row++] = -P(i, j);
    }
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) lp.A(row, n + j * n + i) = w[i];
    lp.A(row, n + nt) = -1.0;
    lp.relations[row] = Relation::Le;
    lp.rhs[row++] = 0.0;
  }
  SolveReport rep = solve_lp(lp);
  require(rep.status == LpStatus::Optimal, "l1 radius LP did not solve");

  ChebyshevBall out;
  out.radius = rep.objective;
  out.exact = true;
  out.method = "deviation-lp";

  // Tie-break: smallest-Euclidean-norm center among the optimal ones.
  const double slack = 1e-9 * (1.0 + out.radius);
  Matrix A(2 * nt + k, n + nt);
  Vector b(2 * nt + k);
  A.setZero();
  row = 0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      A(row, i) = 1.0;
      A(row, n + j * n + i) = -1.0;
      b[row++] = P(i, j);
      A(row, i) = -1.0;
      A(row, n + j * n + i) = -1.0;
      b[row++] = -P(i, j);
    }
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) A(row, n + j * n + i) = w[i];
    b[row++] = out.radius + slack;
  }
  Matrix Q = 1e-10 * Matrix::Identity(n + nt, n + nt);
  Q.topLeftCorner(n, n) = 2.0 * Matrix::Identity(n, n);
  QpResult qp = solve_qp(Q, Vector::Zero(n + nt), A, b, Matrix(0, n + nt), Vector(0),
                         rep.solution.head(n + nt));
  out.center = qp.converged ? Vector(qp.x.head(n)) : Vector(rep.solution.head(n));
  return out;
}

ChebyshevBall hilbert_ball(const Matrix& P, const SpacePtr& s) {
  Vector root_w = s->weights().array().sqrt();
  EuclBall b = min_enclosing_ball(root_w.asDiagonal() * P);
  ChebyshevBall out;
  out.center = b.c.cwiseQuotient(root_w);
  out.radius = b.r;
  out.exact = true;
  out.method = "min-ball";
  return out;
}

// Restricted variant: the center is a convex combination P theta of the
// vertex list.  Polyhedral norms stay linear programs in theta.
ChebyshevBall sup_ball_restricted(const Matrix& P) {
  const int n = static_cast<int>(P.rows());
  const int k = static_cast<int>(P.cols());
  LinearProgram lp = LinearProgram::make(k + 1, 2 * n * k + 1);
  lp.objective[k] = 1.0;
  for (int i = 0; i < k + 1; ++i) lp.lower[i] = 0.0;
  int row = 0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      lp.A.block(row, 0, 1, k) = P.row(i);
      lp.A(row, k) = -1.0;
      lp.relations[row] = Relation::Le;
      lp.rhs[row++] = P(i, j);
      lp.A.block(row, 0, 1, k) = -P.row(i);
      lp.A(row, k) = -1.0;
      lp.relations[row] = Relation::Le;
      lp.rhs[row++] = -P(i, j);
    }
  lp.A.block(row, 0, 1, k).setOnes();
  lp.relations[row] = Relation::Eq;
  lp.rhs[row] = 1.0;
  SolveReport rep = solve_lp(lp);
  require(rep.status == LpStatus::Optimal, "restricted sup radius LP did not solve");
  ChebyshevBall out;
  out.center = P * rep.solution.head(k);
  out.radius = rep.objective;
  out.exact = true;
  out.method = "simplex-lp";
  return out;
}

ChebyshevBall l1_ball_restricted(const Matrix& P, const Vector& w) {
  const int n = static_cast<int>(P.rows());
  const int k = static_cast<int>(P.cols());
  const int nt = k * n;
  LinearProgram lp = LinearProgram::make(k + nt + 1, 2 * nt + k + 1);
  lp.objective[k + nt] = 1.0;
  for (int i = 0; i < k + nt + 1; ++i) lp.lower[i] = 0.0;
  int row = 0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      lp.A.block(row, 0, 1, k) = P.row(i);
      lp.A(row, k + j * n + i) = -1.0;
      lp.relations[row] = Relation::Le;
      lp.rhs[row++] = P(i, j);
      lp.A.block(row, 0, 1, k) = -P.row(i);
      lp.A(row, k + j * n + i) = -1.0;
      lp.relations[row] = Relation::Le;
      lp.rhs[row++] = -P(i, j);
    }
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) lp.A(row, k + j * n + i) = w[i];
    lp.A(row, k + nt) = -1.0;
    lp.relations[row] = Relation::Le;
    lp.rhs[row++] = 0.0;
  }
  lp.A.block(row, 0, 1, k).setOnes();
  lp.relations[row] = Relation::Eq;
  lp.rhs[row] = 1.0;
  SolveReport rep = solve_lp(lp);
  require(rep.status == LpStatus::Optimal, "restricted l1 radius LP did not solve");
  ChebyshevBall out;
  out.center = P * rep.solution.head(k);
  out.radius = rep.objective;
  out.exact = true;
  out.method = "simplex-lp";
  return out;
}

// Vertex list for a radius computation, or an unbounded/throwing verdict.
// Returns true when verts were produced; fills `out` with the unbounded tag
// otherwise.
bool radius_vertices(const PolytopeSet& S, Matrix& verts, ChebyshevBall& out) {
  require(!S.empty(), "radius of an empty set is undefined");
  if (S.has_ball())
    throw SolverError(
        "model slices keep their quadratic constraint; radius bounds come from the "
        "kernel angle constants, not a vertex list");
  if (!S.has_vertices() && !S.bounded()) {
    out.radius = kInf;
    out.unbounded = true;
    out.exact = false;
    out.converged = false;
    out.method = "unbounded";
    return false;
  }
  verts = S.vertices();
  return true;
}

ChebyshevBall dispatch_ball(const PolytopeSet& S, bool restricted) {
  Matrix verts;
  ChebyshevBall out;
  if (!radius_vertices(S, verts, out)) return out;
  const SpacePtr& s = S.space();
  switch (s->kind()) {
    case NormKind::Sup:
      return restricted ? sup_ball_restricted(verts) : sup_ball(verts);
    case NormKind::Lp:
      require(s->p() == 1.0, "only level-one deviation norms have a radius LP");
      return restricted ? l1_ball_restricted(verts, s->weights())
                        : l1_ball(verts, s->weights());
    case NormKind::Hilbert: {
      // The minimal enclosing ball's center is a convex combination of its
      // support points, hence already inside the hull: both variants agree.
      ChebyshevBall b = hilbert_ball(verts, s);
      if (restricted) b.method = "min-ball-hull";
      return b;
    }
  }
  throw StructuralError("unsupported ambient norm for radius computations");
}

}  // namespace

PolytopeSet PolytopeSet::from_vertices(SpacePtr s, Matrix points) {
  require(static_cast<bool>(s), "from_vertices: space required");
  require(points.cols() >= 1, "from_vertices: at least one point required");
  require(points.rows() == s->size(), "from_vertices: point dimension mismatch");
  PolytopeSet S(std::move(s));
  S.verts_ = std::move(points);
  return S;
}

PolytopeSet PolytopeSet::from_hrep(SpacePtr s, Matrix eq_A, Vector eq_b, Matrix in_A,
                                   Vector in_b, int aux_dims) {
  require(static_cast<bool>(s), "from_hrep: space required");
  require(aux_dims >= 0, "from_hrep: negative aux dimension");
  const int d = s->size() + aux_dims;
  require(eq_A.rows() == eq_b.size() && in_A.rows() == in_b.size(),
          "from_hrep: row/right-hand-side mismatch");
  require((eq_A.rows() == 0 || eq_A.cols() == d) && (in_A.rows() == 0 || in_A.cols() == d),
          "from_hrep: column count must cover ambient plus aux dims");

  // Phase-one probe: reject systems with no solution at all.
  LinearProgram probe = LinearProgram::make(d, static_cast<int>(eq_A.rows() + in_A.rows()));
  if (eq_A.rows() > 0) probe.A.topRows(eq_A.rows()) = eq_A;
  if (in_A.rows() > 0) probe.A.bottomRows(in_A.rows()) = in_A;
  for (int i = 0; i < eq_b.size(); ++i) probe.rhs[i] = eq_b[i];
  for (int i = 0; i < in_b.size(); ++i) {
    probe.relations[eq_b.size() + i] = Relation::Le;
    probe.rhs[eq_b.size() + i] = in_b[i];
  }
  require(solve_lp(probe).status != LpStatus::Infeasible,
          "from_hrep: constraint system is infeasible");

  PolytopeSet S(std::move(s));
  S.eq_A_ = std::move(eq_A);
  S.eq_b_ = std::move(eq_b);
  S.in_A_ = std::move(in_A);
  S.in_b_ = std::move(in_b);
  S.aux_ = aux_dims;
  S.has_hrep_ = true;
  return S;
}

PolytopeSet PolytopeSet::model_slice(SpacePtr s, Matrix eq_A, Vector eq_b, Matrix ball_basis,
                                     double ball_eps) {
  require(static_cast<bool>(s), "model_slice: space required");
  require(s->kind() == NormKind::Hilbert, "model_slice: Hilbert ambient required");
  require(ball_eps >= 0.0, "model_slice: negative ball radius");
  require(eq_A.rows() == eq_b.size(), "model_slice: row/right-hand-side mismatch");
  require(eq_A.rows() == 0 || eq_A.cols() == s->size(),
          "model_slice: equality system must act on the ambient space");
  require(ball_basis.rows() == s->size(), "model_slice: ball basis dimension mismatch");
  PolytopeSet S(std::move(s));
  S.eq_A_ = std::move(eq_A);
  S.eq_b_ = std::move(eq_b);
  S.in_A_.resize(0, S.space_->size());
  S.in_b_.resize(0);
  S.has_hrep_ = true;
  S.ball_basis_ = std::move(ball_basis);
  S.ball_eps_ = ball_eps;
  return S;
}

PolytopeSet PolytopeSet::empty_set(SpacePtr s) {
  PolytopeSet S(std::move(s));
  S.empty_ = true;
  return S;
}

bool PolytopeSet::bounded() const {
  if (bounded_state_ >= 0) return bounded_state_ == 1;
  if (empty() || has_vertices()) {
    bounded_state_ = 1;
    return true;
  }
  if (has_ball()) {
    SliceEllipsoid E = analyze_slice(*this);
    bounded_state_ = E.degenerate ? 0 : 1;
    return bounded_state_ == 1;
  }
  // Coordinate range probes over every dimension (aux included: an aux ray
  // hides vertices of the ambient projection behind unbounded faces, so the
  // exact machinery refuses such systems too).
  const int d = ambient_dims() + aux_dims();
  Matrix G;
  Vector h;
  stack_as_inequalities(*this, G, h);
  for (int j = 0; j < d && bounded_state_ != 0; ++j) {
    Vector dir = Vector::Zero(d);
    for (int sign = 0; sign < 2; ++sign) {
      dir[j] = sign == 0 ? 1.0 : -1.0;
      if (maximize_over_polytope(dir, G, h).status == LpStatus::Unbounded) {
        bounded_state_ = 0;
        break;
      }
    }
  }
  if (bounded_state_ != 0) bounded_state_ = 1;
  return bounded_state_ == 1;
}

const Matrix& PolytopeSet::vertices() const {
  require(!empty(), "empty set has no vertices");
  if (verts_.cols() > 0) return verts_;
  if (cached_verts_.cols() > 0) return cached_verts_;
  if (has_ball())
    throw SolverError("model slices have no vertex list; use the sampled bounds");
  require(has_hrep_, "no representation to enumerate");
  const int n = ambient_dims();
  const int d = n + aux_dims();
  if (d > kEnumDimCap)
    throw SolverError("vertex enumeration is capped at six dimensions; use the sampled bounds");
  if (!bounded())
    throw SolverError("unbounded constraint systems have no complete vertex list");

  Eigen::ColPivHouseholderQR<Matrix> eq_qr(eq_A_);
  eq_qr.setThreshold(kRankTol);
  const int eq_rank = eq_A_.rows() > 0 ? static_cast<int>(eq_qr.rank()) : 0;
  const int need = d - eq_rank;
  const int ni = static_cast<int>(in_A_.rows());
  require(need <= ni || need == 0, "constraint system cannot pin any vertex");
  if (comb_count(ni, need) > kComboCap)
    throw SolverError("vertex enumeration would exceed the subset cap; use the sampled bounds");

  const double bscale =
      1.0 + std::max(eq_b_.size() ? eq_b_.cwiseAbs().maxCoeff() : 0.0,
                     in_b_.size() ? in_b_.cwiseAbs().maxCoeff() : 0.0);
  std::vector<Vector> found;
  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;
  bool more = true;
  while (more) {
    Matrix A_sys(eq_A_.rows() + need, d);
    Vector b_sys(eq_A_.rows() + need);
    if (eq_A_.rows() > 0) {
      A_sys.topRows(eq_A_.rows()) = eq_A_;
      b_sys.head(eq_A_.rows()) = eq_b_;
    }
    for (int i = 0; i < need; ++i) {
      A_sys.row(eq_A_.rows() + i) = in_A_.row(pick[i]);
      b_sys[eq_A_.rows() + i] = in_b_[pick[i]];
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A_sys);
    cod.setThreshold(kRankTol);
    if (static_cast<int>(cod.rank()) == d) {
      Vector y = cod.solve(b_sys);
      const double tol = 1e-8 * (bscale + y.cwiseAbs().maxCoeff());
      bool ok = (A_sys * y - b_sys).cwiseAbs().maxCoeff() <= tol;
      if (ok && in_A_.rows() > 0) ok = ((in_A_ * y - in_b_).maxCoeff() <= tol);
      if (ok && eq_A_.rows() > 0)
        ok = ((eq_A_ * y - eq_b_).cwiseAbs().maxCoeff() <= tol);
      if (ok) found.push_back(y.head(n));
    }
    // next combination (lexicographic)
    more = false;
    for (int i = need - 1; i >= 0; --i)
      if (pick[i] < ni - need + i) {
        ++pick[i];
        for (int j = i + 1; j < need; ++j) pick[j] = pick[j - 1] + 1;
        more = true;
        break;
      }
    if (need == 0) break;  // single candidate from the equality system alone
  }
  double scale = 1.0;
  for (const Vector& p : found) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  dedupe_columns(found, 1e-8 * scale);
  if (found.empty())
    throw SolverError("vertex enumeration found no feasible basic points");
  cached_verts_.resize(n, static_cast<int>(found.size()));
  for (int j = 0; j < static_cast<int>(found.size()); ++j) cached_verts_.col(j) = found[j];
  return cached_verts_;
}

DiameterResult diameter(const PolytopeSet& S, int samples, uint64_t seed) {
  require(!S.empty(), "diameter of an empty set is undefined");
  const SpacePtr& s = S.space();
  const int n = S.ambient_dims();
  DiameterResult out;

  // Exact route: a vertex list, given or enumerable.
  const Matrix* verts = nullptr;
  if (S.has_vertices()) {
    verts = &S.vertices();
  } else if (!S.has_ball()) {
    try {
      verts = &S.vertices();
    } catch (const SolverError&) {
      verts = nullptr;  // fall through to the sampled support scan
    }
  }
  if (verts) {
    const int k = static_cast<int>(verts->cols());
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        out.value = std::max(out.value, s->norm(verts->col(a) - verts->col(b)));
    out.exact = true;
    out.method = "vertex-pairs";
    return out;
  }

  // Sampled support scan: coordinate directions plus random ones, in
  // opposing pairs; the max pairwise distance of the supports is a lower
  // bound on the diameter (and detects unbounded directions).
  Rng rng(seed);
  std::vector<Vector> dirs;
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e[j] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  for (int t = 0; t < samples; ++t) {
    Vector g = rng.normal_vector(n);
    dirs.push_back(g);
    dirs.push_back(-g);
  }

  std::vector<Vector> pts;
  if (S.has_ball()) {
    SliceEllipsoid E = analyze_slice(S);
    if (E.degenerate) {
      out.value = kInf;
      out.unbounded = true;
      out.method = "support-unbounded";
      return out;
    }
    require(!E.dry, "diameter of an empty set is undefined");
    for (const Vector& g : dirs) pts.push_back(ellipsoid_support(E, g));
    out.method = "ellipsoid-support";
  } else {
    Matrix G;
    Vector h;
    stack_as_inequalities(S, G, h);
    const int d = n + S.aux_dims();
    for (const Vector& g : dirs) {
      Vector full = Vector::Zero(d);
      full.head(n) = g;
      SupportResult sup = maximize_over_polytope(full, G, h);
      if (sup.status == LpStatus::Unbounded) {
        out.value = kInf;
        out.unbounded = true;
        out.method = "support-unbounded";
        return out;
      }
      if (sup.status == LpStatus::Optimal) pts.push_back(sup.argmax.head(n));
    }
    out.method = "support-sampling";
  }
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b)
      out.value = std::max(out.value, s->norm(pts[a] - pts[b]));
  out.exact = false;
  return out;
}

ChebyshevBall chebyshev_center_radius(const PolytopeSet& S) { return dispatch_ball(S, false); }

ChebyshevBall restricted_radius(const PolytopeSet& S) { return dispatch_ball(S, true); }

PolytopeSet build_Kw(const RecoveryProblem& P, const Vector& w) {
  const SpacePtr& s = P.space();
  const int n = s->size();
  require(s->kind() == NormKind::Sup || s->kind() == NormKind::Hilbert,
          "data slices are built for uniform and Hilbert ambients");
  require(n <= 12, "data slices are exact-work objects; ambient dimension is capped at 12");
  require(w.size() == P.op().count(), "data vector length mismatch");

  // Emptiness: the best achievable data misfit over the model set.
  ApproxMap fit = default_approx_map(P);
  const double misfit = fit.error_E(w);
  const double allow = std::max(1e-12 * (1.0 + w.cwiseAbs().maxCoeff()),
                                P.epsilon() * (1.0 + 1e-9));
  if (misfit > allow) return PolytopeSet::empty_set(s);

  const Matrix& B = P.subspace().basis();
  const int k = static_cast<int>(B.cols());
  if (s->kind() == NormKind::Hilbert)
    return PolytopeSet::model_slice(s, P.op().rows(), w, B, P.epsilon());

  // Uniform ambient: expand dist(x, V) <= eps over y = (x, c) as
  // +-(x - B c) <= eps, with the model coefficients as aux dims.
  Matrix eq(P.op().count(), n + k);
  eq << P.op().rows(), Matrix::Zero(P.op().count(), k);
  Matrix in(2 * n, n + k);
  in << Matrix::Identity(n, n), -B, -Matrix::Identity(n, n), B;
  Vector in_b = Vector::Constant(2 * n, P.epsilon());
  try {
    return PolytopeSet::from_hrep(s, eq, w, in, in_b, k);
  } catch (const StructuralError&) {
    // The misfit fell inside the tolerance band but the system is infeasible.
    return PolytopeSet::empty_set(s);
  }
}

}  // namespace recov
