#include <doctest.h>

#include <cmath>

#include "core/lift.hpp"
#include "core/solvers.hpp"

using namespace recov;

namespace {

// Exact mean of |sum of m independent signs|, the L1 norm a sign-pattern
// combination attains at data-cube vertices.
double mean_abs_sign_sum(int m) {
  double total = 0.0, count = std::pow(2.0, m);
  double binom = 1.0;
  for (int k = 0; k <= m; ++k) {
    total += binom * std::abs(m - 2.0 * k);
    binom = binom * (m - k) / (k + 1.0);
  }
  return total / count;
}

Lifting pattern_dual_basis(const MeasurementOperator& M) {
  Matrix psi(M.space()->size(), M.count());
  for (int j = 0; j < M.count(); ++j)
    for (int i = 0; i < M.space()->size(); ++i)
      psi(i, j) = M.rows()(j, i) > 0 ? 1.0 : -1.0;
  return Lifting::dual_basis(M, psi);
}

}  // namespace

TEST_CASE("disjoint-support dual basis in a sup sequence has norm exactly 1") {
  auto s = Space::sequence(6, NormKind::Sup);
  auto M = MeasurementOperator::point_eval_indices(s, {0, 1, 2});
  Matrix psi = Matrix::Zero(6, 3);
  psi(0, 0) = psi(1, 1) = psi(2, 2) = 1.0;
  Lifting L = Lifting::dual_basis(M, psi);
  CHECK(L.linear());
  CHECK(L.norm_bound() == doctest::Approx(1.0).epsilon(1e-14));

  LiftNormEstimate e = lifting_norm(L, LiftNormMode::ExactVertex);
  CHECK(e.certified);
  CHECK(e.lower == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.upper == e.lower);

  Rng rng(41);
  for (int t = 0; t < 200; ++t) {
    Vector w = rng.normal_vector(3);
    Element x = L.lift(w);
    CHECK((M.apply(x.values) - w).cwiseAbs().maxCoeff() < 1e-9);
    Element x2 = L.lift(2.5 * w);
    CHECK((x2.values - 2.5 * x.values).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("hilbert lifting with orthonormal rows reproduces the row profiles") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 32, NormKind::Hilbert);
  Rng rng(43);
  Matrix B(32, 3);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 3; ++j) B(i, j) = rng.normal();
  Matrix phi = Subspace(s, B).orthonormal_basis();
  Matrix rows = (s->weights().asDiagonal() * phi).transpose();
  auto M = MeasurementOperator::general(s, rows);
  Lifting L = Lifting::orthonormal(M);
  CHECK(L.norm_bound() == 1.0);

  // lift of a coordinate datum is the matching orthonormal profile
  for (int j = 0; j < 3; ++j) {
    Element x = L.lift(Vector::Unit(3, j));
    CHECK((x.values - phi.col(j)).cwiseAbs().maxCoeff() < 1e-10);
  }

  // a minimal-norm lifting turns the data norm into equality, so the
  // sampled operator norm is exactly 1
  LiftNormEstimate e = lifting_norm(L, LiftNormMode::MonteCarlo, 500, 7);
  CHECK(e.lower == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.upper == 1.0);

  for (int t = 0; t < 200; ++t) {
    Vector w = rng.normal_vector(3);
    Element x = L.lift(w);
    CHECK((M.apply(x.values) - w).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(x.norm() == doctest::Approx(m_norm(M, w)).epsilon(1e-10));
  }
}

TEST_CASE("minimal 4-norm lifting: feasible, optimal against kernel probes") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 6, NormKind::Lp, 4.0);
  Rng rng(47);
  Matrix rows(2, 6);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 6; ++i) rows(j, i) = rng.normal();
  auto M = MeasurementOperator::general(s, rows);
  Lifting L = Lifting::min_norm(M, 4.0);

  Vector w = rng.normal_vector(2);
  Element x = L.lift(w);
  CHECK((M.apply(x.values) - w).cwiseAbs().maxCoeff() < 1e-9);
  const double value = x.norm();
  CHECK(value == doctest::Approx(m_norm(M, w)).epsilon(1e-8));

  // independent weak-duality certificate: alpha.w / dual-norm never beats it
  double best = 0.0;
  for (int k = 0; k < 2000; ++k) {
    Vector a = rng.normal_vector(2);
    const double dn = m_dual_norm(M, a);
    if (dn > 1e-12) best = std::max(best, std::abs(a.dot(w)) / dn);
  }
  CHECK(best <= value * (1.0 + 1e-7));
  CHECK(best >= value * (1.0 - 1e-3));

  // moving inside the coset can only increase the norm
  const Matrix& K = M.nullspace_basis();
  for (int t = 0; t < 50; ++t) {
    Vector probe = x.values + 0.02 * (K * rng.normal_vector(K.cols()));
    CHECK(s->norm(probe) >= value * (1.0 - 1e-9));
  }

  for (int t = 0; t < 200; ++t) {
    Vector ww = rng.normal_vector(2);
    CHECK((M.apply(L.lift(ww).values) - ww).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("product lifting: exact data reproduction, unit norm, positivity") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 16, NormKind::Lp, 1.0);
  auto M = MeasurementOperator::rademacher(s, 3);
  Lifting L = Lifting::riesz_product(M);
  CHECK(L.norm_bound() == 1.0);

  Vector ones = Vector::Ones(3);
  Element x = L.lift(ones);
  CHECK(x.values[0] == doctest::Approx(8.0).epsilon(1e-14));  // all factors double
  CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK((M.apply(x.values) - ones).cwiseAbs().maxCoeff() < 1e-12);

  Element zero = L.lift(Vector::Zero(3));
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  Rng rng(53);
  for (int t = 0; t < 200; ++t) {
    Vector w = 3.0 * rng.normal_vector(3);
    Element y = L.lift(w);
    CHECK((M.apply(y.values) - w).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(y.norm() == doctest::Approx(w.cwiseAbs().maxCoeff()).epsilon(1e-12));
    Element y2 = L.lift(3.5 * w);
    CHECK((y2.values - 3.5 * y.values).cwiseAbs().maxCoeff() < 1e-11);

    Vector u(3);
    for (int j = 0; j < 3; ++j) u[j] = rng.uniform(-1.0, 1.0);
    CHECK(L.lift(u).values.minCoeff() >= -1e-13);  // nonnegative on the cube
  }
}

TEST_CASE("any linear lifting of sign-pattern averages costs at least root(m/2)") {
  for (int m : {4, 8, 12}) {
    const int cells = 1 << (m + 1);
    auto s = Space::uniform_midpoint(0.0, 1.0, cells, NormKind::Lp, 1.0);
    auto M = MeasurementOperator::rademacher(s, m);
    Lifting L = pattern_dual_basis(M);
    LiftNormEstimate e = lifting_norm(L, LiftNormMode::ExactVertex);
    CHECK(e.certified);
    CHECK(e.lower >= std::sqrt(m / 2.0) - 1e-9);
    // the worst vertex realizes the mean absolute sign sum exactly
    CHECK(e.lower == doctest::Approx(mean_abs_sign_sum(m)).epsilon(1e-11));
  }
}

TEST_CASE("vertex-mode preconditions: cube ball only, at most 20 rows") {
  auto hil = Space::uniform_midpoint(0.0, 1.0, 8, NormKind::Hilbert);
  Matrix rows = Matrix::Identity(2, 8);
  auto Mh = MeasurementOperator::general(hil, rows);
  CHECK_THROWS_AS(lifting_norm(Lifting::orthonormal(Mh), LiftNormMode::ExactVertex),
                  StructuralError);

  auto sup = Space::sequence(24, NormKind::Sup);
  std::vector<int> idx(21);
  for (int j = 0; j < 21; ++j) idx[j] = j;
  auto Ms = MeasurementOperator::point_eval_indices(sup, idx);
  Matrix psi = Matrix::Zero(24, 21);
  for (int j = 0; j < 21; ++j) psi(j, j) = 1.0;
  CHECK_THROWS_AS(lifting_norm(Lifting::dual_basis(Ms, psi), LiftNormMode::ExactVertex),
                  StructuralError);
}

TEST_CASE("a dual basis must actually be dual") {
  auto s = Space::sequence(4, NormKind::Sup);
  auto M = MeasurementOperator::point_eval_indices(s, {0, 1});
  Matrix psi = Matrix::Zero(4, 2);
  psi(0, 0) = 1.0;
  psi(1, 1) = 0.5;  // M psi_2 = e_2/2, not e_2
  CHECK_THROWS_AS(Lifting::dual_basis(M, psi), StructuralError);
}

TEST_CASE("sampled bounds bracket the exact hilbert operator norm") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 16, NormKind::Hilbert);
  Rng rng(59);
  Matrix rows(3, 16);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 16; ++i) rows(j, i) = rng.normal();
  auto M = MeasurementOperator::general(s, rows);

  // perturb the minimal dual basis inside the kernel: still dual, larger norm
  Matrix psi0(16, 3);
  for (int j = 0; j < 3; ++j) psi0.col(j) = Lifting::orthonormal(M).lift(Vector::Unit(3, j)).values;
  Matrix psi = psi0 + 0.4 * (M.nullspace_basis() * Matrix::Random(13, 3));
  Lifting L = Lifting::dual_basis(M, psi);

  // exact value by spectral factorization of the whitened composition
  Vector sw = s->weights().array().sqrt();
  Matrix Aw = rows * sw.cwiseInverse().asDiagonal();
  Matrix G = Aw * Aw.transpose();
  Matrix Lc = Eigen::LLT<Matrix>(G).matrixL();
  const double exact =
      Eigen::JacobiSVD<Matrix>(Matrix(sw.asDiagonal() * psi * Lc)).singularValues()[0];

  LiftNormEstimate e = lifting_norm(L, LiftNormMode::MonteCarlo, 4000, 61);
  CHECK(e.lower <= exact * (1.0 + 1e-12));
  CHECK(e.lower >= exact * 0.97);
  CHECK(e.upper >= exact * (1.0 - 1e-12));
  CHECK(!e.certified);
}

TEST_CASE("minimal coset elements: pseudo-inverse in hilbert, certified in L4") {
  auto hil = Space::uniform_midpoint(0.0, 1.0, 10, NormKind::Hilbert);
  Rng rng(67);
  Matrix rows(2, 10);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 10; ++i) rows(j, i) = rng.normal();
  auto Mh = MeasurementOperator::general(hil, rows);
  Vector w = rng.normal_vector(2);
  Element xh = min_norm_coset_element(Mh, w, 2.0);
  Vector sw = hil->weights().array().sqrt();
  Matrix Aw = rows * sw.cwiseInverse().asDiagonal();
  Vector oracle = sw.cwiseInverse().asDiagonal() *
                  (Aw.transpose() * Matrix(Aw * Aw.transpose()).inverse() * w);
  CHECK((xh.values - oracle).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(xh.norm() == doctest::Approx(m_norm(Mh, w)).epsilon(1e-10));

  auto lp = Space::uniform_midpoint(0.0, 1.0, 10, NormKind::Lp, 4.0);
  auto Mp = MeasurementOperator::general(lp, rows);
  Element xp = min_norm_coset_element(Mp, w, 4.0);
  CHECK((Mp.apply(xp.values) - w).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(xp.norm() == doctest::Approx(m_norm(Mp, w)).epsilon(1e-7));
  CHECK(min_norm_coset_element(Mp, Vector::Zero(2), 4.0).values.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(min_norm_coset_element(Mp, w, 2.0), StructuralError);
  auto sup = Space::sequence(10, NormKind::Sup);
  CHECK_THROWS_AS(
      min_norm_coset_element(MeasurementOperator::general(sup, rows), w, 4.0),
      StructuralError);
}
