#include <doctest.h>

#include <cmath>

#include "core/measure.hpp"
#include "core/solvers.hpp"

using namespace recov;

TEST_CASE("point evaluation data norm is the max of the data (sup ambient)") {
  auto s = Space::uniform_periodic(-M_PI, M_PI, 64, NormKind::Sup);
  auto M = MeasurementOperator::point_eval_indices(s, {3, 17, 40});
  Vector w(3);
  w << 0.25, -2.0, 1.0;
  MNormResult r = m_norm_detail(M, w);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK((M.apply(r.minimizer) - w).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s->norm(r.minimizer) == doctest::Approx(r.value).epsilon(1e-12));

  // cross-check the closed form against the optimization route
  auto G = MeasurementOperator::general(s, M.rows());
  MNormResult opt = m_norm_detail(G, w);
  CHECK(opt.method == "gauge-lp");
  CHECK(opt.value == doctest::Approx(r.value).epsilon(1e-9));
}

TEST_CASE("disjoint averages: data norm is ell_p of the data") {
  for (double p : {1.0, 2.0, 3.0}) {
    auto s = Space::uniform_midpoint(0.0, 1.0, 60, NormKind::Lp, p);
    std::vector<std::vector<int>> blocks = {{0, 1, 2, 3}, {10, 11}, {30, 31, 32}};
    auto M = MeasurementOperator::disjoint_avg(s, blocks);
    // rows have unit dual norm by construction
    for (int j = 0; j < M.count(); ++j)
      CHECK(s->dual_norm(M.rows().row(j).transpose()) == doctest::Approx(1.0).epsilon(1e-12));
    Vector w(3);
    w << 1.0, -0.5, 2.0;
    MNormResult r = m_norm_detail(M, w);
    double expect = std::pow(std::pow(1.0, p) + std::pow(0.5, p) + std::pow(2.0, p), 1.0 / p);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK((M.apply(r.minimizer) - w).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s->norm(r.minimizer) == doctest::Approx(r.value).epsilon(1e-10));
  }
}

TEST_CASE("rademacher rows: entries are +-cell width, orthogonal rows") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 16, NormKind::Lp, 1.0);
  auto M = MeasurementOperator::rademacher(s, 3);
  CHECK(M.count() == 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 16; ++i)
      CHECK(std::abs(M.rows()(j, i)) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  // the first row is + on the first quarter period structure: sign flips every 1/4
  CHECK(M.rows()(0, 0) > 0);
  CHECK(M.rows()(0, 4) < 0);
  CHECK(M.rows()(0, 8) > 0);
  // rows integrate to zero and are mutually orthogonal as grid vectors
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(M.rows().row(j).sum()) < 1e-15);
    for (int k = j + 1; k < 3; ++k)
      CHECK(std::abs(M.rows().row(j).dot(M.rows().row(k))) < 1e-15);
  }
}

TEST_CASE("rademacher data norm is max|w| with the product element attaining it") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 64, NormKind::Lp, 1.0);
  auto M = MeasurementOperator::rademacher(s, 4);
  Rng rng(19);
  for (int t = 0; t < 20; ++t) {
    Vector w = rng.normal_vector(4);
    MNormResult r = m_norm_detail(M, w);
    CHECK(r.value == doctest::Approx(w.cwiseAbs().maxCoeff()).epsilon(1e-15));
    CHECK((M.apply(r.minimizer) - w).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s->norm(r.minimizer) == doctest::Approx(r.value).epsilon(1e-12));
    // independent optimization route agrees (certifies the closed form)
    auto G = MeasurementOperator::general(s, M.rows());
    CHECK(m_norm(G, w) == doctest::Approx(r.value).epsilon(1e-8));
  }
}

TEST_CASE("hilbert data norm via least-norm matches the Gram formula") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 40, NormKind::Hilbert);
  Rng rng(23);
  Matrix rows(3, 40);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 40; ++i) rows(j, i) = rng.normal();
  auto M = MeasurementOperator::general(s, rows);
  Vector w = rng.normal_vector(3);
  MNormResult r = m_norm_detail(M, w);
  // w^T (A_w A_w^T)^{-1} w with whitened rows
  Vector sw = s->weights().array().sqrt();
  Matrix Aw = rows * sw.cwiseInverse().asDiagonal();
  Matrix G = Aw * Aw.transpose();
  const double expect = std::sqrt(w.dot(G.llt().solve(w)));
  CHECK(r.value == doctest::Approx(expect).epsilon(1e-10));
  CHECK((M.apply(r.minimizer) - w).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("duality: m_norm equals sup of alpha.w over the dual unit ball") {
  Rng rng(31);
  auto sup = Space::sequence(8, NormKind::Sup);
  auto hil = Space::uniform_midpoint(0.0, 1.0, 8, NormKind::Hilbert);
  for (int t = 0; t < 25; ++t) {
    Matrix rows(3, 8);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 8; ++i) rows(j, i) = rng.normal();
    Vector w = rng.normal_vector(3);
    for (const SpacePtr& s : {sup, hil}) {
      auto M = MeasurementOperator::general(s, rows);
      const double primal = m_norm(M, w);
      // dual side: maximize alpha.w by sampling + local polish on the ball
      // boundary ||sum alpha_j l_j||_* <= 1 (ratio maximization)
      double best = 0.0;
      for (int k = 0; k < 4000; ++k) {
        Vector a = rng.normal_vector(3);
        const double dn = m_dual_norm(M, a);
        if (dn > 1e-12) best = std::max(best, std::abs(a.dot(w)) / dn);
      }
      CHECK(best <= primal * (1.0 + 1e-9));  // weak duality, always
      CHECK(best >= primal * 0.98);          // sampling nearly attains it in 3 dims
    }
  }
}

TEST_CASE("nullspace basis is annihilated by the rows") {
  auto s = Space::sequence(12, NormKind::Sup);
  Rng rng(5);
  Matrix rows(4, 12);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 12; ++i) rows(j, i) = rng.normal();
  auto M = MeasurementOperator::general(s, rows);
  const Matrix& B = M.nullspace_basis();
  CHECK(B.cols() == 8);
  CHECK((rows * B).cwiseAbs().maxCoeff() < 1e-10);
  // orthonormal columns
  CHECK((B.transpose() * B - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dependent functionals are rejected") {
  auto s = Space::sequence(6, NormKind::Sup);
  Matrix rows(2, 6);
  rows.row(0) << 1, 2, 3, 0, 0, 0;
  rows.row(1) = 2.0 * rows.row(0);
  CHECK_THROWS_AS(MeasurementOperator::general(s, rows), StructuralError);
}

TEST_CASE("fourier rows recover trig coefficients exactly on the grid") {
  auto s = Space::uniform_periodic(-M_PI, M_PI, 256, NormKind::Hilbert);
  auto M = MeasurementOperator::fourier(s, 5);
  // f = 2 + 3 cos t - sin 2t: coefficients (2, 3, 0, 0, -1)
  Vector f(256);
  for (int i = 0; i < 256; ++i) {
    const double t = s->nodes()[i];
    f[i] = 2.0 + 3.0 * std::cos(t) - std::sin(2.0 * t);
  }
  Vector w = M.apply(f);
  CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w[3] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w[4] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("prefix keeps nesting") {
  auto s = Space::uniform_periodic(-M_PI, M_PI, 128, NormKind::Hilbert);
  auto M = MeasurementOperator::fourier(s, 7);
  auto M3 = M.prefix(3);
  CHECK(M3.count() == 3);
  CHECK((M3.rows() - M.rows().topRows(3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("net design covers the sphere and certifies the angle bound") {
  auto s = Space::uniform_periodic(-M_PI, M_PI, 48, NormKind::Sup);
  Subspace V = make_trig_subspace(s, 1);
  NetDesign d = design_net_measurements(V, 0.2);
  CHECK(d.delta_achieved <= 0.2);
  CHECK(d.mu_bound == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(d.op.count() >= V.dim());  // enough nodes to pin a 3-dim subspace
  // every net member is normed by some node: |v_j(node)| = 1
  for (int j = 0; j < d.net_coeffs.cols(); ++j) {
    Vector v = V.combine(d.net_coeffs.col(j));
    CHECK(v.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  }

  // one-dimensional span: a single coordinate functional suffices
  auto seq = Space::sequence(5, NormKind::Sup);
  Subspace E1 = make_coordinate_subspace(seq, {0});
  NetDesign d1 = design_net_measurements(E1, 0.3);
  CHECK(d1.op.count() == 1);
  CHECK(d1.op.point_indices()[0] == 0);
}
