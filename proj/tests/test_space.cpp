#include <doctest.h>

#include <cmath>

#include "core/space.hpp"

using namespace recov;

TEST_CASE("norms on the three ambient kinds") {
  auto sup = Space::sequence(4, NormKind::Sup);
  Vector x(4);
  x << 1.0, -3.0, 2.0, 0.5;
  CHECK(sup->norm(x) == doctest::Approx(3.0).epsilon(1e-15));

  // Hilbert quadrature sanity: ||sin||_L2 over [0, 2pi] is sqrt(pi)
  auto h = Space::uniform_midpoint(0.0, 2.0 * M_PI, 4096, NormKind::Hilbert);
  Vector s(4096);
  for (int i = 0; i < 4096; ++i) s[i] = std::sin(h->nodes()[i]);
  CHECK(h->norm(s) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-4));

  auto l3 = Space::sequence(3, NormKind::Lp, 3.0);
  Vector y(3);
  y << 1.0, 1.0, 1.0;
  CHECK(l3->norm(y) == doctest::Approx(std::pow(3.0, 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("dual norms pair with the primal norm") {
  // point-evaluation functional has dual norm 1 in sup ambient
  auto sup = Space::uniform_periodic(-M_PI, M_PI, 64, NormKind::Sup);
  Vector row = Vector::Zero(64);
  row[10] = 1.0;
  CHECK(sup->dual_norm(row) == doctest::Approx(1.0).epsilon(1e-15));

  // Hilbert: dual norm of <g, .> equals ||g||
  auto h = Space::uniform_midpoint(0.0, 1.0, 128, NormKind::Hilbert);
  Rng rng(7);
  Vector g = rng.normal_vector(128);
  Vector frow = h->weights().cwiseProduct(g);  // functional x -> <g, x>
  CHECK(h->dual_norm(frow) == doctest::Approx(h->norm(g)).epsilon(1e-12));

  // Holder check by brute maximization over random unit vectors: |row.x| <= dual*||x||
  auto lp = Space::sequence(6, NormKind::Lp, 4.0);
  Vector r2 = rng.normal_vector(6);
  const double dual = lp->dual_norm(r2);
  double best = 0.0;
  for (int k = 0; k < 2000; ++k) {
    Vector x = rng.normal_vector(6);
    best = std::max(best, std::abs(r2.dot(x)) / lp->norm(x));
  }
  CHECK(best <= dual * (1.0 + 1e-12));
  CHECK(best >= dual * 0.95);  // sampling gets close in 6 dims
}

TEST_CASE("subspace construction rejects dependent columns") {
  auto s = Space::sequence(5, NormKind::Sup);
  Matrix B(5, 2);
  B.col(0) << 1, 2, 3, 4, 5;
  B.col(1) = 2.0 * B.col(0);
  CHECK_THROWS_AS(Subspace(s, B), StructuralError);
}

TEST_CASE("sup distance: Chebyshev fit of t^2 by {1, t} on [0,1]") {
  auto s = Space::uniform_closed(0.0, 1.0, 2001, NormKind::Sup);
  Subspace V = make_poly_subspace(s, 1);
  Vector x = s->nodes().cwiseAbs2();
  DistanceResult d = dist_to_subspace(x, V);
  // equioscillation oracle: best affine fit to t^2 misses by exactly 1/8
  CHECK(d.value == doctest::Approx(0.125).epsilon(1e-6));
  // residual touches +-value at three nodes (equioscillation certificate)
  Vector res = x - d.best;
  CHECK(res.cwiseAbs().maxCoeff() == doctest::Approx(d.value).epsilon(1e-9));
  int touches = 0;
  for (int i = 0; i < res.size(); ++i)
    if (std::abs(std::abs(res[i]) - d.value) < 1e-7) ++touches;
  CHECK(touches >= 3);
}

TEST_CASE("hilbert distance equals explicit projection") {
  auto s = Space::uniform_midpoint(-1.0, 1.0, 200, NormKind::Hilbert);
  Subspace V = make_poly_subspace(s, 2);
  Rng rng(3);
  Vector x = rng.normal_vector(200);
  DistanceResult d = dist_to_subspace(x, V);
  // any competitor is no better, and the residual is w-orthogonal to V
  Vector r = x - d.best;
  for (int j = 0; j < V.dim(); ++j)
    CHECK(std::abs(s->inner(r, V.basis().col(j))) < 1e-10);
  Vector c2 = d.coeffs + Vector::Ones(3) * 0.01;
  CHECK(s->norm(x - V.combine(c2)) >= d.value);
}

TEST_CASE("lp distance by IRLS beats nearby competitors") {
  auto s = Space::uniform_midpoint(0.0, 1.0, 80, NormKind::Lp, 4.0);
  Subspace V = make_poly_subspace(s, 1);
  Rng rng(11);
  Vector x = rng.normal_vector(80);
  DistanceResult d = dist_to_subspace(x, V);
  CHECK(d.converged);
  Rng probe(5);
  for (int k = 0; k < 50; ++k) {
    Vector c2 = d.coeffs + 1e-3 * probe.normal_vector(2);
    CHECK(s->norm(x - V.combine(c2)) >= d.value - 1e-12);
  }
}

TEST_CASE("l1 distance: median-style fit") {
  // best l1 fit of a constant to values with an outlier tracks the median
  auto s = Space::sequence(5, NormKind::Lp, 1.0);
  Matrix B = Matrix::Ones(5, 1);
  Subspace V(s, B);
  Vector x(5);
  x << 0.0, 1.0, 2.0, 3.0, 100.0;
  DistanceResult d = dist_to_subspace(x, V);
  CHECK(d.coeffs[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("trig subspace on a periodic grid is well conditioned") {
  auto s = Space::uniform_periodic(-M_PI, M_PI, 420, NormKind::Sup);
  Subspace V = make_trig_subspace(s, 3);
  CHECK(V.dim() == 7);
}
