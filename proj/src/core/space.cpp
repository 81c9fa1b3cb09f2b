#include "core/space.hpp"

#include <cmath>
#include <cstdio>

#include "core/solvers.hpp"

namespace recov {

std::string fmt12(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Space::Space(Vector nodes, Vector weights, NormKind k, double p, bool periodic, double a, double b)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), kind_(k), p_(p),
      periodic_(periodic), a_(a), b_(b) {
  require(nodes_.size() == weights_.size(), "space: node/weight size mismatch");
  require(nodes_.size() > 0, "space: empty grid");
  require((weights_.array() > 0).all(), "space: weights must be positive");
  if (kind_ == NormKind::Lp) require(p_ >= 1.0 && std::isfinite(p_), "space: Lp needs 1 <= p < inf");
  if (kind_ == NormKind::Hilbert) p_ = 2.0;
}

SpacePtr Space::uniform_closed(double a, double b, int n, NormKind k, double p) {
  require(n >= 2 && b > a, "uniform_closed: bad grid");
  Vector nodes(n), w(n);
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) nodes[i] = a + h * i;
  w.setConstant(h);
  w[0] = w[n - 1] = h / 2.0;  // trapezoid rule
  return SpacePtr(new Space(std::move(nodes), std::move(w), k, p, false, a, b));
}

SpacePtr Space::uniform_periodic(double a, double b, int n, NormKind k, double p) {
  require(n >= 1 && b > a, "uniform_periodic: bad grid");
  Vector nodes(n), w(n);
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) nodes[i] = a + h * i;
  w.setConstant(h);
  return SpacePtr(new Space(std::move(nodes), std::move(w), k, p, true, a, b));
}

SpacePtr Space::uniform_midpoint(double a, double b, int n, NormKind k, double p) {
  require(n >= 1 && b > a, "uniform_midpoint: bad grid");
  Vector nodes(n), w(n);
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) nodes[i] = a + h * (i + 0.5);
  w.setConstant(h);
  return SpacePtr(new Space(std::move(nodes), std::move(w), k, p, false, a, b));
}

SpacePtr Space::sequence(int n, NormKind k, double p) {
  require(n >= 1, "sequence: bad size");
  Vector nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = i;
  return SpacePtr(new Space(std::move(nodes), Vector::Ones(n), k, p, false, 0, n - 1));
}

SpacePtr Space::custom(Vector nodes, Vector weights, NormKind k, double p) {
  const double a = nodes.size() ? nodes.minCoeff() : 0.0;
  const double b = nodes.size() ? nodes.maxCoeff() : 0.0;
  return SpacePtr(new Space(std::move(nodes), std::move(weights), k, p, false, a, b));
}

double Space::norm(const Vector& values) const {
  require(values.size() == nodes_.size(), "norm: wrong length");
  switch (kind_) {
    case NormKind::Sup:
      return values.cwiseAbs().maxCoeff();
    case NormKind::Hilbert:
      return std::sqrt(weights_.dot(values.cwiseAbs2()));
    case NormKind::Lp: {
      if (p_ == 1.0) return weights_.dot(values.cwiseAbs());
      double s = 0.0;
      for (int i = 0; i < values.size(); ++i)
        s += weights_[i] * std::pow(std::abs(values[i]), p_);
      return std::pow(s, 1.0 / p_);
    }
  }
  return 0.0;
}

double Space::dual_norm(const Vector& row) const {
  require(row.size() == nodes_.size(), "dual_norm: wrong length");
  // The functional acts as row . values = sum w_i (row_i / w_i) values_i, so
  // its norm is the weighted p'-norm of the density row / w.
  switch (kind_) {
    case NormKind::Sup:
      return row.cwiseAbs().sum();  // p' = 1 with the weights cancelling
    case NormKind::Hilbert:
      return std::sqrt((row.cwiseAbs2().cwiseQuotient(weights_)).sum());
    case NormKind::Lp: {
      if (p_ == 1.0) return (row.cwiseQuotient(weights_)).cwiseAbs().maxCoeff();
      const double q = p_ / (p_ - 1.0);
      double s = 0.0;
      for (int i = 0; i < row.size(); ++i)
        s += weights_[i] * std::pow(std::abs(row[i]) / weights_[i], q);
      return std::pow(s, 1.0 / q);
    }
  }
  return 0.0;
}

double Space::inner(const Vector& x, const Vector& y) const {
  require(kind_ == NormKind::Hilbert, "inner: Hilbert spaces only");
  return (weights_.cwiseProduct(x)).dot(y);
}

Subspace::Subspace(SpacePtr space, Matrix basis) : space_(std::move(space)), basis_(std::move(basis)) {
  require(basis_.rows() == space_->size(), "subspace: basis rows must match grid");
  require(basis_.cols() >= 1, "subspace: empty basis");
  require(basis_.cols() <= basis_.rows(), "subspace: more columns than grid points");
  Vector sw = space_->weights().array().sqrt();
  Matrix W = sw.asDiagonal() * basis_;
  Eigen::ColPivHouseholderQR<Matrix> qr(W);
  qr.setThreshold(kRankTol);
  require(qr.rank() == basis_.cols(), "subspace: basis columns are dependent");
  // orthonormal (in the weighted inner product) basis for Hilbert work
  Eigen::HouseholderQR<Matrix> plain(W);
  Matrix Q = plain.householderQ() * Matrix::Identity(W.rows(), basis_.cols());
  ortho_ = sw.cwiseInverse().asDiagonal() * Q;
}

DistanceResult dist_to_subspace(const Vector& x, const Subspace& V) {
  const Space& s = *V.space();
  require(x.size() == s.size(), "dist_to_subspace: wrong length");
  DistanceResult out;
  switch (s.kind()) {
    case NormKind::Sup: {
      FitResult f = minimax_fit(x, V.basis());
      out.value = f.value;
      out.coeffs = f.coeffs;
      out.method = "lp-dual";
      out.iterations = f.iterations;
      break;
    }
    case NormKind::Hilbert: {
      // orthogonal projection in the weighted inner product
      const Matrix& Q = V.orthonormal_basis();
      Vector wx = s.weights().cwiseProduct(x);
      Vector proj_coeffs = Q.transpose() * wx;
      Vector best = Q * proj_coeffs;
      out.value = s.norm(x - best);
      out.coeffs = least_squares(V.basis(), best);
      out.method = "projection";
      break;
    }
    case NormKind::Lp: {
      if (s.p() == 1.0) {
        FitResult f = weighted_l1_fit(x, V.basis(), s.weights());
        out.value = f.value;
        out.coeffs = f.coeffs;
        out.method = "lp-l1";
        out.iterations = f.iterations;
      } else {
        FitResult f = pnorm_fit(x, V.basis(), s.weights(), s.p());
        out.value = f.value;
        out.coeffs = f.coeffs;
        out.method = "irls";
        out.iterations = f.iterations;
        out.converged = f.converged;
      }
      break;
    }
  }
  out.best = V.basis() * out.coeffs;
  return out;
}

Subspace make_trig_subspace(const SpacePtr& s, int degree) {
  require(degree >= 0, "trig subspace: negative degree");
  const int N = s->size();
  Matrix B(N, 2 * degree + 1);
  B.col(0).setOnes();
  for (int k = 1; k <= degree; ++k)
    for (int i = 0; i < N; ++i) {
      B(i, 2 * k - 1) = std::cos(k * s->nodes()[i]);
      B(i, 2 * k) = std::sin(k * s->nodes()[i]);
    }
  return Subspace(s, std::move(B));
}

Subspace make_poly_subspace(const SpacePtr& s, int degree) {
  require(degree >= 0, "poly subspace: negative degree");
  const int N = s->size();
  const double a = s->domain_a(), b = s->domain_b();
  Matrix B(N, degree + 1);
  for (int i = 0; i < N; ++i) {
    // Chebyshev recurrence on the domain mapped to [-1,1]
    const double t = (b > a) ? (2.0 * (s->nodes()[i] - a) / (b - a) - 1.0) : 0.0;
    double t0 = 1.0, t1 = t;
    B(i, 0) = 1.0;
    if (degree >= 1) B(i, 1) = t;
    for (int k = 2; k <= degree; ++k) {
      const double t2 = 2.0 * t * t1 - t0;
      B(i, k) = t2;
      t0 = t1;
      t1 = t2;
    }
  }
  return Subspace(s, std::move(B));
}

Subspace make_coordinate_subspace(const SpacePtr& s, const std::vector<int>& idx) {
  require(!idx.empty(), "coordinate subspace: empty index set");
  Matrix B = Matrix::Zero(s->size(), static_cast<int>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) {
    require(idx[k] >= 0 && idx[k] < s->size(), "coordinate subspace: index out of range");
    B(idx[k], static_cast<int>(k)) = 1.0;
  }
  return Subspace(s, std::move(B));
}

}  // namespace recov
