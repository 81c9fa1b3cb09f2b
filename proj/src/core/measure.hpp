#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/space.hpp"

namespace recov {

// How the functional rows were constructed.  The kind is what certifies the
// closed-form measurement norms; anything assembled from raw rows is General
// and always goes through optimization.
enum class MeasureKind { PointEval, DisjointAvg, Rademacher, Fourier, General };

// A finite list of independent functionals l_j on the ambient space, stored
// as coefficient rows acting by rows() * values.  Quadrature weights are
// baked into the rows of integral functionals; point evaluations are plain
// coordinate selectors.
class MeasurementOperator {
public:
  // l_j(f) = f(P_j); each point must sit on a grid node (1e-9 tolerance).
  static MeasurementOperator point_eval(SpacePtr s, const std::vector<double>& points);
  static MeasurementOperator point_eval_indices(SpacePtr s, std::vector<int> idx);
  // l_j(f) = int f g_j with g_j constant on its support block, blocks pairwise
  // disjoint, each row scaled to unit dual norm.
  static MeasurementOperator disjoint_avg(SpacePtr s, const std::vector<std::vector<int>>& supports);
  // l_j(f) = int f r_j with r_j the j-th Rademacher function (sign of a
  // dyadic sawtooth), j = 1..m.  Needs a midpoint grid with a multiple of
  // 2^(m+1) equal cells so every r_j is exactly piecewise constant.
  static MeasurementOperator rademacher(SpacePtr s, int m);
  // Fourier coefficients 1/(2pi) int f, (1/pi) int f cos kt, (1/pi) int f sin kt,
  // in frequency order, m rows total.  Needs a periodic grid.
  static MeasurementOperator fourier(SpacePtr s, int m);
  static MeasurementOperator general(SpacePtr s, Matrix rows);

  const SpacePtr& space() const { return space_; }
  const Matrix& rows() const { return rows_; }
  int count() const { return static_cast<int>(rows_.rows()); }
  MeasureKind kind() const { return kind_; }
  const std::vector<int>& point_indices() const { return point_idx_; }

  Vector apply(const Vector& values) const;

  // Orthonormal basis of ker M (N x (N-m)); computed once on first use.
  // Large grids should prefer the projector-based paths in the angle module,
  // which never materialize this.
  const Matrix& nullspace_basis() const;

  // First k rows as a nested operator (measurement schedules).
  MeasurementOperator prefix(int k) const;

private:
  MeasurementOperator(SpacePtr s, Matrix rows, MeasureKind k, std::vector<int> idx);

  SpacePtr space_;
  Matrix rows_;
  MeasureKind kind_;
  std::vector<int> point_idx_;  // PointEval only
  mutable std::optional<Matrix> null_basis_;
};

// Norm the data vector w inherits from the ambient space: the infimum of
// ||x|| over the coset {x : M x = w}.  Closed forms are used only where the
// construction kind certifies them; everything else is solved.
struct MNormResult {
  double value = 0.0;
  Vector minimizer;     // a coset element attaining the value (within tol)
  std::string method;
  bool converged = true;
};
MNormResult m_norm_detail(const MeasurementOperator& M, const Vector& w);
double m_norm(const MeasurementOperator& M, const Vector& w);

// True when the data-norm unit ball is certified to be the cube [-1,1]^m
// (point evaluations / disjoint averages in a SUP ambient, sign-pattern
// averages in L_1).  Vertex enumeration is exact only in these cases.
bool m_norm_ball_is_cube(const MeasurementOperator& M);

// Dual pairing norm of a coefficient vector: the ambient dual norm of the
// combined functional sum_j alpha_j l_j.
double m_dual_norm(const MeasurementOperator& M, const Vector& alpha);

// Values of the Riesz-type product prod_j (1 + w_j r_j(t)) on the cells of a
// Rademacher operator, scaled so that applying M returns w exactly and the
// L1 norm equals max_j |w_j|.  Shared by the lifting module.
Vector riesz_product_values(const MeasurementOperator& M, const Vector& w);

// Greedy delta-net functional design on the unit sphere of V (sup ambient):
// picks signed point evaluations at the norming node of each net member,
// dedupes nodes, and certifies mu(N, V) <= 2 / (1 - delta).
struct NetDesign {
  MeasurementOperator op;
  Matrix net_coeffs;       // one column per net member (subspace coefficients)
  double delta_requested = 0.0;
  double delta_achieved = 0.0;  // covering radius over the candidate cloud
  double mu_bound = 0.0;
  int candidates = 0;
};
NetDesign design_net_measurements(const Subspace& V, double delta);

}  // namespace recov
