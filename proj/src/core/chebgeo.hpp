#pragma once

#include <string>

#include "core/recover.hpp"

namespace recov {

// Convex test set at desk scale: an explicit vertex list, or a linear system
// over y = (x, aux) whose ambient projection is the set, or - in Hilbert
// ambients - such a system together with a model-ball constraint
// dist(x, span(ball_basis)) <= ball_eps.  The ambient norm comes from the
// attached space.  These sets exist to provide exact ground truth for the
// radius and diameter estimates, not to scale.
class PolytopeSet {
public:
  // Columns are points; at least one required.
  static PolytopeSet from_vertices(SpacePtr s, Matrix points);
  // { y = (x, aux) : eq_A y = eq_b, in_A y <= in_b }; feasibility is probed
  // by a phase-one solve and an infeasible system is rejected.
  static PolytopeSet from_hrep(SpacePtr s, Matrix eq_A, Vector eq_b, Matrix in_A, Vector in_b,
                               int aux_dims);
  // Hilbert slice { x : eq_A x = eq_b, dist(x, span(ball_basis)) <= ball_eps }
  // with the distance in the ambient norm.  Feasibility is the caller's
  // business (an inconsistent equality system is rejected, a dry ball is not).
  static PolytopeSet model_slice(SpacePtr s, Matrix eq_A, Vector eq_b, Matrix ball_basis,
                                 double ball_eps);
  // Tagged-empty set (a data slice no element matches).
  static PolytopeSet empty_set(SpacePtr s);

  const SpacePtr& space() const { return space_; }
  bool empty() const { return empty_; }
  bool has_vertices() const { return verts_.cols() > 0; }
  bool has_ball() const { return ball_eps_ >= 0.0; }
  int ambient_dims() const { return space_->size(); }
  int aux_dims() const { return aux_; }

  // Vertex list (ambient projections, deduplicated).  Polyhedral H-reps are
  // enumerated exactly when ambient + aux dimensions stay <= 6; larger
  // systems and ball slices must use the sampled bounds instead.
  const Matrix& vertices() const;

  // True when every coordinate range over the set is finite.
  bool bounded() const;

  const Matrix& eq_lhs() const { return eq_A_; }
  const Vector& eq_rhs() const { return eq_b_; }
  const Matrix& in_lhs() const { return in_A_; }
  const Vector& in_rhs() const { return in_b_; }
  const Matrix& ball_basis() const { return ball_basis_; }
  double ball_eps() const { return ball_eps_; }

private:
  explicit PolytopeSet(SpacePtr s) : space_(std::move(s)) {}

  SpacePtr space_;
  Matrix verts_;  // columns are ambient points
  Matrix eq_A_, in_A_;
  Vector eq_b_, in_b_;
  int aux_ = 0;
  bool has_hrep_ = false;
  Matrix ball_basis_;
  double ball_eps_ = -1.0;  // < 0 means no ball constraint
  bool empty_ = false;

  mutable Matrix cached_verts_;
  mutable int bounded_state_ = -1;  // -1 unknown, 0 unbounded, 1 bounded
};

// sup over point pairs of their distance.  Exact whenever a vertex list is
// available (the supremum of a convex set is attained at extreme points);
// otherwise a sampled support-direction scan reports a lower bound.
struct DiameterResult {
  double value = 0.0;
  bool exact = false;
  bool unbounded = false;
  std::string method;
};
DiameterResult diameter(const PolytopeSet& S, int samples = 200, uint64_t seed = 0xd1a);

// Smallest ball covering the set: LP over the vertex list for the
// polyhedral norms (with a least-Euclidean-norm tie-break on the center),
// exact minimal enclosing ball in Hilbert ambients.  The restricted variant
// confines the center to the set itself.
struct ChebyshevBall {
  Vector center;
  double radius = 0.0;
  bool exact = false;
  bool unbounded = false;
  bool converged = true;
  std::string method;
};
ChebyshevBall chebyshev_center_radius(const PolytopeSet& S);
ChebyshevBall restricted_radius(const PolytopeSet& S);

// The data slice of the model set: { x : M x = w, dist(x, V) <= eps } as a
// PolytopeSet over (x, model coefficients).  Uniform-norm ambients expand
// the model ball into inequalities; Hilbert ambients keep it quadratic.
// Data no element can match within eps comes back as a tagged empty set.
PolytopeSet build_Kw(const RecoveryProblem& P, const Vector& w);

}  // namespace recov
