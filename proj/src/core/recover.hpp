#pragma once

#include <optional>
#include <vector>

#include "core/angles.hpp"
#include "core/approx.hpp"
#include "core/lift.hpp"

namespace recov {

// One estimation instance: ambient space, model subspace V, measurement map
// M, and (optionally) the model accuracy epsilon.  The reconstruction itself
// never reads epsilon; it only enters the a-priori certificates, so reports
// built with epsilon = 0 simply carry a vacuous global bound.
class RecoveryProblem {
public:
  RecoveryProblem(MeasurementOperator M, Subspace V, double epsilon = 0.0);

  const MeasurementOperator& op() const { return M_; }
  const Subspace& subspace() const { return V_; }
  const SpacePtr& space() const { return V_.space(); }
  double epsilon() const { return eps_; }

  // Angle constants of (V, ker M), computed on first use and cached.
  const AngleReport& angles() const;

private:
  MeasurementOperator M_;
  Subspace V_;
  double eps_;
  mutable std::optional<AngleReport> angles_;
};

// What one reconstruction produced, together with the measured quantities
// every certificate row is built from.
struct RecoveryReport {
  Element reconstruction;  // the estimate itself
  Element v_component;     // model part: the subspace element fitted to w
  Vector v_coeffs;         // its coefficients in the V basis

  double data_residual = 0.0;   // max_j |(M reconstruction - w)_j|
  double model_distance = 0.0;  // dist(reconstruction, V) in the ambient norm
  double data_fit_error = 0.0;  // achieved ||w - fit|| in the data norm

  double near_best_lambda = 1.0;  // constant of the approximation map used
  double lift_norm = 1.0;         // norm bound of the lifting used
  double mu = 0.0;                // mu(ker M, V), upper end when an interval

  double bound_instance = 0.0;  // 4 lambda ||lift|| mu * data_fit_error
  double bound_global = 0.0;    // 4 lambda ||lift|| epsilon mu
  bool bounds_infinite = false;

  bool corrected = true;  // false for the V-restricted variant
};

// Full reconstruction: fit the data by the image of V, pull the fit back to
// the subspace, and add the lifted data misfit so the estimate reproduces w
// exactly.  The fit map and lifting must be built over the same measurements
// (and the fit map over the same subspace) as the problem.
RecoveryReport recover(const RecoveryProblem& P, const Vector& w, const ApproxMap& fit,
                       const Lifting& lift);

// V-restricted variant: the lifted correction is dropped, so the estimate
// stays in the model subspace and no longer interpolates the data.  Its
// error exceeds the corrected estimate's by at most the norm of a minimal
// lifting times the data misfit.
RecoveryReport recover_into_V(const RecoveryProblem& P, const Vector& w, const ApproxMap& fit);

// One certificate check: a measured value against the bound the theory
// promises.  Failed checks come back as rows with passed = false, never as
// exceptions.  An infinite bound marks a purely informational row.
struct CertificateRow {
  std::string check;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

// Certificate table for a report: data consistency, membership of the
// estimate in the inflated model set, the a-priori global bound, and - when
// the true element is supplied - the actual error and the instance
// optimality ratio (which the theory caps at 1).
std::vector<CertificateRow> certify(const RecoveryProblem& P, const RecoveryReport& rep,
                                    const Element* f_true = nullptr);

// Default pairings per ambient: uniform norm -> minimax fit with a
// disjoint-support dual basis; Hilbert -> least squares with the representer
// lifting; L_p -> p-norm fit with an indicator dual basis (sign-pattern
// averages pair with the product lifting instead).
ApproxMap default_approx_map(const RecoveryProblem& P);
Lifting default_lifting(const RecoveryProblem& P);

}  // namespace recov
