#pragma once

#include <string>
#include <vector>

#include "core/recover.hpp"

namespace recov {

enum class FamilyPreset { LipAlpha, Bernstein, Custom };

// Nested model scale V_0 c V_1 c ... with per-level accuracies eps_n.
// Construction verifies the nesting (every basis column of a level lies in
// the span of the next, residual <= 1e-9 relative) and that the accuracies
// are positive and nonincreasing.
class NestedFamily {
 public:
  // eps_n = C (n+1)^(-alpha): algebraic decay presets.
  static NestedFamily lip_alpha(std::vector<Subspace> spaces, double C, double alpha);
  // eps_n = C rho^(-n), rho > 1: geometric decay presets.
  static NestedFamily bernstein(std::vector<Subspace> spaces, double C, double rho);
  static NestedFamily custom(std::vector<Subspace> spaces, std::vector<double> epsilons);

  int count() const { return static_cast<int>(spaces_.size()); }
  const SpacePtr& space() const { return spaces_.front().space(); }
  const Subspace& level(int n) const;
  double epsilon(int n) const;
  FamilyPreset preset() const { return preset_; }

 private:
  NestedFamily(std::vector<Subspace> spaces, std::vector<double> eps, FamilyPreset preset);

  std::vector<Subspace> spaces_;
  std::vector<double> eps_;
  FamilyPreset preset_;
};

// Model-order selection for a fixed measurement set: minimize
// mu(V_n, ker M) * eps_n over the levels with dim V_n <= row count, ties
// broken toward the smaller level.  Every level infinite (or inadmissible)
// is an error.
struct SelectResult {
  int n_star = 0;
  double score = 0.0;  // mu * eps at the winner
  double mu = 0.0;     // mu(V_n*, ker M)
};
SelectResult select_n(const NestedFamily& F, const MeasurementOperator& M);

// One progressive-sampling experiment: per measurement stage, the selected
// level, its angle constant, the a-priori error bound of the default
// pipeline, the achieved recovery error for the probe, and the norming
// constant of the stage's functionals on the selected level.
struct SweepRow {
  int m = 0;
  int n_of_m = 0;
  double mu = 0.0;
  double epsilon = 0.0;
  double bound = 0.0;
  double actual_error = 0.0;
  double gamma = 0.0;
};
struct SweepTable {
  std::vector<SweepRow> rows;
  // Errors trended to (near) zero: final achieved error <= 1e-3 relative to
  // the probe's norm.
  bool converged = false;

  // Header "m,n_of_m,mu,epsilon,bound,actual_error,gamma"; 12-significant-
  // digit values, one row per stage.
  std::string to_csv() const;
};
// The schedule must be nested: each stage's rows extend the previous
// stage's.  The probe is recovered at every stage with the default fit and
// lifting for (M_m, V_{n(m)}, eps_{n(m)}).
SweepTable sweep(const NestedFamily& F, const std::vector<MeasurementOperator>& schedule,
                 const Vector& f_probe);

// Largest gamma such that the span of the measurement functionals, cut to
// its dual unit ball, norms every unit vector of V at level gamma:
//   gamma = min { sup { |l(v)| : l in span(rows), ||l||* <= 1 } : v in V,
//   ||v|| = 1 }.
// By duality of the minimal-filling data norm this equals 1/||M_V^{-1}||.
// SUP ambients solve support LPs per coordinate, Hilbert ambients a
// generalized eigenproblem.  Returns 0 when V meets the kernel.
double gamma_norming(const MeasurementOperator& M, const Subspace& V);

// Randomized central-difference estimate of the recovery map's stability:
// max over k base points and k unit directions of
// ||R(f + h g) - R(f - h g)|| / (2 h).  R uses the supplied fit, and the
// lifted correction when a lifting is given (pass nullptr for the
// V-restricted variant).  The structural column is the Lipschitz product
// bound ||M_V^{-1}|| * Lip(fit) (+ lifting term), with Lip(fit) = 1 for the
// Hilbert fit and the linear-projector reference sqrt(dim V) otherwise.
// The value is a sampled estimate of a limit, hence the fixed label.
struct ConditionEstimate {
  double estimate = 0.0;
  double structural = 0.0;
  double h = 1e-6;
  int samples = 0;
  std::string label = "estimate";
};
ConditionEstimate condition_estimate(const RecoveryProblem& P, const ApproxMap& fit,
                                     const Lifting* lift, int k, double h = 1e-6,
                                     uint64_t seed = 0xc0de);

// Totality-without-norming demonstration in a truncated ell_1 sequence
// space: the functional family l_1 = e_1* - a * sum_{j >= 2} e_j*,
// l_k = e_k* (2 <= k <= m) is total, yet dist(e_1, ker M_m) = 1/a and
// mu(span{e_1}, ker M_m) = a for every m, so no stage count drives the
// angle constant below a.  The distance comes from a kernel-basis LP, the
// angle constant from the independent minimal-filling LP.
struct TotalityRow {
  int n_trunc = 0;
  double dist = 0.0;
  double mu = 0.0;
};
struct TotalityReport {
  double a = 0.0;
  int m = 0;
  int n_trunc = 0;
  double dist = 0.0;
  double mu = 0.0;
  double expected_dist = 0.0;  // 1/a
  std::vector<TotalityRow> truncation_sweep;
  bool truncated_warning = false;   // margin below m + 3
  double extrapolated_dist = 0.0;   // carried when the warning is set
};
TotalityReport l1_totality_demo(double a, int m, int n_trunc);

}  // namespace recov
