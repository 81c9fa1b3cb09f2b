#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/recover.hpp"
#include "core/samplab.hpp"

namespace recov {

// Declarative problem documents: a JSON description of one estimation
// instance (space, model subspace, measurements, pipeline) plus a list of
// tasks to run against it.  Parsing is strict (unknown keys and malformed
// shapes are rejected); serialization is canonical (fixed key order, twelve
// significant digits), so parse -> serialize -> parse is the identity.

struct SpaceSpec {
  std::string grid = "sequence";  // closed | periodic | midpoint | sequence | custom
  double a = 0.0, b = 1.0;        // uniform-grid endpoints
  int n = 0;                      // grid size
  std::string norm = "sup";       // sup | lp | hilbert
  double p = 2.0;                 // lp exponent
  Vector nodes, weights;          // custom grids only
};

struct SubspaceSpec {
  std::string preset = "explicit";  // trig | poly | coordinates | explicit
  int degree = 0;                   // trig | poly
  std::vector<int> indices;         // coordinates
  Matrix basis;                     // explicit: columns span the model
};

struct MeasurementSpec {
  // point_eval | point_eval_indices | disjoint_avg | rademacher | fourier | general
  std::string kind = "general";
  std::vector<double> points;
  std::vector<int> indices;
  std::vector<std::vector<int>> supports;
  int m = 0;      // rademacher | fourier row count
  Matrix rows;    // general: one functional per row
};

struct AlgorithmSpec {
  std::string fit = "default";   // default | minimax | least_squares | pnorm
  double fit_p = 2.0;
  std::string lift = "default";  // default | dual_basis | orthonormal | min_norm | riesz_product
  double lift_p = 2.0;
  Matrix psi;                    // dual_basis columns (one per measurement)
};

struct AccuracySpec {
  std::string preset = "custom";  // lip_alpha | bernstein | custom
  double C = 1.0, alpha = 1.0, rho = 2.0;
  std::vector<double> epsilons;   // custom
};

struct FamilySpec {
  std::vector<SubspaceSpec> levels;
  AccuracySpec accuracy;
};

struct ScheduleSpec {
  std::string preset = "counts";  // counts | doubling | fourier
  int start = 1;                  // doubling: first prefix size
  int stages = 0;                 // doubling (0 = until the rows run out) | fourier
  std::vector<int> counts;        // counts: prefix row counts of the document measurements
};

struct TaskSpec {
  std::string task;  // recover | mu | geometry | sweep | sandwich | design
  bool has_w = false, has_f = false, has_vertices = false;
  Vector w;          // recover | geometry | sandwich: data vector
  Vector f;          // recover: sample the data from an ambient element instead
  Matrix vertices;   // geometry: explicit vertex set instead of the data slice
  FamilySpec family;      // sweep
  ScheduleSpec schedule;  // sweep
  Vector probe;           // sweep: ambient element driving the stages
  double delta = 0.0;     // design: net fineness
};

struct OutputSpec {
  std::string report = "report.json";  // report file name
  std::string csv_prefix;              // prepended to every table file name
};

struct ProblemDocument {
  SpaceSpec space;
  SubspaceSpec subspace;
  MeasurementSpec measurements;
  double epsilon = 0.0;
  AlgorithmSpec algorithm;
  std::vector<TaskSpec> tasks;
  OutputSpec output;
  bool export_rows = false;  // also emit the functional rows as a table
};

// Strict parse of a JSON document; StructuralError on any schema violation.
ProblemDocument parse_document(const std::string& json_text);
// Canonical serialization (fixed key order, 12 significant digits).
std::string serialize_document(const ProblemDocument& doc);

// Spec-to-object builders, each validating its own piece.
SpacePtr build_space(const SpaceSpec& spec);
Subspace build_subspace(const SpacePtr& s, const SubspaceSpec& spec);
MeasurementOperator build_measurements(const SpacePtr& s, const MeasurementSpec& spec);
ApproxMap build_fit(const RecoveryProblem& P, const AlgorithmSpec& spec);
Lifting build_lift(const RecoveryProblem& P, const AlgorithmSpec& spec);

struct CsvTable {
  std::string name;  // file name (csv_prefix + stem + ".csv")
  std::string text;
};

struct RunOutcome {
  int exit_code = 0;    // 0 success, 2 validation error, 3 solver failure
  std::string report;   // report document (JSON text), always present
  std::string report_name = "report.json";  // requested output file name
  std::vector<CsvTable> tables;
  std::string error;    // first failure message (empty on success)
};

// Execute the tasks in order.  The first failure aborts the remaining tasks
// and the report carries a partial flag plus the failure message; validation
// problems (schema, inconsistent dimensions, a model direction the rows
// cannot see) map to exit 2 and solver breakdowns to exit 3.  The seed feeds
// only Monte-Carlo subroutines (sampled diameters, ascent restarts), so runs
// with equal documents and seeds produce byte-identical outputs.
RunOutcome run_document(const ProblemDocument& doc, uint64_t seed = 0);
// Parse-then-run convenience; parse failures produce an exit-2 outcome.
RunOutcome run_document_text(const std::string& json_text, uint64_t seed = 0);

}  // namespace recov
