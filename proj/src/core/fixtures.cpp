#include "core/fixtures.hpp"

#include <cmath>

#include "core/document.hpp"

namespace recov {
namespace {

TaskSpec mu_task() {
  TaskSpec t;
  t.task = "mu";
  return t;
}

TaskSpec recover_f(Vector f) {
  TaskSpec t;
  t.task = "recover";
  t.has_f = true;
  t.f = std::move(f);
  return t;
}

TaskSpec recover_w(Vector w) {
  TaskSpec t;
  t.task = "recover";
  t.has_w = true;
  t.w = std::move(w);
  return t;
}

// Unit-sum triangle in three coordinates: the running exact-geometry example
// (diameter 1, free radius 1/2, member-constrained radius 2/3).
ProblemDocument example_2_4() {
  ProblemDocument doc;
  doc.space = {"sequence", 0, 1, 3, "sup", 2.0, {}, {}};
  doc.subspace.preset = "coordinates";
  doc.subspace.indices = {0};
  doc.measurements.kind = "general";
  doc.measurements.rows = Matrix::Ones(1, 3);
  doc.epsilon = 1.0;
  TaskSpec geo;
  geo.task = "geometry";
  geo.has_vertices = true;
  geo.vertices = Matrix(3, 3);
  geo.vertices.col(0) << 1, 1, 0;
  geo.vertices.col(1) << 1, 0, 1;
  geo.vertices.col(2) << 0, 1, 1;
  doc.tasks = {geo};
  return doc;
}

// The same triangle realized as a data slice in four sup coordinates:
// first row pins the model coordinate, second row carries the data.
ProblemDocument example_2_4_embedded() {
  ProblemDocument doc;
  doc.space = {"sequence", 0, 1, 4, "sup", 2.0, {}, {}};
  doc.subspace.preset = "coordinates";
  doc.subspace.indices = {0};
  doc.measurements.kind = "general";
  doc.measurements.rows = Matrix::Zero(2, 4);
  doc.measurements.rows(0, 0) = 1;
  doc.measurements.rows.row(1) << 0, 1, 1, 1;
  doc.epsilon = 1.0;
  TaskSpec geo;
  geo.task = "geometry";
  geo.has_w = true;
  geo.w = Vector(2);
  geo.w << 0, 2;
  doc.tasks = {geo};
  return doc;
}

// Degree-one trigonometric model sampled at twice as many equispaced points
// as its dimension; angle constants, one recovery, and a two-stage sweep.
ProblemDocument trig_doubled() {
  ProblemDocument doc;
  const int grid = 24;
  doc.space = {"periodic", 0.0, 2 * M_PI, grid, "sup", 2.0, {}, {}};
  doc.subspace.preset = "trig";
  doc.subspace.degree = 1;
  doc.measurements.kind = "point_eval_indices";
  doc.measurements.indices = {0, 4, 8, 12, 16, 20};
  doc.epsilon = 0.1;

  const SpacePtr s = build_space(doc.space);
  Vector f(grid);
  for (int i = 0; i < grid; ++i) {
    const double t = s->nodes()[i];
    f[i] = 0.3 + 0.5 * std::cos(t) - 0.2 * std::sin(t) + 0.05 * std::cos(2 * t);
  }

  TaskSpec sweep;
  sweep.task = "sweep";
  SubspaceSpec lv0, lv1;
  lv0.preset = "trig";
  lv0.degree = 0;
  lv1.preset = "trig";
  lv1.degree = 1;
  sweep.family.levels = {lv0, lv1};
  sweep.family.accuracy.preset = "custom";
  sweep.family.accuracy.epsilons = {0.6, 0.1};
  sweep.schedule.preset = "counts";
  sweep.schedule.counts = {3, 6};
  sweep.probe = f;

  doc.tasks = {mu_task(), recover_f(f), sweep};
  return doc;
}

// Single sign-pattern model in L1 over a dyadic grid, measured by the full
// sign-pattern family; the default pipeline pairs the L1 fit with the
// product lifting.
ProblemDocument rademacher_riesz() {
  ProblemDocument doc;
  const int grid = 64;  // deviation-norm angle intervals get expensive fast
  doc.space = {"midpoint", 0.0, 1.0, grid, "lp", 1.0, {}, {}};
  const SpacePtr s = build_space(doc.space);
  doc.subspace.preset = "explicit";
  doc.subspace.basis = Matrix(grid, 1);
  for (int i = 0; i < grid; ++i) {
    // The first measurement row's own sign pattern (flips every quarter), so
    // the model is visible to the rows and orthogonal to all later patterns.
    const long long cell = static_cast<long long>(std::floor(4.0 * s->nodes()[i]));
    doc.subspace.basis(i, 0) = (cell % 2 == 0) ? 1.0 : -1.0;
  }
  doc.measurements.kind = "rademacher";
  doc.measurements.m = 4;
  doc.epsilon = 0.2;
  Vector w(4);
  w << 0.4, 0.1, -0.05, 0.02;
  doc.tasks = {mu_task(), recover_w(w)};
  return doc;
}

// Quadratic model in a weighted-mean-square ambient with eight point
// samples; least-squares fit recovers an in-model element exactly.
ProblemDocument hilbert_ls() {
  ProblemDocument doc;
  const int grid = 64;
  doc.space = {"closed", 0.0, 1.0, grid, "hilbert", 2.0, {}, {}};
  doc.subspace.preset = "poly";
  doc.subspace.degree = 2;
  doc.measurements.kind = "point_eval_indices";
  doc.measurements.indices = {0, 9, 18, 27, 36, 45, 54, 63};
  doc.epsilon = 0.05;

  const SpacePtr s = build_space(doc.space);
  Vector f(grid);
  for (int i = 0; i < grid; ++i) {
    const double x = s->nodes()[i];
    f[i] = 0.2 + x - 0.3 * x * x;
  }

  TaskSpec sweep;
  sweep.task = "sweep";
  for (int d = 0; d <= 2; ++d) {
    SubspaceSpec lv;
    lv.preset = "poly";
    lv.degree = d;
    sweep.family.levels.push_back(lv);
  }
  sweep.family.accuracy.preset = "custom";
  sweep.family.accuracy.epsilons = {0.4, 0.12, 0.05};
  sweep.schedule.preset = "counts";
  sweep.schedule.counts = {3, 5, 8};
  sweep.probe = f;

  doc.tasks = {mu_task(), recover_f(f), sweep};
  return doc;
}

// One visible coordinate against functionals that can never norm it: the
// kernel keeps distance 1/2 while the angle constant sits at 2.
ProblemDocument l1_totality() {
  ProblemDocument doc;
  const int grid = 24, m = 5;
  doc.space = {"sequence", 0, 1, grid, "lp", 1.0, {}, {}};
  doc.subspace.preset = "coordinates";
  doc.subspace.indices = {0};
  doc.measurements.kind = "general";
  Matrix rows = Matrix::Zero(m, grid);
  rows(0, 0) = 1.0;
  for (int j = 1; j < grid; ++j) rows(0, j) = -2.0;
  for (int k = 1; k < m; ++k) rows(k, k) = 1.0;
  doc.measurements.rows = rows;
  doc.epsilon = 0.25;
  doc.tasks = {mu_task()};
  return doc;
}

// Two-dimensional space of first harmonics under the uniform norm (sampling
// the unit circle's linear functionals); includes a net-design task.
ProblemDocument sphere_linear() {
  ProblemDocument doc;
  const int grid = 64;
  doc.space = {"periodic", 0.0, 2 * M_PI, grid, "sup", 2.0, {}, {}};
  const SpacePtr s = build_space(doc.space);
  doc.subspace.preset = "explicit";
  doc.subspace.basis = Matrix(grid, 2);
  for (int i = 0; i < grid; ++i) {
    doc.subspace.basis(i, 0) = std::cos(s->nodes()[i]);
    doc.subspace.basis(i, 1) = std::sin(s->nodes()[i]);
  }
  doc.measurements.kind = "point_eval_indices";
  doc.measurements.indices = {0, 8, 16, 24, 32, 40, 48, 56};
  doc.epsilon = 0.05;

  Vector f(grid);
  for (int i = 0; i < grid; ++i)
    f[i] = 0.8 * std::cos(s->nodes()[i]) + 0.6 * std::sin(s->nodes()[i]);

  TaskSpec design;
  design.task = "design";
  design.delta = 0.2;

  doc.tasks = {mu_task(), design, recover_f(f)};
  return doc;
}

// Small Euclidean slice with a strict model misfit: the exact ellipsoid
// diameter is compared against the convexity/smoothness envelope, and the
// geometry task reports the same slice through the eigensolve route.
ProblemDocument sandwich_hilbert() {
  ProblemDocument doc;
  doc.space = {"sequence", 0, 1, 5, "hilbert", 2.0, {}, {}};
  doc.subspace.preset = "explicit";
  doc.subspace.basis = Matrix(5, 2);
  doc.subspace.basis.col(0) << 1, 0, 1, 0, 1;
  doc.subspace.basis.col(1) << 0, 1, 1, 0, 1;
  doc.measurements.kind = "general";
  doc.measurements.rows = Matrix(3, 5);
  doc.measurements.rows.row(0) << 1, 0, 0, 1, 0;
  doc.measurements.rows.row(1) << 0, 1, 0, 0, 1;
  doc.measurements.rows.row(2) << 0, 0, 1, 1, 1;
  doc.epsilon = 1.0;

  // Data of a model element nudged along the fourth coordinate (invisible to
  // the model, visible to the rows): a strictly interior nonempty slice.
  Vector w(3);
  w << 1.3, 0.2, 1.5;

  TaskSpec sandwich;
  sandwich.task = "sandwich";
  sandwich.has_w = true;
  sandwich.w = w;

  TaskSpec geo;
  geo.task = "geometry";
  geo.has_w = true;
  geo.w = w;

  doc.tasks = {mu_task(), sandwich, geo};
  return doc;
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"example_2_4", "example_2_4_embedded", "trig_doubled", "rademacher_riesz",
          "hilbert_ls",  "l1_totality",          "sphere_linear", "sandwich_hilbert"};
}

std::string fixture_document(const std::string& name) {
  ProblemDocument doc;
  if (name == "example_2_4") {
    doc = example_2_4();
  } else if (name == "example_2_4_embedded") {
    doc = example_2_4_embedded();
  } else if (name == "trig_doubled") {
    doc = trig_doubled();
  } else if (name == "rademacher_riesz") {
    doc = rademacher_riesz();
  } else if (name == "hilbert_ls") {
    doc = hilbert_ls();
  } else if (name == "l1_totality") {
    doc = l1_totality();
  } else if (name == "sphere_linear") {
    doc = sphere_linear();
  } else if (name == "sandwich_hilbert") {
    doc = sandwich_hilbert();
  } else {
    throw StructuralError("unknown fixture '" + name + "'");
  }
  return serialize_document(doc);
}

}  // namespace recov
