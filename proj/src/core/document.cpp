#include "core/document.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "core/angles.hpp"
#include "core/chebgeo.hpp"
#include "core/moduli.hpp"

namespace recov {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic JSON emitter.  nlohmann's serializer uses shortest-round-trip
// number formatting; reports instead pin every float to fmt12 so identical
// inputs yield byte-identical bytes.  Compact output, fixed key order (the
// caller's call order), minimal escaping.

class JsonOut {
 public:
  void obj_begin() { pre(); text_ += '{'; fresh_.push_back(true); }
  void obj_end() { text_ += '}'; fresh_.pop_back(); }
  void arr_begin() { pre(); text_ += '['; fresh_.push_back(true); }
  void arr_end() { text_ += ']'; fresh_.pop_back(); }
  void key(const std::string& k) {
    pre();
    text_ += '"';
    escape_into(k);
    text_ += "\":";
    key_pending_ = true;
  }
  void str(const std::string& v) {
    pre();
    text_ += '"';
    escape_into(v);
    text_ += '"';
  }
  void num(double v) {
    pre();
    if (std::isfinite(v)) {
      text_ += fmt12(v);
    } else {  // infinities appear only in tagged report fields
      text_ += '"';
      text_ += (v > 0 ? "inf" : (v < 0 ? "-inf" : "nan"));
      text_ += '"';
    }
  }
  void integer(long long v) {
    pre();
    text_ += std::to_string(v);
  }
  void boolean(bool v) {
    pre();
    text_ += (v ? "true" : "false");
  }
  // Inject an already-serialized JSON value verbatim.
  void raw(const std::string& fragment) {
    pre();
    text_ += fragment;
  }
  void vec(const Vector& v) {
    arr_begin();
    for (int i = 0; i < v.size(); ++i) num(v[i]);
    arr_end();
  }
  void mat_cols(const Matrix& m) {
    arr_begin();
    for (int j = 0; j < m.cols(); ++j) vec(m.col(j));
    arr_end();
  }
  void mat_rows(const Matrix& m) {
    arr_begin();
    for (int i = 0; i < m.rows(); ++i) vec(m.row(i).transpose());
    arr_end();
  }
  void kv(const std::string& k, double v) { key(k), num(v); }
  void kv(const std::string& k, const std::string& v) { key(k), str(v); }
  void kv(const std::string& k, const char* v) { key(k), str(v); }
  void kv(const std::string& k, bool v) { key(k), boolean(v); }
  void kv(const std::string& k, int v) { key(k), integer(v); }
  void kv(const std::string& k, long long v) { key(k), integer(v); }

  const std::string& text() const { return text_; }

 private:
  void pre() {
    if (key_pending_) {
      key_pending_ = false;
      return;
    }
    if (!fresh_.empty()) {
      if (!fresh_.back()) text_ += ',';
      fresh_.back() = false;
    }
  }
  void escape_into(const std::string& s) {
    for (char c : s) {
      switch (c) {
        case '"': text_ += "\\\""; break;
        case '\\': text_ += "\\\\"; break;
        case '\n': text_ += "\\n"; break;
        case '\t': text_ += "\\t"; break;
        case '\r': text_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            text_ += buf;
          } else {
            text_ += c;
          }
      }
    }
  }

  std::string text_;
  std::vector<bool> fresh_;  // per open container: no member emitted yet
  bool key_pending_ = false;
};

// ---------------------------------------------------------------------------
// Strict extraction helpers over parsed JSON.

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  require(j.is_object(), where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    require(ok, where + ": unknown key '" + item.key() + "'");
  }
}

const json& need(const json& j, const char* k, const std::string& where) {
  require(j.contains(k), where + ": missing required key '" + std::string(k) + "'");
  return j.at(k);
}

std::string as_str(const json& j, const std::string& where) {
  require(j.is_string(), where + ": expected a string");
  return j.get<std::string>();
}

double as_num(const json& j, const std::string& where) {
  require(j.is_number(), where + ": expected a number");
  double v = j.get<double>();
  require(std::isfinite(v), where + ": number must be finite");
  return v;
}

int as_int(const json& j, const std::string& where) {
  double v = as_num(j, where);
  require(v == std::floor(v) && std::abs(v) < 1e15, where + ": expected an integer");
  return static_cast<int>(v);
}

Vector as_vec(const json& j, const std::string& where) {
  require(j.is_array(), where + ": expected an array of numbers");
  Vector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = as_num(j.at(i), where);
  return v;
}

std::vector<int> as_ints(const json& j, const std::string& where) {
  require(j.is_array(), where + ": expected an array of integers");
  std::vector<int> out(j.size());
  for (size_t i = 0; i < j.size(); ++i) out[i] = as_int(j.at(i), where);
  return out;
}

std::vector<double> as_doubles(const json& j, const std::string& where) {
  require(j.is_array(), where + ": expected an array of numbers");
  std::vector<double> out(j.size());
  for (size_t i = 0; i < j.size(); ++i) out[i] = as_num(j.at(i), where);
  return out;
}

// Array of equal-length inner arrays -> matrix columns.
Matrix as_mat_cols(const json& j, const std::string& where) {
  require(j.is_array() && !j.empty(), where + ": expected a nonempty array of arrays");
  Vector first = as_vec(j.at(0), where);
  Matrix m(first.size(), static_cast<int>(j.size()));
  m.col(0) = first;
  for (int c = 1; c < m.cols(); ++c) {
    Vector v = as_vec(j.at(c), where);
    require(v.size() == m.rows(), where + ": inner arrays must share one length");
    m.col(c) = v;
  }
  return m;
}

// Array of equal-length inner arrays -> matrix rows.
Matrix as_mat_rows(const json& j, const std::string& where) {
  return as_mat_cols(j, where).transpose();
}

// ---------------------------------------------------------------------------
// Component parsers.

SpaceSpec parse_space(const json& j) {
  const std::string where = "space";
  check_keys(j, {"grid", "a", "b", "n", "norm", "p", "nodes", "weights"}, where);
  SpaceSpec sp;
  sp.grid = as_str(need(j, "grid", where), where + ".grid");
  sp.norm = as_str(need(j, "norm", where), where + ".norm");
  if (j.contains("p")) sp.p = as_num(j.at("p"), where + ".p");
  const bool uniform = sp.grid == "closed" || sp.grid == "periodic" || sp.grid == "midpoint";
  if (uniform) {
    sp.a = as_num(need(j, "a", where), where + ".a");
    sp.b = as_num(need(j, "b", where), where + ".b");
    sp.n = as_int(need(j, "n", where), where + ".n");
  } else if (sp.grid == "sequence") {
    sp.n = as_int(need(j, "n", where), where + ".n");
  } else if (sp.grid == "custom") {
    sp.nodes = as_vec(need(j, "nodes", where), where + ".nodes");
    sp.weights = as_vec(need(j, "weights", where), where + ".weights");
  } else {
    throw StructuralError(where + ".grid: unknown grid kind '" + sp.grid + "'");
  }
  return sp;
}

SubspaceSpec parse_subspace(const json& j, const std::string& where) {
  check_keys(j, {"preset", "degree", "indices", "basis"}, where);
  SubspaceSpec sp;
  sp.preset = as_str(need(j, "preset", where), where + ".preset");
  if (sp.preset == "trig" || sp.preset == "poly") {
    sp.degree = as_int(need(j, "degree", where), where + ".degree");
  } else if (sp.preset == "coordinates") {
    sp.indices = as_ints(need(j, "indices", where), where + ".indices");
  } else if (sp.preset == "explicit") {
    sp.basis = as_mat_cols(need(j, "basis", where), where + ".basis");
  } else {
    throw StructuralError(where + ".preset: unknown preset '" + sp.preset + "'");
  }
  return sp;
}

MeasurementSpec parse_measurements(const json& j) {
  const std::string where = "measurements";
  check_keys(j, {"kind", "points", "indices", "supports", "m", "rows"}, where);
  MeasurementSpec sp;
  sp.kind = as_str(need(j, "kind", where), where + ".kind");
  if (sp.kind == "point_eval") {
    sp.points = as_doubles(need(j, "points", where), where + ".points");
  } else if (sp.kind == "point_eval_indices") {
    sp.indices = as_ints(need(j, "indices", where), where + ".indices");
  } else if (sp.kind == "disjoint_avg") {
    const json& s = need(j, "supports", where);
    require(s.is_array(), where + ".supports: expected an array of index arrays");
    for (const auto& inner : s) sp.supports.push_back(as_ints(inner, where + ".supports"));
  } else if (sp.kind == "rademacher" || sp.kind == "fourier") {
    sp.m = as_int(need(j, "m", where), where + ".m");
  } else if (sp.kind == "general") {
    sp.rows = as_mat_rows(need(j, "rows", where), where + ".rows");
  } else {
    throw StructuralError(where + ".kind: unknown measurement kind '" + sp.kind + "'");
  }
  return sp;
}

AlgorithmSpec parse_algorithm(const json& j) {
  const std::string where = "algorithm";
  check_keys(j, {"fit", "fit_p", "lift", "lift_p", "psi"}, where);
  AlgorithmSpec sp;
  if (j.contains("fit")) sp.fit = as_str(j.at("fit"), where + ".fit");
  if (j.contains("lift")) sp.lift = as_str(j.at("lift"), where + ".lift");
  if (sp.fit == "pnorm") sp.fit_p = as_num(need(j, "fit_p", where), where + ".fit_p");
  if (sp.lift == "min_norm") sp.lift_p = as_num(need(j, "lift_p", where), where + ".lift_p");
  if (sp.lift == "dual_basis") sp.psi = as_mat_cols(need(j, "psi", where), where + ".psi");
  const bool fit_known = sp.fit == "default" || sp.fit == "minimax" ||
                         sp.fit == "least_squares" || sp.fit == "pnorm";
  require(fit_known, where + ".fit: unknown fit method '" + sp.fit + "'");
  const bool lift_known = sp.lift == "default" || sp.lift == "dual_basis" ||
                          sp.lift == "orthonormal" || sp.lift == "min_norm" ||
                          sp.lift == "riesz_product";
  require(lift_known, where + ".lift: unknown lifting kind '" + sp.lift + "'");
  return sp;
}

AccuracySpec parse_accuracy(const json& j, const std::string& where) {
  check_keys(j, {"preset", "C", "alpha", "rho", "epsilons"}, where);
  AccuracySpec sp;
  sp.preset = as_str(need(j, "preset", where), where + ".preset");
  if (sp.preset == "lip_alpha") {
    sp.C = as_num(need(j, "C", where), where + ".C");
    sp.alpha = as_num(need(j, "alpha", where), where + ".alpha");
  } else if (sp.preset == "bernstein") {
    sp.C = as_num(need(j, "C", where), where + ".C");
    sp.rho = as_num(need(j, "rho", where), where + ".rho");
  } else if (sp.preset == "custom") {
    sp.epsilons = as_doubles(need(j, "epsilons", where), where + ".epsilons");
  } else {
    throw StructuralError(where + ".preset: unknown accuracy preset '" + sp.preset + "'");
  }
  return sp;
}

ScheduleSpec parse_schedule(const json& j, const std::string& where) {
  check_keys(j, {"preset", "start", "stages", "counts"}, where);
  ScheduleSpec sp;
  sp.preset = as_str(need(j, "preset", where), where + ".preset");
  if (sp.preset == "counts") {
    sp.counts = as_ints(need(j, "counts", where), where + ".counts");
  } else if (sp.preset == "doubling") {
    sp.start = as_int(need(j, "start", where), where + ".start");
    if (j.contains("stages")) sp.stages = as_int(j.at("stages"), where + ".stages");
  } else if (sp.preset == "fourier") {
    sp.stages = as_int(need(j, "stages", where), where + ".stages");
  } else {
    throw StructuralError(where + ".preset: unknown schedule preset '" + sp.preset + "'");
  }
  return sp;
}

TaskSpec parse_task(const json& j, size_t index) {
  const std::string where = "tasks[" + std::to_string(index) + "]";
  require(j.is_object(), where + ": expected a JSON object");
  TaskSpec t;
  t.task = as_str(need(j, "task", where), where + ".task");
  if (t.task == "recover") {
    check_keys(j, {"task", "w", "f"}, where);
    t.has_w = j.contains("w");
    t.has_f = j.contains("f");
    require(t.has_w != t.has_f, where + ": provide exactly one of 'w' or 'f'");
    if (t.has_w) t.w = as_vec(j.at("w"), where + ".w");
    if (t.has_f) t.f = as_vec(j.at("f"), where + ".f");
  } else if (t.task == "mu") {
    check_keys(j, {"task"}, where);
  } else if (t.task == "geometry") {
    check_keys(j, {"task", "w", "vertices"}, where);
    t.has_w = j.contains("w");
    t.has_vertices = j.contains("vertices");
    require(t.has_w != t.has_vertices, where + ": provide exactly one of 'w' or 'vertices'");
    if (t.has_w) t.w = as_vec(j.at("w"), where + ".w");
    if (t.has_vertices) t.vertices = as_mat_cols(j.at("vertices"), where + ".vertices");
  } else if (t.task == "sweep") {
    check_keys(j, {"task", "family", "schedule", "probe"}, where);
    const json& fam = need(j, "family", where);
    check_keys(fam, {"levels", "accuracy"}, where + ".family");
    const json& levels = need(fam, "levels", where + ".family");
    require(levels.is_array() && !levels.empty(),
            where + ".family.levels: expected a nonempty array");
    for (size_t i = 0; i < levels.size(); ++i)
      t.family.levels.push_back(
          parse_subspace(levels.at(i), where + ".family.levels[" + std::to_string(i) + "]"));
    t.family.accuracy =
        parse_accuracy(need(fam, "accuracy", where + ".family"), where + ".family.accuracy");
    t.schedule = parse_schedule(need(j, "schedule", where), where + ".schedule");
    t.probe = as_vec(need(j, "probe", where), where + ".probe");
  } else if (t.task == "sandwich") {
    check_keys(j, {"task", "w"}, where);
    t.has_w = true;
    t.w = as_vec(need(j, "w", where), where + ".w");
  } else if (t.task == "design") {
    check_keys(j, {"task", "delta"}, where);
    t.delta = as_num(need(j, "delta", where), where + ".delta");
  } else {
    throw StructuralError(where + ".task: unknown task '" + t.task + "'");
  }
  return t;
}

// ---------------------------------------------------------------------------
// Component serializers (canonical order; variant-relevant fields only).

void write_space(JsonOut& w, const SpaceSpec& sp) {
  w.obj_begin();
  w.kv("grid", sp.grid);
  const bool uniform = sp.grid == "closed" || sp.grid == "periodic" || sp.grid == "midpoint";
  if (uniform) {
    w.kv("a", sp.a);
    w.kv("b", sp.b);
    w.kv("n", sp.n);
  } else if (sp.grid == "sequence") {
    w.kv("n", sp.n);
  } else {
    w.key("nodes"), w.vec(sp.nodes);
    w.key("weights"), w.vec(sp.weights);
  }
  w.kv("norm", sp.norm);
  if (sp.norm == "lp") w.kv("p", sp.p);
  w.obj_end();
}

void write_subspace(JsonOut& w, const SubspaceSpec& sp) {
  w.obj_begin();
  w.kv("preset", sp.preset);
  if (sp.preset == "trig" || sp.preset == "poly") {
    w.kv("degree", sp.degree);
  } else if (sp.preset == "coordinates") {
    w.key("indices");
    w.arr_begin();
    for (int i : sp.indices) w.integer(i);
    w.arr_end();
  } else {
    w.key("basis"), w.mat_cols(sp.basis);
  }
  w.obj_end();
}

void write_measurements(JsonOut& w, const MeasurementSpec& sp) {
  w.obj_begin();
  w.kv("kind", sp.kind);
  if (sp.kind == "point_eval") {
    w.key("points");
    w.arr_begin();
    for (double p : sp.points) w.num(p);
    w.arr_end();
  } else if (sp.kind == "point_eval_indices") {
    w.key("indices");
    w.arr_begin();
    for (int i : sp.indices) w.integer(i);
    w.arr_end();
  } else if (sp.kind == "disjoint_avg") {
    w.key("supports");
    w.arr_begin();
    for (const auto& sup : sp.supports) {
      w.arr_begin();
      for (int i : sup) w.integer(i);
      w.arr_end();
    }
    w.arr_end();
  } else if (sp.kind == "rademacher" || sp.kind == "fourier") {
    w.kv("m", sp.m);
  } else {
    w.key("rows"), w.mat_rows(sp.rows);
  }
  w.obj_end();
}

void write_algorithm(JsonOut& w, const AlgorithmSpec& sp) {
  w.obj_begin();
  w.kv("fit", sp.fit);
  if (sp.fit == "pnorm") w.kv("fit_p", sp.fit_p);
  w.kv("lift", sp.lift);
  if (sp.lift == "min_norm") w.kv("lift_p", sp.lift_p);
  if (sp.lift == "dual_basis") w.key("psi"), w.mat_cols(sp.psi);
  w.obj_end();
}

void write_accuracy(JsonOut& w, const AccuracySpec& sp) {
  w.obj_begin();
  w.kv("preset", sp.preset);
  if (sp.preset == "lip_alpha") {
    w.kv("C", sp.C);
    w.kv("alpha", sp.alpha);
  } else if (sp.preset == "bernstein") {
    w.kv("C", sp.C);
    w.kv("rho", sp.rho);
  } else {
    w.key("epsilons");
    w.arr_begin();
    for (double e : sp.epsilons) w.num(e);
    w.arr_end();
  }
  w.obj_end();
}

void write_schedule(JsonOut& w, const ScheduleSpec& sp) {
  w.obj_begin();
  w.kv("preset", sp.preset);
  if (sp.preset == "counts") {
    w.key("counts");
    w.arr_begin();
    for (int c : sp.counts) w.integer(c);
    w.arr_end();
  } else if (sp.preset == "doubling") {
    w.kv("start", sp.start);
    if (sp.stages > 0) w.kv("stages", sp.stages);
  } else {
    w.kv("stages", sp.stages);
  }
  w.obj_end();
}

void write_task(JsonOut& w, const TaskSpec& t) {
  w.obj_begin();
  w.kv("task", t.task);
  if (t.task == "recover") {
    if (t.has_w) w.key("w"), w.vec(t.w);
    if (t.has_f) w.key("f"), w.vec(t.f);
  } else if (t.task == "geometry") {
    if (t.has_w) w.key("w"), w.vec(t.w);
    if (t.has_vertices) w.key("vertices"), w.mat_cols(t.vertices);
  } else if (t.task == "sweep") {
    w.key("family");
    w.obj_begin();
    w.key("levels");
    w.arr_begin();
    for (const auto& lv : t.family.levels) write_subspace(w, lv);
    w.arr_end();
    w.key("accuracy");
    write_accuracy(w, t.family.accuracy);
    w.obj_end();
    w.key("schedule");
    write_schedule(w, t.schedule);
    w.key("probe"), w.vec(t.probe);
  } else if (t.task == "sandwich") {
    w.key("w"), w.vec(t.w);
  } else if (t.task == "design") {
    w.kv("delta", t.delta);
  }
  w.obj_end();
}

// ---------------------------------------------------------------------------
// Run-time helpers.

NormKind norm_kind_of(const std::string& s) {
  if (s == "sup") return NormKind::Sup;
  if (s == "lp") return NormKind::Lp;
  if (s == "hilbert") return NormKind::Hilbert;
  throw StructuralError("space.norm: unknown norm kind '" + s + "'");
}

uint64_t task_seed(uint64_t run_seed, size_t index) {
  uint64_t base = run_seed ? run_seed : 0x5eedULL;
  return base * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(index + 1);
}

std::string format_witness(const SpacePtr& s, Vector v) {
  const double nrm = s->norm(v);
  if (nrm > 0) v /= nrm;
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt12(v[i]);
  }
  out += "]";
  return out;
}

// Hidden-direction gate: every model direction must be visible to the rows.
// Throws with a normalized witness element when the subspace meets ker M.
void standing_gate(const SpacePtr& s, const Subspace& V, const MeasurementOperator& M) {
  if (V.dim() == 0) return;
  const Matrix MV = M.rows() * V.basis();
  Eigen::JacobiSVD<Matrix> svd(MV, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  const double smin = (MV.rows() >= MV.cols() && sv.size() == MV.cols()) ? sv[sv.size() - 1] : 0.0;
  if (MV.rows() < MV.cols() || smin <= kRankTol * std::max(smax, 1e-300)) {
    const Vector c = svd.matrixV().col(V.dim() - 1);
    throw StructuralError(
        "model subspace meets the measurement kernel: the rows cannot see the model direction " +
        format_witness(s, V.basis() * c));
  }
}

// Writes the two-row angle-constant table shared by the mu task.
std::string mu_csv(const AngleReport& ar) {
  auto cell = [](double v, bool inf_flag) { return inf_flag ? std::string("inf") : fmt12(v); };
  std::string out = "quantity,value,lower,upper,infinite\n";
  out += "mu_v_n," + cell(ar.mu_v_n.value, ar.mu_v_n.infinite) + "," + fmt12(ar.mu_v_n_lower) +
         "," + cell(ar.mu_v_n_upper, ar.mu_v_n.infinite) + "," +
         (ar.mu_v_n.infinite ? "1" : "0") + "\n";
  out += "mu_n_v," + cell(ar.mu_n_v.value, ar.mu_n_v.infinite) + "," + fmt12(ar.mu_n_v_lower) +
         "," + cell(ar.mu_n_v_upper, ar.mu_n_v.infinite) + "," +
         (ar.mu_n_v.infinite ? "1" : "0") + "\n";
  return out;
}

void write_angle_value(JsonOut& w, const char* name, const AngleValue& v, double lo, double hi) {
  w.key(name);
  w.obj_begin();
  w.key("value"), w.num(v.infinite ? kInf : v.value);
  w.kv("infinite", v.infinite);
  w.key("lower"), w.num(lo);
  w.key("upper"), w.num(v.infinite ? kInf : hi);
  w.obj_end();
}

struct TaskResult {
  std::string entry;  // one JSON object for the report task list
  std::vector<CsvTable> tables;
};

std::string table_name(const ProblemDocument& doc, size_t index, const std::string& stem) {
  return doc.output.csv_prefix + stem + "_" + std::to_string(index + 1) + ".csv";
}

TaskResult run_recover(const ProblemDocument& doc, size_t ti, const TaskSpec& t,
                       const RecoveryProblem& P) {
  const SpacePtr& s = P.subspace().space();
  Vector data;
  if (t.has_w) {
    require(t.w.size() == P.op().count(), "recover task: data length must match the row count");
    data = t.w;
  } else {
    require(t.f.size() == s->size(), "recover task: sample length must match the grid size");
    data = P.op().apply(t.f);
  }
  const ApproxMap fit = build_fit(P, doc.algorithm);
  const Lifting lift = build_lift(P, doc.algorithm);
  const RecoveryReport rep = recover(P, data, fit, lift);

  JsonOut w;
  w.obj_begin();
  w.kv("task", "recover");
  w.kv("data_source", t.has_w ? "w" : "f");
  w.kv("data_residual", rep.data_residual);
  w.kv("model_distance", rep.model_distance);
  w.kv("data_fit_error", rep.data_fit_error);
  w.kv("near_best_lambda", rep.near_best_lambda);
  w.kv("lift_norm", rep.lift_norm);
  w.key("mu"), w.num(rep.bounds_infinite ? kInf : rep.mu);
  w.key("bound_instance"), w.num(rep.bounds_infinite ? kInf : rep.bound_instance);
  w.key("bound_global"), w.num(rep.bounds_infinite ? kInf : rep.bound_global);
  w.kv("bounds_infinite", rep.bounds_infinite);
  w.kv("corrected", rep.corrected);
  double actual = 0.0;
  if (t.has_f) {
    actual = s->norm(rep.reconstruction.values - t.f);
    w.kv("actual_error", actual);
  }
  w.key("v_coeffs"), w.vec(rep.v_coeffs);
  w.key("estimate"), w.vec(rep.reconstruction.values);
  w.obj_end();

  auto cell = [&](double v) { return rep.bounds_infinite ? std::string("inf") : fmt12(v); };
  std::string csv =
      "data_residual,model_distance,data_fit_error,lambda,lift_norm,mu,bound_instance,"
      "bound_global";
  if (t.has_f) csv += ",actual_error";
  csv += "\n";
  csv += fmt12(rep.data_residual) + "," + fmt12(rep.model_distance) + "," +
         fmt12(rep.data_fit_error) + "," + fmt12(rep.near_best_lambda) + "," +
         fmt12(rep.lift_norm) + "," + cell(rep.mu) + "," + cell(rep.bound_instance) + "," +
         cell(rep.bound_global);
  if (t.has_f) csv += "," + fmt12(actual);
  csv += "\n";
  return {w.text(), {{table_name(doc, ti, "recover"), csv}}};
}

TaskResult run_mu(const ProblemDocument& doc, size_t ti, const RecoveryProblem& P) {
  const AngleReport ar = angle_report(P.op(), P.subspace());
  JsonOut w;
  w.obj_begin();
  w.kv("task", "mu");
  write_angle_value(w, "mu_v_n", ar.mu_v_n, ar.mu_v_n_lower, ar.mu_v_n_upper);
  write_angle_value(w, "mu_n_v", ar.mu_n_v, ar.mu_n_v_lower, ar.mu_n_v_upper);
  w.kv("exact", ar.exact);
  w.kv("method", ar.method);
  w.obj_end();
  return {w.text(), {{table_name(doc, ti, "mu"), mu_csv(ar)}}};
}

TaskResult run_geometry(const ProblemDocument& doc, size_t ti, const TaskSpec& t,
                        const RecoveryProblem& P, uint64_t seed) {
  const SpacePtr& s = P.subspace().space();
  JsonOut w;
  w.obj_begin();
  w.kv("task", "geometry");

  double diam = 0.0, rad = 0.0, rad_c = 0.0;
  bool diam_exact = false, rad_exact = false, unbounded = false;
  std::string method;

  if (!t.has_vertices && s->kind() == NormKind::Hilbert) {
    // Hilbert data slices are ellipsoids: the eigensolve diameter is exact
    // and the center (the slice's own midpoint) lies in the set, so both
    // radii equal half the diameter.  The polyhedral vertex machinery is
    // deliberately not used here.
    require(t.w.size() == P.op().count(), "geometry task: data length must match the row count");
    const GammaResult g = gamma_of_Kw(P, t.w);
    if (g.out_of_class) {
      w.kv("empty", true);
      w.kv("gamma", g.gamma);
      w.obj_end();
      return {w.text(),
              {{table_name(doc, ti, "geometry"), "diameter,radius,radius_constrained\n"}}};
    }
    const SliceDiameter sd = hilbert_slice_diameter(P, t.w);
    diam = sd.value;
    rad = rad_c = 0.5 * sd.value;
    diam_exact = rad_exact = true;
    method = "ellipsoid-eigensolve";
    w.kv("empty", false);
    w.kv("gamma", sd.gamma);
  } else {
    PolytopeSet S = t.has_vertices ? PolytopeSet::from_vertices(s, t.vertices)
                                   : [&] {
                                       require(t.w.size() == P.op().count(),
                                               "geometry task: data length must match the row "
                                               "count");
                                       return build_Kw(P, t.w);
                                     }();
    if (S.empty()) {
      w.kv("empty", true);
      w.obj_end();
      return {w.text(),
              {{table_name(doc, ti, "geometry"), "diameter,radius,radius_constrained\n"}}};
    }
    const DiameterResult d = diameter(S, 200, task_seed(seed, ti));
    const ChebyshevBall cb = chebyshev_center_radius(S);
    const ChebyshevBall rb = restricted_radius(S);
    diam = d.value;
    rad = cb.radius;
    rad_c = rb.radius;
    diam_exact = d.exact;
    rad_exact = cb.exact && rb.exact;
    unbounded = d.unbounded || cb.unbounded || rb.unbounded;
    method = d.method;
    w.kv("empty", false);
  }

  w.key("diameter"), w.num(unbounded ? kInf : diam);
  w.kv("diameter_exact", diam_exact);
  w.key("radius"), w.num(unbounded ? kInf : rad);
  w.key("radius_constrained"), w.num(unbounded ? kInf : rad_c);
  w.kv("radius_exact", rad_exact);
  w.kv("unbounded", unbounded);
  w.kv("method", method);
  w.obj_end();

  auto cell = [&](double v) { return unbounded ? std::string("inf") : fmt12(v); };
  std::string csv = "diameter,radius,radius_constrained\n";
  csv += cell(diam) + "," + cell(rad) + "," + cell(rad_c) + "\n";
  return {w.text(), {{table_name(doc, ti, "geometry"), csv}}};
}

TaskResult run_sweep(const ProblemDocument& doc, size_t ti, const TaskSpec& t,
                     const RecoveryProblem& P) {
  const SpacePtr& s = P.subspace().space();
  std::vector<Subspace> levels;
  levels.reserve(t.family.levels.size());
  for (const auto& spec : t.family.levels) levels.push_back(build_subspace(s, spec));
  const AccuracySpec& acc = t.family.accuracy;
  NestedFamily F = acc.preset == "lip_alpha" ? NestedFamily::lip_alpha(levels, acc.C, acc.alpha)
                   : acc.preset == "bernstein"
                       ? NestedFamily::bernstein(levels, acc.C, acc.rho)
                       : NestedFamily::custom(levels, acc.epsilons);

  std::vector<MeasurementOperator> schedule;
  const ScheduleSpec& sch = t.schedule;
  if (sch.preset == "counts") {
    require(!sch.counts.empty(), "sweep task: schedule needs at least one row count");
    for (int c : sch.counts) {
      require(c >= 1 && c <= P.op().count(),
              "sweep task: schedule count " + std::to_string(c) +
                  " exceeds the document's measurement rows");
      schedule.push_back(MeasurementOperator::general(s, P.op().rows().topRows(c)));
    }
  } else if (sch.preset == "doubling") {
    require(sch.start >= 1, "sweep task: doubling schedule needs a positive start");
    int stages_left = sch.stages > 0 ? sch.stages : -1;
    for (int c = sch.start; c <= P.op().count() && stages_left != 0;
         c *= 2, stages_left = stages_left > 0 ? stages_left - 1 : stages_left) {
      schedule.push_back(MeasurementOperator::general(s, P.op().rows().topRows(c)));
    }
    require(!schedule.empty(), "sweep task: doubling schedule produced no stages");
  } else {  // fourier
    require(sch.stages >= 1, "sweep task: schedule needs at least one stage");
    for (int k = 0; k < sch.stages; ++k)
      schedule.push_back(MeasurementOperator::fourier(s, 2 * k + 1));
  }

  require(t.probe.size() == s->size(), "sweep task: probe length must match the grid size");
  const SweepTable tab = sweep(F, schedule, t.probe);

  JsonOut w;
  w.obj_begin();
  w.kv("task", "sweep");
  w.kv("stages", static_cast<long long>(tab.rows.size()));
  w.kv("converged", tab.converged);
  w.key("rows");
  w.arr_begin();
  for (const auto& r : tab.rows) {
    w.obj_begin();
    w.kv("m", r.m);
    w.kv("n_of_m", r.n_of_m);
    w.kv("mu", r.mu);
    w.kv("epsilon", r.epsilon);
    w.kv("bound", r.bound);
    w.kv("actual_error", r.actual_error);
    w.kv("gamma", r.gamma);
    w.obj_end();
  }
  w.arr_end();
  w.obj_end();
  return {w.text(), {{table_name(doc, ti, "sweep"), tab.to_csv()}}};
}

TaskResult run_sandwich(const ProblemDocument& doc, size_t ti, const TaskSpec& t,
                        const RecoveryProblem& P, uint64_t seed) {
  require(t.w.size() == P.op().count(), "sandwich task: data length must match the row count");
  JsonOut w;
  w.obj_begin();
  w.kv("task", "sandwich");
  const GammaResult g = gamma_of_Kw(P, t.w);
  if (g.out_of_class) {
    w.kv("empty", true);
    w.kv("gamma", g.gamma);
    w.obj_end();
    return {w.text(),
            {{table_name(doc, ti, "sandwich"), "gamma,mu,lower,oracle,upper,pass\n"}}};
  }
  const SliceDiameter sd = hilbert_slice_diameter(P, t.w);
  const DiameterResult oracle{sd.value, true, false, "ellipsoid-eigensolve"};
  const SandwichRow row = diameter_sandwich_check(P, t.w, oracle);
  const AscentDiameter asc = ascent_diameter(P, t.w, 128, task_seed(seed, ti));

  w.kv("empty", false);
  w.kv("gamma", row.gamma);
  w.kv("mu", row.mu);
  w.kv("lower", row.lower);
  w.kv("oracle", row.oracle);
  w.kv("upper", row.upper);
  w.kv("pass", row.pass);
  w.kv("oracle_exact", row.oracle_exact);
  w.kv("regime", row.regime);
  w.key("ascent");
  w.obj_begin();
  w.kv("value", asc.value);
  w.kv("restarts", asc.restarts);
  w.kv("iterations", asc.iterations);
  w.obj_end();
  w.obj_end();

  std::string csv = "gamma,mu,lower,oracle,upper,pass\n";
  csv += fmt12(row.gamma) + "," + fmt12(row.mu) + "," + fmt12(row.lower) + "," +
         fmt12(row.oracle) + "," + fmt12(row.upper) + "," + (row.pass ? "1" : "0") + "\n";
  return {w.text(), {{table_name(doc, ti, "sandwich"), csv}}};
}

TaskResult run_design(const ProblemDocument& doc, size_t ti, const TaskSpec& t,
                      const RecoveryProblem& P) {
  require(t.delta > 0.0 && t.delta < 1.0, "design task: delta must lie strictly in (0, 1)");
  const NetDesign nd = design_net_measurements(P.subspace(), t.delta);
  const AngleReport ar = angle_report(nd.op, P.subspace());
  const double achieved = ar.mu_n_v.infinite ? kInf : ar.mu_n_v.value;

  JsonOut w;
  w.obj_begin();
  w.kv("task", "design");
  w.kv("size", nd.op.count());
  w.kv("delta_requested", nd.delta_requested);
  w.kv("delta_achieved", nd.delta_achieved);
  w.kv("mu_bound", nd.mu_bound);
  w.key("mu_achieved"), w.num(achieved);
  w.kv("candidates", nd.candidates);
  w.obj_end();

  std::string csv = "m,delta_requested,delta_achieved,mu_bound,mu_achieved\n";
  csv += std::to_string(nd.op.count()) + "," + fmt12(nd.delta_requested) + "," +
         fmt12(nd.delta_achieved) + "," + fmt12(nd.mu_bound) + "," +
         (ar.mu_n_v.infinite ? std::string("inf") : fmt12(achieved)) + "\n";
  return {w.text(), {{table_name(doc, ti, "design"), csv}}};
}

CsvTable rows_table(const ProblemDocument& doc, const MeasurementOperator& M) {
  std::string csv = "row";
  for (int j = 0; j < M.rows().cols(); ++j) csv += ",x" + std::to_string(j);
  csv += "\n";
  for (int i = 0; i < M.count(); ++i) {
    csv += std::to_string(i);
    for (int j = 0; j < M.rows().cols(); ++j) csv += "," + fmt12(M.rows()(i, j));
    csv += "\n";
  }
  return {doc.output.csv_prefix + "rows.csv", csv};
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API.

ProblemDocument parse_document(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("document is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"space", "subspace", "measurements", "epsilon", "algorithm", "tasks", "output",
              "export_rows"},
             "document");
  ProblemDocument doc;
  doc.space = parse_space(need(j, "space", "document"));
  doc.subspace = parse_subspace(need(j, "subspace", "document"), "subspace");
  doc.measurements = parse_measurements(need(j, "measurements", "document"));
  doc.epsilon = as_num(need(j, "epsilon", "document"), "epsilon");
  if (j.contains("algorithm")) doc.algorithm = parse_algorithm(j.at("algorithm"));
  const json& tasks = need(j, "tasks", "document");
  require(tasks.is_array(), "tasks: expected an array");
  for (size_t i = 0; i < tasks.size(); ++i) doc.tasks.push_back(parse_task(tasks.at(i), i));
  if (j.contains("output")) {
    const json& out = j.at("output");
    check_keys(out, {"report", "csv_prefix"}, "output");
    if (out.contains("report")) doc.output.report = as_str(out.at("report"), "output.report");
    if (out.contains("csv_prefix"))
      doc.output.csv_prefix = as_str(out.at("csv_prefix"), "output.csv_prefix");
    require(!doc.output.report.empty(), "output.report: file name must not be empty");
  }
  if (j.contains("export_rows")) {
    require(j.at("export_rows").is_boolean(), "export_rows: expected a boolean");
    doc.export_rows = j.at("export_rows").get<bool>();
  }
  return doc;
}

std::string serialize_document(const ProblemDocument& doc) {
  JsonOut w;
  w.obj_begin();
  w.key("space");
  write_space(w, doc.space);
  w.key("subspace");
  write_subspace(w, doc.subspace);
  w.key("measurements");
  write_measurements(w, doc.measurements);
  w.kv("epsilon", doc.epsilon);
  w.key("algorithm");
  write_algorithm(w, doc.algorithm);
  w.key("tasks");
  w.arr_begin();
  for (const auto& t : doc.tasks) write_task(w, t);
  w.arr_end();
  w.key("output");
  w.obj_begin();
  w.kv("report", doc.output.report);
  w.kv("csv_prefix", doc.output.csv_prefix);
  w.obj_end();
  w.kv("export_rows", doc.export_rows);
  w.obj_end();
  return w.text();
}

SpacePtr build_space(const SpaceSpec& spec) {
  const NormKind k = norm_kind_of(spec.norm);
  const double p = spec.p;
  if (spec.grid == "closed") return Space::uniform_closed(spec.a, spec.b, spec.n, k, p);
  if (spec.grid == "periodic") return Space::uniform_periodic(spec.a, spec.b, spec.n, k, p);
  if (spec.grid == "midpoint") return Space::uniform_midpoint(spec.a, spec.b, spec.n, k, p);
  if (spec.grid == "sequence") return Space::sequence(spec.n, k, p);
  if (spec.grid == "custom") return Space::custom(spec.nodes, spec.weights, k, p);
  throw StructuralError("space.grid: unknown grid kind '" + spec.grid + "'");
}

Subspace build_subspace(const SpacePtr& s, const SubspaceSpec& spec) {
  if (spec.preset == "trig") return make_trig_subspace(s, spec.degree);
  if (spec.preset == "poly") return make_poly_subspace(s, spec.degree);
  if (spec.preset == "coordinates") return make_coordinate_subspace(s, spec.indices);
  require(spec.basis.rows() == s->size(),
          "subspace.basis: column length must match the grid size");
  return Subspace(s, spec.basis);
}

MeasurementOperator build_measurements(const SpacePtr& s, const MeasurementSpec& spec) {
  if (spec.kind == "point_eval") return MeasurementOperator::point_eval(s, spec.points);
  if (spec.kind == "point_eval_indices")
    return MeasurementOperator::point_eval_indices(s, spec.indices);
  if (spec.kind == "disjoint_avg") return MeasurementOperator::disjoint_avg(s, spec.supports);
  if (spec.kind == "rademacher") return MeasurementOperator::rademacher(s, spec.m);
  if (spec.kind == "fourier") return MeasurementOperator::fourier(s, spec.m);
  require(spec.rows.cols() == s->size(),
          "measurements.rows: row length must match the grid size");
  return MeasurementOperator::general(s, spec.rows);
}

ApproxMap build_fit(const RecoveryProblem& P, const AlgorithmSpec& spec) {
  if (spec.fit == "default") return default_approx_map(P);
  if (spec.fit == "minimax") return ApproxMap(P.op(), P.subspace(), ApproxMethod::MinimaxLp);
  if (spec.fit == "least_squares")
    return ApproxMap(P.op(), P.subspace(), ApproxMethod::LeastSquares);
  return ApproxMap(P.op(), P.subspace(), ApproxMethod::Pnorm, spec.fit_p);
}

Lifting build_lift(const RecoveryProblem& P, const AlgorithmSpec& spec) {
  if (spec.lift == "default") return default_lifting(P);
  if (spec.lift == "orthonormal") return Lifting::orthonormal(P.op());
  if (spec.lift == "min_norm") return Lifting::min_norm(P.op(), spec.lift_p);
  if (spec.lift == "riesz_product") return Lifting::riesz_product(P.op());
  require(spec.psi.rows() == P.op().rows().cols() && spec.psi.cols() == P.op().count(),
          "algorithm.psi: need one grid-sized column per measurement row");
  return Lifting::dual_basis(P.op(), spec.psi);
}

RunOutcome run_document(const ProblemDocument& doc, uint64_t seed) {
  RunOutcome out;
  out.report_name = doc.output.report;
  const std::string problem_text = serialize_document(doc);

  std::vector<std::string> entries;
  int exit_code = 0;
  bool partial = false;
  std::string error;

  auto classify = [](const std::exception& e) {
    if (dynamic_cast<const StructuralError*>(&e)) return 2;
    return 3;  // solver breakdowns and anything unforeseen
  };

  try {
    const SpacePtr s = build_space(doc.space);
    const Subspace V = build_subspace(s, doc.subspace);
    const MeasurementOperator M = build_measurements(s, doc.measurements);
    require(std::isfinite(doc.epsilon) && doc.epsilon >= 0.0,
            "epsilon: must be a finite nonnegative number");
    standing_gate(s, V, M);
    const RecoveryProblem P(M, V, doc.epsilon);

    for (size_t ti = 0; ti < doc.tasks.size(); ++ti) {
      const TaskSpec& t = doc.tasks[ti];
      try {
        TaskResult r;
        if (t.task == "recover") {
          r = run_recover(doc, ti, t, P);
        } else if (t.task == "mu") {
          r = run_mu(doc, ti, P);
        } else if (t.task == "geometry") {
          r = run_geometry(doc, ti, t, P, seed);
        } else if (t.task == "sweep") {
          r = run_sweep(doc, ti, t, P);
        } else if (t.task == "sandwich") {
          r = run_sandwich(doc, ti, t, P, seed);
        } else {
          r = run_design(doc, ti, t, P);
        }
        entries.push_back(r.entry);
        for (auto& tab : r.tables) out.tables.push_back(std::move(tab));
      } catch (const std::exception& e) {
        exit_code = classify(e);
        error = "task " + std::to_string(ti + 1) + " (" + t.task + "): " + e.what();
        partial = true;
        JsonOut w;
        w.obj_begin();
        w.kv("task", t.task);
        w.kv("failed", true);
        w.kv("error", std::string(e.what()));
        w.obj_end();
        entries.push_back(w.text());
        break;
      }
    }
    if (exit_code == 0 && doc.export_rows) out.tables.push_back(rows_table(doc, M));
  } catch (const std::exception& e) {
    exit_code = classify(e);
    error = e.what();
    partial = !doc.tasks.empty();
  }

  JsonOut w;
  w.obj_begin();
  w.kv("version", 1);
  w.kv("seed", static_cast<long long>(seed));
  w.key("problem");
  w.raw(problem_text);
  w.kv("exit_code", exit_code);
  w.kv("partial", partial);
  if (!error.empty()) w.kv("error", error);
  w.key("tasks");
  w.arr_begin();
  for (const auto& e : entries) w.raw(e);
  w.arr_end();
  w.obj_end();

  out.exit_code = exit_code;
  out.error = error;
  out.report = w.text() + "\n";
  return out;
}

RunOutcome run_document_text(const std::string& json_text, uint64_t seed) {
  ProblemDocument doc;
  try {
    doc = parse_document(json_text);
  } catch (const std::exception& e) {
    RunOutcome out;
    out.exit_code = 2;
    out.error = e.what();
    JsonOut w;
    w.obj_begin();
    w.kv("version", 1);
    w.kv("seed", static_cast<long long>(seed));
    w.kv("exit_code", 2);
    w.kv("partial", false);
    w.kv("error", std::string(e.what()));
    w.key("tasks");
    w.arr_begin();
    w.arr_end();
    w.obj_end();
    out.report = w.text() + "\n";
    return out;
  }
  return run_document(doc, seed);
}

}  // namespace recov
