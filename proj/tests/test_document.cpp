// Declarative documents and the built-in fixture library.
//
// Oracles used here, independent of the implementation under test:
//   * the unit-sum triangle's exact geometry (diameter 1, free radius 1/2,
//     member-constrained radius 2/3) established by direct vertex reasoning;
//   * canonical serialization is a fixed point: serializing a parsed
//     canonical text must reproduce the input bytes;
//   * a model direction invisible to every row must be rejected before any
//     task runs, with the offending direction printed;
//   * equal documents and seeds must yield byte-identical outputs.

#include <doctest.h>

#include <json.hpp>

#include "core/document.hpp"
#include "core/fixtures.hpp"

using namespace recov;
using nlohmann::json;

namespace {

json report_json(const RunOutcome& out) { return json::parse(out.report); }

const CsvTable& table_named(const RunOutcome& out, const std::string& name) {
  for (const auto& t : out.tables)
    if (t.name == name) return t;
  FAIL("missing table ", name);
  static CsvTable dummy;
  return dummy;
}

}  // namespace

TEST_CASE("fixtures: canonical serialization is a parse fixed point") {
  const auto names = fixture_names();
  CHECK(names.size() == 8);
  for (const auto& name : names) {
    CAPTURE(name);
    const std::string text = fixture_document(name);
    CHECK(!text.empty());
    const ProblemDocument doc = parse_document(text);
    const std::string again = serialize_document(doc);
    CHECK(again == text);
    CHECK(serialize_document(parse_document(again)) == again);
    CHECK(json::parse(text).is_object());  // plain JSON for outside tooling
  }
  CHECK_THROWS_AS(fixture_document("no_such_fixture"), StructuralError);
}

TEST_CASE("triangle fixture: exact geometry row with pinned formatting") {
  const RunOutcome out = run_document_text(fixture_document("example_2_4"));
  REQUIRE(out.exit_code == 0);
  CHECK(out.error.empty());
  CHECK(out.report_name == "report.json");
  REQUIRE(out.tables.size() == 1);
  CHECK(out.tables[0].name == "geometry_1.csv");
  CHECK(out.tables[0].text == "diameter,radius,radius_constrained\n1,0.5,0.666666666667\n");

  const json rep = report_json(out);
  CHECK(rep.at("exit_code") == 0);
  CHECK(rep.at("partial") == false);
  const json task = rep.at("tasks").at(0);
  CHECK(task.at("diameter").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(task.at("radius").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(task.at("radius_constrained").get<double>() ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(task.at("diameter_exact") == true);
  CHECK(task.at("radius_exact") == true);
}

TEST_CASE("embedded triangle fixture: the data slice reproduces the vertex set") {
  const RunOutcome out = run_document_text(fixture_document("example_2_4_embedded"));
  REQUIRE(out.exit_code == 0);
  const json task = report_json(out).at("tasks").at(0);
  CHECK(task.at("empty") == false);
  CHECK(task.at("diameter").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(task.at("radius").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(task.at("radius_constrained").get<double>() ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(table_named(out, "geometry_1.csv").text ==
        "diameter,radius,radius_constrained\n1,0.5,0.666666666667\n");
}

TEST_CASE("doubled-sampling fixture: angle rows, recovery, and sweep tables") {
  const RunOutcome out = run_document_text(fixture_document("trig_doubled"));
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.tables.size() == 3);
  const json rep = report_json(out);
  REQUIRE(rep.at("tasks").size() == 3);

  const json mu = rep.at("tasks").at(0);
  CHECK(mu.at("exact") == true);
  CHECK(mu.at("mu_v_n").at("infinite") == false);
  CHECK(mu.at("mu_v_n").at("value").get<double>() <= 2.0 + 1e-6);
  CHECK(mu.at("mu_n_v").at("value").get<double>() <= 4.0 + 1e-6);
  CHECK(mu.at("mu_n_v").at("value").get<double>() >=
        mu.at("mu_v_n").at("value").get<double>() * 0.5 - 1e-9);
  const std::string mu_table = table_named(out, "mu_1.csv").text;
  CHECK(mu_table.substr(0, 36) == "quantity,value,lower,upper,infinite\n");
  CHECK(mu_table.find("mu_v_n,") != std::string::npos);
  CHECK(mu_table.find("mu_n_v,") != std::string::npos);

  const json rec = rep.at("tasks").at(1);
  CHECK(rec.at("data_source") == "f");
  CHECK(rec.at("data_residual").get<double>() <= 1e-8);
  CHECK(rec.at("bounds_infinite") == false);
  // The sample lies within the model accuracy band, so the worst-case bound
  // applies to the observed deviation.
  CHECK(rec.at("actual_error").get<double>() <= rec.at("bound_global").get<double>() + 1e-9);
  CHECK(rec.at("model_distance").get<double>() <= 0.1 + 1e-9);

  const json sw = rep.at("tasks").at(2);
  CHECK(sw.at("stages") == 2);
  const json rows = sw.at("rows");
  REQUIRE(rows.size() == 2);
  CHECK(rows.at(0).at("m") == 3);
  CHECK(rows.at(1).at("m") == 6);
  for (const auto& r : rows) {
    CHECK(r.at("actual_error").get<double>() <= r.at("bound").get<double>() + 1e-9);
    CHECK(r.at("mu").get<double>() * 0.999999 <= 1.0 / r.at("gamma").get<double>() + 1e-9);
  }
  const std::string sweep_table = table_named(out, "sweep_3.csv").text;
  CHECK(sweep_table.substr(0, 47) == "m,n_of_m,mu,epsilon,bound,actual_error,gamma\n3,");
}

TEST_CASE("every fixture runs to completion with its expected table set") {
  struct Expect {
    const char* name;
    size_t tables;
  };
  const Expect plan[] = {{"example_2_4", 1},     {"example_2_4_embedded", 1},
                         {"trig_doubled", 3},    {"rademacher_riesz", 2},
                         {"hilbert_ls", 3},      {"l1_totality", 1},
                         {"sphere_linear", 3},   {"sandwich_hilbert", 3}};
  for (const auto& e : plan) {
    CAPTURE(e.name);
    const RunOutcome out = run_document_text(fixture_document(e.name));
    CHECK(out.exit_code == 0);
    CHECK(out.error.empty());
    CHECK(out.tables.size() == e.tables);
    const json rep = report_json(out);
    CHECK(rep.at("partial") == false);
    CHECK(rep.at("tasks").size() == parse_document(fixture_document(e.name)).tasks.size());
  }
}

TEST_CASE("single-coordinate model in the deviation-one ambient: certified interval") {
  const RunOutcome out = run_document_text(fixture_document("l1_totality"));
  REQUIRE(out.exit_code == 0);
  const json mu = report_json(out).at("tasks").at(0);
  // The model direction's norming constant is exactly 2 for these rows; the
  // non-uniform ambient reports an interval that must bracket it.
  CHECK(mu.at("mu_v_n").at("lower").get<double>() <= 2.0 + 1e-6);
  CHECK(mu.at("mu_v_n").at("upper").get<double>() >= 2.0 - 1e-6);
  CHECK(mu.at("mu_v_n").at("infinite") == false);
}

TEST_CASE("harmonic-pair fixture: net design certifies the requested angle bound") {
  const RunOutcome out = run_document_text(fixture_document("sphere_linear"));
  REQUIRE(out.exit_code == 0);
  const json des = report_json(out).at("tasks").at(1);
  CHECK(des.at("task") == "design");
  CHECK(des.at("delta_achieved").get<double>() <= 0.2 + 1e-9);
  CHECK(des.at("mu_bound").get<double>() == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(des.at("mu_achieved").get<double>() <= 2.5 + 1e-6);
  CHECK(des.at("size").get<int>() >= 2);

  const json rec = report_json(out).at("tasks").at(2);
  CHECK(rec.at("data_residual").get<double>() <= 1e-8);
  CHECK(rec.at("actual_error").get<double>() <= rec.at("bound_global").get<double>() + 1e-9);
}

TEST_CASE("euclidean slice fixture: sandwich passes and geometry matches the eigensolve") {
  const RunOutcome out = run_document_text(fixture_document("sandwich_hilbert"));
  REQUIRE(out.exit_code == 0);
  const json rep = report_json(out);

  const json sw = rep.at("tasks").at(1);
  CHECK(sw.at("empty") == false);
  const double gamma = sw.at("gamma").get<double>();
  CHECK(gamma > 0.0);
  CHECK(gamma < 1.0);
  CHECK(sw.at("pass") == true);
  CHECK(sw.at("oracle_exact") == true);
  CHECK(sw.at("lower").get<double>() <= sw.at("oracle").get<double>() + 1e-9);
  CHECK(sw.at("oracle").get<double>() <= sw.at("upper").get<double>() + 1e-9);
  // A monotone ascent can only underestimate the exact diameter.
  CHECK(sw.at("ascent").at("value").get<double>() <= sw.at("oracle").get<double>() + 1e-9);

  const json geo = rep.at("tasks").at(2);
  CHECK(geo.at("empty") == false);
  CHECK(geo.at("diameter_exact") == true);
  CHECK(geo.at("diameter").get<double>() ==
        doctest::Approx(sw.at("oracle").get<double>()).epsilon(1e-9));
  CHECK(geo.at("radius").get<double>() ==
        doctest::Approx(0.5 * geo.at("diameter").get<double>()).epsilon(1e-9));
  CHECK(geo.at("radius").get<double>() == geo.at("radius_constrained").get<double>());
}

TEST_CASE("determinism: equal documents and seeds give byte-identical outputs") {
  for (const std::string name : {"trig_doubled", "sandwich_hilbert", "sphere_linear"}) {
    CAPTURE(name);
    const std::string text = fixture_document(name);
    const RunOutcome a = run_document_text(text, 7);
    const RunOutcome b = run_document_text(text, 7);
    CHECK(a.report == b.report);
    REQUIRE(a.tables.size() == b.tables.size());
    for (size_t i = 0; i < a.tables.size(); ++i) {
      CHECK(a.tables[i].name == b.tables[i].name);
      CHECK(a.tables[i].text == b.tables[i].text);
    }
  }
}

TEST_CASE("hidden model direction: rejected before any task with a printed witness") {
  ProblemDocument doc;
  doc.space = {"sequence", 0, 1, 4, "sup", 2.0, {}, {}};
  doc.subspace.preset = "coordinates";
  doc.subspace.indices = {2};
  doc.measurements.kind = "general";
  doc.measurements.rows = Matrix::Zero(2, 4);
  doc.measurements.rows(0, 0) = 1;
  doc.measurements.rows(1, 1) = 1;
  doc.epsilon = 0.5;
  TaskSpec t;
  t.task = "mu";
  doc.tasks = {t};

  const RunOutcome out = run_document(doc);
  CHECK(out.exit_code == 2);
  CHECK(out.error.find("measurement kernel") != std::string::npos);
  CHECK(out.error.find("[") != std::string::npos);  // witness coordinates
  const json rep = report_json(out);
  CHECK(rep.at("exit_code") == 2);
  CHECK(rep.at("partial") == true);
  CHECK(rep.at("tasks").empty());
  CHECK(out.tables.empty());
}

TEST_CASE("oversized uniform slice: radius oracles refuse and the run reports a solver failure") {
  ProblemDocument doc;
  doc.space = {"sequence", 0, 1, 8, "sup", 2.0, {}, {}};
  doc.subspace.preset = "coordinates";
  doc.subspace.indices = {0};
  doc.measurements.kind = "general";
  doc.measurements.rows = Matrix::Ones(1, 8);
  doc.epsilon = 1.0;
  TaskSpec geo;
  geo.task = "geometry";
  geo.has_w = true;
  geo.w = Vector::Ones(1);
  doc.tasks = {geo};

  const RunOutcome out = run_document(doc);
  CHECK(out.exit_code == 3);
  CHECK(out.error.find("task 1 (geometry)") != std::string::npos);
  const json rep = report_json(out);
  CHECK(rep.at("partial") == true);
  CHECK(rep.at("tasks").at(0).at("failed") == true);
}

TEST_CASE("parsing: malformed and contradictory documents are rejected") {
  const RunOutcome bad = run_document_text("{ this is not json");
  CHECK(bad.exit_code == 2);
  CHECK(!bad.error.empty());
  CHECK(report_json(bad).at("exit_code") == 2);

  const std::string base = fixture_document("example_2_4");
  json j = json::parse(base);

  {
    json k = j;
    k["surprise"] = 1;
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["space"]["grid"] = "helix";
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["space"].erase("n");
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k.erase("epsilon");
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["tasks"][0]["task"] = "levitate";
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["tasks"][0]["w"] = {0.0, 2.0};  // vertices already present
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["subspace"]["preset"] = "poly";  // degree missing for the new preset
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["algorithm"] = {{"fit", "pnorm"}};  // fit_p required
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["epsilon"] = "one";
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
  {
    json k = j;
    k["tasks"][0]["vertices"] = json::array();  // empty matrix
    CHECK_THROWS_AS(parse_document(k.dump()), StructuralError);
  }
}

TEST_CASE("validation that only surfaces at run time maps to the validation exit") {
  // Well-formed document whose recover task carries data of the wrong length.
  ProblemDocument doc = parse_document(fixture_document("trig_doubled"));
  doc.tasks[1].has_f = false;
  doc.tasks[1].f = Vector();
  doc.tasks[1].has_w = true;
  doc.tasks[1].w = Vector::Ones(5);  // operator has six rows
  const RunOutcome out = run_document(doc);
  CHECK(out.exit_code == 2);
  CHECK(out.error.find("task 2 (recover)") != std::string::npos);
  const json rep = report_json(out);
  CHECK(rep.at("partial") == true);
  // The first task completed before the failure and its table survived.
  REQUIRE(rep.at("tasks").size() == 2);
  CHECK(rep.at("tasks").at(0).at("task") == "mu");
  CHECK(rep.at("tasks").at(1).at("failed") == true);
  CHECK(out.tables.size() == 1);
}

TEST_CASE("algorithm overrides: explicit fit and lifting choices reach the pipeline") {
  ProblemDocument doc;
  doc.space = {"sequence", 0, 1, 3, "sup", 2.0, {}, {}};
  doc.subspace.preset = "coordinates";
  doc.subspace.indices = {0, 1};
  doc.measurements.kind = "general";
  doc.measurements.rows = Matrix::Identity(3, 3);
  doc.epsilon = 0.3;
  doc.algorithm.fit = "minimax";
  doc.algorithm.lift = "dual_basis";
  doc.algorithm.psi = Matrix::Identity(3, 3);
  TaskSpec rec;
  rec.task = "recover";
  rec.has_w = true;
  rec.w = Vector(3);
  rec.w << 0.4, -0.2, 0.1;
  doc.tasks = {rec};
  doc.export_rows = true;
  doc.output.csv_prefix = "pre_";
  doc.output.report = "out.json";

  const RunOutcome out = run_document(doc);
  REQUIRE(out.exit_code == 0);
  CHECK(out.report_name == "out.json");
  REQUIRE(out.tables.size() == 2);
  CHECK(out.tables[0].name == "pre_recover_1.csv");
  CHECK(out.tables[1].name == "pre_rows.csv");
  CHECK(out.tables[1].text.substr(0, 12) == "row,x0,x1,x2");
  const json rec_entry = report_json(out).at("tasks").at(0);
  CHECK(rec_entry.at("data_residual").get<double>() <= 1e-8);

  // Round trip of the canonical form preserves the overrides.
  const ProblemDocument doc2 = parse_document(serialize_document(doc));
  CHECK(doc2.algorithm.fit == "minimax");
  CHECK(doc2.algorithm.lift == "dual_basis");
  CHECK(doc2.algorithm.psi.isApprox(Matrix::Identity(3, 3)));
  CHECK(doc2.export_rows == true);
  CHECK(doc2.output.csv_prefix == "pre_");
  CHECK(serialize_document(doc2) == serialize_document(doc));
}

TEST_CASE("builders: custom grids round-trip and reject nonsense") {
  ProblemDocument doc;
  doc.space.grid = "custom";
  doc.space.norm = "lp";
  doc.space.p = 3.0;
  doc.space.nodes = Vector(3);
  doc.space.nodes << 0.0, 0.4, 1.0;
  doc.space.weights = Vector(3);
  doc.space.weights << 0.2, 0.5, 0.3;
  doc.subspace.preset = "coordinates";
  doc.subspace.indices = {0};
  doc.measurements.kind = "general";
  doc.measurements.rows = Matrix::Ones(1, 3);
  doc.epsilon = 0.1;

  const std::string text = serialize_document(doc);
  const ProblemDocument doc2 = parse_document(text);
  CHECK(doc2.space.nodes.size() == 3);
  CHECK(doc2.space.weights[1] == doctest::Approx(0.5));
  CHECK(serialize_document(doc2) == text);

  const SpacePtr s = build_space(doc2.space);
  CHECK(s->kind() == NormKind::Lp);
  CHECK(s->p() == 3.0);

  SpaceSpec bad = doc2.space;
  bad.grid = "spiral";
  CHECK_THROWS_AS(build_space(bad), StructuralError);
  SubspaceSpec wrong;
  wrong.preset = "explicit";
  wrong.basis = Matrix::Ones(2, 1);  // wrong grid size
  CHECK_THROWS_AS(build_subspace(s, wrong), StructuralError);
  MeasurementSpec mrows;
  mrows.kind = "general";
  mrows.rows = Matrix::Ones(1, 2);
  CHECK_THROWS_AS(build_measurements(s, mrows), StructuralError);
}
