#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "ordelic/io.hpp"

using namespace ordelic;

namespace {

void check_same_surrogate(const Surrogate& a, const Surrogate& b) {
  CHECK(a.kind() == b.kind());
  CHECK(a.thresholds() == b.thresholds());
  CHECK(a.gamma_min() == b.gamma_min());
  CHECK(a.gamma_max() == b.gamma_max());
  CHECK(a.lipschitz(NormKind::kL2) == b.lipschitz(NormKind::kL2));
  for (const auto& p : sample_simplex(a.outcomes(), 1000, 3)) {
    CHECK(std::abs(a.gamma(p) - b.gamma(p)) <= 1e-12);
    CHECK(a.discrete(p) == b.discrete(p));
    CHECK(a.link(a.gamma(p)) == b.link(b.gamma(p)));
  }
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("numbers round-trip through text") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 18.70828693386987, 1e300}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("surrogate export round-trips") {
  const Surrogate emb(fixture::embedding_surrogate());
  const Surrogate nrm(fixture::normals_surrogate());
  for (const Surrogate* s : {&emb, &nrm}) {
    const Json j = surrogate_to_json(*s);
    CHECK(j.at("kind") == std::string(s->kind()));
    const Surrogate back = surrogate_from_json(Json::parse(j.dump()));
    check_same_surrogate(*s, back);
    CHECK(surrogate_to_json(back).dump() == j.dump());
  }
  Json bad = surrogate_to_json(nrm);
  bad["kind"] = "spline";
  CHECK_THROWS_AS(surrogate_from_json(bad), Error);
}

TEST_CASE("property spec round-trips") {
  const Json cost = Json::parse(R"({"n":3,"reports":["a","b","c"],
      "cost_matrix":[[0,3,5],[1,0,3],[3,1,0]],"embedding":{"phi":[0,1,3],"outer_slope":3}})");
  const auto def = property_from_json(cost);
  CHECK(def.cost->entries() == fixture::three_outcome_cost().entries());
  CHECK(*def.phi == std::vector<double>{0, 1, 3});
  CHECK(property_from_json(property_to_json(def)).cost->entries() == def.cost->entries());

  const Json bds = Json::parse(R"({"n":3,"boundaries":[{"c":[-3,1,0],"b":-2},{"c":[5,4,0],"b":3}]})");
  const auto d2 = property_from_json(bds);
  CHECK(d2.reports.size() == 3);
  CHECK(d2.resolved_boundaries().size() == 2);
  const auto again = property_from_json(property_to_json(d2));
  CHECK(again.boundaries[1].c == std::vector<double>{5, 4, 0});
  CHECK(again.boundaries[1].b == 3);

  Json both = cost;
  both["boundaries"] = bds["boundaries"];
  CHECK_THROWS_AS(property_from_json(both), Error);
  Json wrong = cost;
  wrong["n"] = 4;
  CHECK_THROWS_AS(property_from_json(wrong), Error);
}

TEST_CASE("dataset CSV round-trips") {
  const LabeledDataset data(3, {{"x0", 1}, {"x1", 3}, {"x0", 2}});
  std::stringstream ss;
  write_dataset_csv(ss, data);
  CHECK(ss.str().rfind("x_id,y\n", 0) == 0);
  const auto back = read_dataset_csv(ss, 3);
  REQUIRE(back.size() == 3);
  CHECK(back.rows()[1].x_id == "x1");
  CHECK(back.rows()[1].y == 3);
  std::stringstream bad("x_id,y\nx0,4\n");
  CHECK_THROWS_AS(read_dataset_csv(bad, 3), Error);
  std::stringstream header("id,label\nx0,1\n");
  CHECK_THROWS_AS(read_dataset_csv(header, 3), Error);
}

TEST_CASE("predictor and scenario round-trip") {
  PredictorTable f(PredictionKind::kDistribution);
  f.set("a", SimplexPoint({0.2, 0.3, 0.5}));
  const auto fb = predictor_from_json(Json::parse(predictor_to_json(f).dump()));
  CHECK(fb.distribution("a") == f.distribution("a"));
  PredictorTable h(PredictionKind::kDiscrete);
  h.set("a", 2);
  CHECK(predictor_from_json(predictor_to_json(h)).discrete("a") == 2);

  const Json sj = Json::parse(R"({"n":3,"features":[
      {"x_id":"x","weight":0.5,"conditional":{"plot":[0.42,0.02]}},
      {"x_id":"y","weight":0.5,"conditional":[0.2,0.3,0.5]}],
      "predictor":{"type":"perturbed","eta":0.25}})");
  const auto sc = scenario_from_json(sj);
  CHECK(sc.features[0].conditional == from_ternary_plot_coords(0.42, 0.02));
  CHECK(sc.predictor.kind == RecipeKind::kPerturbed);
  const auto back = scenario_from_json(scenario_to_json(sc));
  CHECK(back.features[1].conditional == sc.features[1].conditional);
  CHECK(back.predictor.eta == 0.25);
}

TEST_CASE("audit report JSON layout") {
  AuditReport r;
  r.notion = "surrogate";
  r.epsilon_hat = 0.25;
  r.bins = {2, 1, 0};
  BoundCheck b{"discretization", 0.1, std::numeric_limits<double>::infinity(), true, {{"K", 2.0}}, {}};
  r.bounds.push_back(b);
  const Json j = audit_report_to_json(r);
  for (const char* key : {"notion", "norm", "epsilon_hat", "bins", "bounds"}) CHECK(j.contains(key));
  CHECK(j["bins"]["min_size"] == 1);
  CHECK(j["bounds"][0]["rhs"] == "inf");
  CHECK(j["bounds"][0]["params"]["K"] == 2.0);
}

TEST_CASE("level-set grid") {
  const Surrogate s(fixture::normals_surrogate());
  const auto rows = level_set_grid(s, 2);
  CHECK(rows.size() == 6);
  std::stringstream ss;
  write_level_set_csv(ss, rows);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "p1,p2,p3,gamma_discrete,gamma_surrogate");
  int count = 0;
  while (std::getline(ss, line)) ++count;
  CHECK(count == 6);
  CHECK(level_set_grid(s, 40).size() == 41 * 42 / 2);
}

}
