#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "ordelic/normals.hpp"

using namespace ordelic;

TEST_SUITE("normals") {

TEST_CASE("identification matches the three-case form and the listing formula") {
  const auto s = fixture::normals_surrogate();
  const auto o1 = fixture::normal_one(), o2 = fixture::normal_two();
  for (std::size_t y = 0; y < 3; ++y) {
    for (double u : {-3.0, -0.5, 0.0, 0.3, 0.9, 1.0, 1.7, 4.0}) {
      double want;
      if (u <= 0) want = u - o1[y];
      else if (u <= 1) want = -o1[y] + (o1[y] - o2[y]) * u;
      else want = u - 1 - o2[y];
      CHECK(s.v[y](u) == doctest::Approx(want).epsilon(1e-14));
      CHECK(normals_identification_direct(s.spec.normals, u, y) == doctest::Approx(want).epsilon(1e-14));
    }
  }
  for (const auto& l : s.loss) {
    CHECK(l.max_derivative_jump() < 1e-12);
    CHECK(l(0) == 0.0);
  }
}

TEST_CASE("single boundary gives a unit-slope identification") {
  OrderableSpec one{{"a", "b"}, {{fixture::normal_one()}}, std::nullopt};
  const auto s = build_normals_surrogate(one);
  for (std::size_t y = 0; y < 3; ++y)
    for (double u : {-1.0, 0.0, 2.0}) CHECK(s.v[y](u) == doctest::Approx(u - fixture::normal_one()[y]));
  CHECK(clip_ceiling_link(s, -0.1) == 1);
  CHECK(clip_ceiling_link(s, 0.1) == 2);
  CHECK(clip_ceiling_link(s, 5.0) == 2);
}

TEST_CASE("coincident boundaries are rejected") {
  OrderableSpec same{{"a", "b", "c"}, {{fixture::normal_one()}, {fixture::normal_one()}}, std::nullopt};
  CHECK_THROWS_AS(build_normals_surrogate(same), Error);
}

TEST_CASE("closed-form property values") {
  const auto s = fixture::normals_surrogate();
  CHECK(normals_gamma_eval(s, SimplexPoint::vertex(3, 0)) == doctest::Approx(-1 / fixture::kRoot14));
  CHECK(normals_gamma_eval(s, SimplexPoint::vertex(3, 2)) == doctest::Approx(1 + 3 / fixture::kRoot14));
  CHECK(std::abs(normals_gamma_eval(s, SimplexPoint({0.7, 0.1, 0.2}))) < 1e-12);
  CHECK(s.gamma_min == doctest::Approx(-1 / fixture::kRoot14));
  CHECK(s.gamma_max == doctest::Approx(1 + 3 / fixture::kRoot14));
}

TEST_CASE("clip-ceiling link") {
  const auto s = fixture::normals_surrogate();
  CHECK(clip_ceiling_link(s, -0.2) == 1);
  CHECK(clip_ceiling_link(s, 0.0) == 1);
  CHECK(clip_ceiling_link(s, 0.6) == 2);
  CHECK(clip_ceiling_link(s, 1.0) == 2);
  CHECK(clip_ceiling_link(s, 1.8) == 3);
  CHECK(clip_ceiling_link(s, 9.0) == 3);
}

TEST_CASE("closed form equals the bisection root and the generic root") {
  const auto s = fixture::normals_surrogate();
  for (const auto& p : sample_simplex(3, 10000, 21)) {
    const double g = normals_gamma_eval(s, p);
    REQUIRE(std::abs(g - oracle::expected_root(s.v, p)) < 1e-9);
  }
}

TEST_CASE("expected identification crosses zero once but need not be monotone") {
  const auto s = fixture::normals_surrogate();
  bool decreasing_somewhere = false;
  for (const auto& p : sample_simplex(3, 3000, 2)) {
    const auto e = expected_function(s.v, p);
    int sign_changes = 0;
    double prev = e(-5.0);
    for (int i = 1; i <= 2000; ++i) {
      const double u = -5.0 + 10.0 * i / 2000;
      const double cur = e(u);
      if ((prev > 0) != (cur > 0)) ++sign_changes;
      if (cur < prev - 1e-12) decreasing_somewhere = true;
      prev = cur;
    }
    CHECK(sign_changes == 1);
  }
  CHECK(decreasing_somewhere);
}

TEST_CASE("refinement and boundary values") {
  const auto s = fixture::normals_surrogate();
  std::size_t checked = 0;
  for (const auto& p : sample_simplex(3, 100000, 13)) {
    if (std::abs(s.spec.normals[0].at(p)) < 1e-8 || std::abs(s.spec.normals[1].at(p)) < 1e-8) continue;
    ++checked;
    REQUIRE(gamma_from_cost(*s.spec.cost, p) ==
            std::vector<int>{clip_ceiling_link(s, normals_gamma_eval(s, p))});
  }
  CHECK(checked > 99000);
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& p : sample_boundary(s.spec.normals[i], 200, 4 + i))
      CHECK(std::abs(normals_gamma_eval(s, p) - double(i)) < 1e-9);
}

TEST_CASE("continuity across region boundaries") {
  const auto s = fixture::normals_surrogate();
  Rng rng(8);
  int crossings = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = sample_simplex_point(3, rng), b = sample_simplex_point(3, rng);
    if (region_of(s.spec.normals, a) == region_of(s.spec.normals, b)) continue;
    // walk the segment with step 1e-6 around the crossing found by bisection
    auto at = [&](double t) {
      return SimplexPoint({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])});
    };
    const int ra = region_of(s.spec.normals, a);
    const double t = oracle::bisect([&](double t) { return region_of(s.spec.normals, at(t)) == ra ? -1.0 : 1.0; }, 0, 1);
    const double step = 1e-6;
    const double lo = std::max(0.0, t - step), hi = std::min(1.0, t + step);
    const double jump = std::abs(normals_gamma_eval(s, at(hi)) - normals_gamma_eval(s, at(lo)));
    CHECK(jump <= s.lipschitz * norm_distance(at(lo), at(hi), NormKind::kL2) + 1e-12);
    ++crossings;
  }
  CHECK(crossings > 100);
}

TEST_CASE("Lipschitz bound") {
  const auto s = fixture::normals_surrogate();
  // the steepest point sits on the edge p2 = 0 next to the second boundary
  CHECK(s.lipschitz == doctest::Approx(18.708286933869708).epsilon(1e-9));
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const auto p = sample_simplex_point(3, rng), q = sample_simplex_point(3, rng);
    const double d = norm_distance(p, q, NormKind::kL2);
    CHECK(std::abs(normals_gamma_eval(s, p) - normals_gamma_eval(s, q)) <= s.lipschitz * d + 1e-9);
  }
}

TEST_CASE("pipeline from boundaries and from the cost matrix") {
  PropertyDefinition def;
  def.n = 3;
  def.reports = {"r1", "r2", "r3"};
  def.boundaries = fixture::three_outcome_boundaries();
  NormalsPipelineOptions opts;
  opts.seed = 5;
  opts.refine_samples = 20000;
  const auto a = run_normals_pipeline(def, opts);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(a.recovered[0].o[j] - fixture::normal_one()[j]) < 1e-8);
    CHECK(std::abs(a.recovered[1].o[j] - fixture::normal_two()[j]) < 1e-8);
  }
  CHECK(a.refine_pass_rate() == 1.0);
  CHECK(a.gaps.size() == 1);
  CHECK(a.gaps[0] > 0);

  PropertyDefinition cdef;
  cdef.n = 3;
  cdef.reports = def.reports;
  cdef.cost = fixture::three_outcome_cost();
  const auto b = run_normals_pipeline(cdef, opts);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(a.recovered[i].o[j] - b.recovered[i].o[j]) < 1e-8);
  CHECK(b.refine_pass_rate() == 1.0);

  PropertyDefinition crossing = def;
  crossing.boundaries = {{{1, -1, 0}, 0}, {{0, 1, -1}, 0}};
  CHECK_THROWS_AS(run_normals_pipeline(crossing, opts), Error);
}

TEST_CASE("random orderable specs at n = 4, 5") {
  for (std::size_t n : {4u, 5u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto rs = fixture::random_orderable_spec(n, 3 + trial % 2, 7 * n + trial);
      PropertyDefinition def;
      def.n = n;
      def.reports = rs.spec.reports;
      def.cost = rs.cost;
      def.witnesses = rs.witnesses;
      NormalsPipelineOptions opts;
      opts.seed = trial;
      opts.refine_samples = 5000;
      const auto res = run_normals_pipeline(def, opts);
      CHECK(res.max_normal_error() < 1e-8);
      CHECK(res.refine_pass_rate() == 1.0);
      for (const auto& p : sample_simplex(n, 500, trial))
        CHECK(std::abs(normals_gamma_eval(res.surrogate, p) - oracle::expected_root(res.surrogate.v, p)) < 1e-9);
    }
  }
}

}
