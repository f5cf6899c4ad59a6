#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "ordelic/discrete.hpp"

using namespace ordelic;

namespace {

void check_unit_parallel(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  double plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    plus = std::max(plus, std::abs(a[i] - b[i]));
    minus = std::max(minus, std::abs(a[i] + b[i]));
  }
  CHECK(std::min(plus, minus) < tol);
}

}  // namespace

TEST_SUITE("discrete") {

TEST_CASE("cost argmin at vertices and on a tie") {
  const auto loss = fixture::three_outcome_cost();
  CHECK(gamma_from_cost(loss, SimplexPoint::vertex(3, 0)) == std::vector<int>{1});
  CHECK(gamma_from_cost(loss, SimplexPoint::vertex(3, 2)) == std::vector<int>{3});
  CHECK(gamma_from_cost(loss, SimplexPoint({2.0 / 3, 0, 1.0 / 3})) == std::vector<int>{1, 2});
  CHECK_THROWS_AS(CostMatrix({{0, 1, 2}}), Error);
  CHECK_THROWS_AS(CostMatrix({{0, 1, 2}, {0, -1, 2}}), Error);
  CHECK_THROWS_AS(CostMatrix({{0, 1, 2}, {0, 1}}), Error);
}

TEST_CASE("cost argmin agrees with a brute-force oracle") {
  const auto loss = fixture::three_outcome_cost();
  for (const auto& p : sample_simplex(3, 5000, 3))
    CHECK(gamma_from_cost(loss, p) == oracle::argmin_rows(loss.entries(), p.vec()));
}

TEST_CASE("homogenized boundaries") {
  const auto a = homogenize_boundary({{-3, 1, 0}, -2});
  check_unit_parallel(a.o, fixture::normal_one(), 1e-15);
  CHECK(a.o[0] < 0);  // keeps the sign of c - b 1
  const auto b = homogenize_boundary({{5, 4, 0}, 3});
  check_unit_parallel(b.o, fixture::normal_two(), 1e-15);
  const auto c = homogenize_boundary({{1, 0, 0}, 0});
  CHECK(c.o == std::vector<double>{1, 0, 0});
  CHECK_THROWS_AS(homogenize_boundary({{2, 2, 2}, 2}), Error);
  CHECK_THROWS_AS(homogenize_boundary({{1, 1, 1}, 0}), Error);
}

TEST_CASE("null-space normals from the printed boundary points") {
  const auto o1 = normal_from_boundary_samples({SimplexPoint({0.7, 0.1, 0.2}),
                                                SimplexPoint({0.68, 0.04, 0.28})});
  check_unit_parallel(o1.o, fixture::normal_one(), 1e-12);
  const auto o2 = normal_from_boundary_samples({SimplexPoint({0.5, 0.125, 0.375}),
                                                SimplexPoint({0.25, 0.4375, 0.3125})});
  check_unit_parallel(o2.o, fixture::normal_two(), 1e-12);
  const SimplexPoint p({0.7, 0.1, 0.2});
  CHECK_THROWS_AS(normal_from_boundary_samples({p, p}), Error);
  CHECK_THROWS_AS(normal_from_boundary_samples({p}), Error);
}

TEST_CASE("orientation from region witnesses") {
  std::vector<OrientedNormal> raw{{{1 / fixture::kRoot14, -3 / fixture::kRoot14, -2 / fixture::kRoot14}},
                                  {{2 / fixture::kRoot14, 1 / fixture::kRoot14, -3 / fixture::kRoot14}}};
  const std::vector<SimplexPoint> w{SimplexPoint::vertex(3, 0), SimplexPoint::centroid(3),
                                    SimplexPoint::vertex(3, 2)};
  const auto o = orient_normals(raw, w);
  for (int i = 0; i < 3; ++i) {
    CHECK(o[0].o[i] == doctest::Approx(fixture::normal_one()[i]).epsilon(1e-15));
    CHECK(o[1].o[i] == doctest::Approx(fixture::normal_two()[i]).epsilon(1e-15));
  }
  // single boundary: the second witness ends up on the positive side
  const auto single = orient_normals({{{1, -1, 0}}}, {SimplexPoint({0.6, 0.2, 0.2}), SimplexPoint({0.2, 0.6, 0.2})});
  CHECK(single[0].at(SimplexPoint({0.2, 0.6, 0.2})) > 0);
  // swapped witnesses are inconsistent
  CHECK_THROWS_AS(orient_normals(raw, {w[2], w[1], w[0]}), Error);
  CHECK_THROWS_AS(orient_normals(raw, {w[0], w[1]}), Error);
}

TEST_CASE("oriented normals satisfy the sign invariant on fresh region samples") {
  const auto spec = spec_from_cost({"a", "b", "c"}, fixture::three_outcome_cost(), std::nullopt, 17);
  std::size_t seen = 0;
  for (const auto& p : sample_simplex(3, 10000, 99)) {
    const auto g = gamma_from_cost(*spec.cost, p);
    if (g.size() != 1) continue;
    const int j = g.front();
    for (int i = 1; i <= 2; ++i) {
      const double v = spec.normals[i - 1].at(p);
      if (i < j) CHECK(v >= -1e-9);
      else CHECK(v <= 1e-9);
    }
    ++seen;
  }
  CHECK(seen > 9000);
}

TEST_CASE("region membership agrees with the cost argmin away from boundaries") {
  const auto spec = fixture::normals_spec();
  std::size_t checked = 0;
  for (const auto& p : sample_simplex(3, 100000, 5)) {
    if (std::abs(spec.normals[0].at(p)) < 1e-8 || std::abs(spec.normals[1].at(p)) < 1e-8) continue;
    ++checked;
    REQUIRE(gamma_from_cost(*spec.cost, p) == std::vector<int>{region_of(spec.normals, p)});
  }
  CHECK(checked > 99000);
}

TEST_CASE("boundary sampling stays on the boundary and inside the simplex") {
  const auto o1 = homogenize_boundary({{-3, 1, 0}, -2});
  for (const auto& p : sample_boundary(o1, 200, 8)) {
    CHECK(std::abs(fixture::first_boundary(p)) < 1e-10);
    for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] > 0);
  }
  const auto sym = homogenize_boundary({{1, -1, 0}, 0});
  for (const auto& p : sample_boundary(sym, 50, 8)) CHECK(std::abs(p[0] - p[1]) < 1e-12);
  // touches only the vertex e_3
  CHECK_THROWS_AS(sample_boundary(homogenize_boundary({{1, 1, 0}, 0}), 5, 1), Error);
  // n > 3 hit-and-run
  const auto o4 = homogenize_boundary({{1, -2, 0.5, 3}, 0.7});
  for (const auto& p : sample_boundary(o4, 100, 3)) {
    CHECK(std::abs(o4.at(p)) < 1e-10);
    for (std::size_t i = 0; i < 4; ++i) CHECK(p[i] > 0);
  }
}

TEST_CASE("sampled boundary points recover random normals up to sign") {
  Rng rng(2024);
  for (std::size_t n : {3u, 4u, 5u}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c(n);
      for (double& x : c) x = rng.normal();
      const auto q = sample_simplex_point(n, rng);
      const AffineBoundary bd{c, dot(c, q.probs())};
      const auto truth = homogenize_boundary(bd);
      const auto pts = sample_boundary(truth, n - 1, derive_seed(trial, "b"));
      const auto rec = normal_from_boundary_samples(pts);
      check_unit_parallel(rec.o, truth.o, 1e-8);
    }
  }
}

TEST_CASE("boundary gap") {
  const auto spec = fixture::normals_spec();
  const double gap = boundary_gap(spec, 0);
  CHECK(gap > 0);
  // oracle: segment endpoints on the simplex edges, brute-force distance
  const auto a = boundary_vertices(spec.normals[0]);
  const auto b = boundary_vertices(spec.normals[1]);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  CHECK(gap == doctest::Approx(oracle::segment_distance_brute(a[0].vec(), a[1].vec(), b[0].vec(),
                                                              b[1].vec()))
                   .epsilon(1e-9));
  CHECK(boundary_distance(spec.normals[0], spec.normals[0]) == doctest::Approx(0.0));

  // parallel slices {p1 = 0.3} and {p1 = 0.3 + d}: Euclidean distance d * sqrt(3/2)
  for (double d : {0.05, 0.2}) {
    const auto h1 = homogenize_boundary({{1, 0, 0}, 0.3});
    const auto h2 = homogenize_boundary({{1, 0, 0}, 0.3 + d});
    CHECK(boundary_distance(h1, h2) == doctest::Approx(d * std::sqrt(1.5)).epsilon(1e-9));
    // n = 4: Frank-Wolfe lower bound, tight to a small gap
    const auto g1 = homogenize_boundary({{1, 0, 0, 0}, 0.3});
    const auto g2 = homogenize_boundary({{1, 0, 0, 0}, 0.3 + d});
    const double exact = d * std::sqrt(4.0 / 3.0);
    const double fw = boundary_distance(g1, g2);
    CHECK(fw <= exact + 1e-12);
    CHECK(fw >= exact - 1e-3);
  }
}

TEST_CASE("strong orderability and spec construction") {
  CHECK_NOTHROW(require_strongly_orderable(fixture::normals_spec()));
  OrderableSpec same{{"a", "b", "c"}, {{fixture::normal_one()}, {fixture::normal_one()}}, std::nullopt};
  CHECK_THROWS_AS(require_strongly_orderable(same), Error);

  const auto from_bounds =
      spec_from_boundaries({"a", "b", "c"}, fixture::three_outcome_boundaries(), std::nullopt, 4);
  const auto from_cost = spec_from_cost({"a", "b", "c"}, fixture::three_outcome_cost(), std::nullopt, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      const double want = (i == 0 ? fixture::normal_one() : fixture::normal_two())[j];
      CHECK(from_bounds.normals[i].o[j] == doctest::Approx(want).epsilon(1e-12));
      CHECK(from_cost.normals[i].o[j] == doctest::Approx(want).epsilon(1e-12));
    }
  // boundaries crossing inside the simplex cannot be ordered
  const std::vector<AffineBoundary> crossing{{{1, -1, 0}, 0}, {{0, 1, -1}, 0}};
  CHECK_THROWS_AS(
      require_strongly_orderable(spec_from_boundaries({"a", "b", "c"}, crossing, std::nullopt, 4)),
      Error);
}

}
