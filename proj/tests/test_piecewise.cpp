#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ordelic/piecewise.hpp"

using namespace ordelic;

TEST_SUITE("piecewise") {

TEST_CASE("piecewise affine evaluation uses half-open pieces") {
  PiecewiseAffine f({0.0, 1.0}, {{1, 0}, {2, 0}, {0, 2}});
  CHECK(f(-1) == -1);
  CHECK(f(0) == 0);        // left piece at the breakpoint
  CHECK(f(0.5) == 1);
  CHECK(f(1) == 2);
  CHECK(f(3) == 2);
  CHECK(f.piece_index(1.0) == 1);
  CHECK(f.piece_index(1.0 + 1e-12) == 2);
  const auto [l, r] = f.derivatives(1.0);
  CHECK(l == 2);
  CHECK(r == 0);
  CHECK(f.max_jump() == doctest::Approx(0.0));
  CHECK(f.nondecreasing());
  CHECK_FALSE(PiecewiseAffine({0.0}, {{1, 0}, {-1, 0}}).nondecreasing());
  CHECK_THROWS_AS(PiecewiseAffine({1.0, 0.0}, {{1, 0}, {1, 0}, {1, 0}}), Error);
  CHECK_THROWS_AS(PiecewiseAffine({0.0}, {{1, 0}}), Error);
}

TEST_CASE("lower convex envelope") {
  const std::vector<std::pair<double, double>> pts{{0, 0}, {1, 3}, {3, 1}};
  const auto chords = lower_convex_envelope(pts);
  REQUIRE(chords.size() == 1);
  CHECK(chords[0].line.slope == doctest::Approx(1.0 / 3.0));

  const std::vector<std::pair<double, double>> line{{0, 0}, {1, 1}, {2, 2}};
  CHECK(lower_convex_envelope(line).size() == 1);

  const std::vector<std::pair<double, double>> convex{{0, 5}, {1, 3}, {3, 0}};
  const auto c = lower_convex_envelope(convex);
  REQUIRE(c.size() == 2);
  CHECK(c[0].line.slope == doctest::Approx(-2.0));
  CHECK(c[1].line.slope == doctest::Approx(-1.5));

  const std::vector<std::pair<double, double>> dup{{0, 0}, {0, 1}};
  CHECK_THROWS_AS(lower_convex_envelope(dup), Error);
}

TEST_CASE("max-affine derivatives and subgradients") {
  MaxAffine f({{-3, 0}, {1, 0}, {3, -6}});
  CHECK(f(0) == 0);
  CHECK(f(3) == 3);
  const auto [l, r] = f.derivatives(0);
  CHECK(l == -3);
  CHECK(r == 1);
  const auto [a, b] = subgradient_interval(f, 3.0);
  CHECK(a == 1);
  CHECK(b == 3);
  const auto [c, d] = f.derivatives(1.5);
  CHECK(c == 1);
  CHECK(d == 1);
}

TEST_CASE("integration is continuous, convex for nondecreasing slopes, anchored at zero") {
  PiecewiseAffine v({0.0, 0.5, 2.0}, {{1, 0}, {2, 0}, {0, 1}, {1, -1}});
  const auto L = integrate_from_zero(v);
  CHECK(L(0) == doctest::Approx(0.0));
  CHECK(L.max_value_jump() < 1e-12);
  CHECK(L.max_derivative_jump() < 1e-12);
  CHECK(L.convex());
  // derivative equals v off the breakpoints (central differences)
  for (double u : {-1.3, 0.2, 1.0, 3.7}) {
    const double h = 1e-6;
    CHECK((L(u + h) - L(u - h)) / (2 * h) == doctest::Approx(v(u)).epsilon(1e-6));
  }
  // antiderivative values against numerical quadrature
  for (double u : {-2.0, 0.7, 2.5}) {
    double acc = 0.0;
    const int steps = 20000;
    for (int i = 0; i < steps; ++i) {
      const double t = u * (i + 0.5) / steps;
      acc += v(t) * u / steps;
    }
    CHECK(L(u) == doctest::Approx(acc).epsilon(1e-6));
  }
}

TEST_CASE("expected identification root matches bisection") {
  std::vector<PiecewiseAffine> v{PiecewiseAffine({0.0}, {{1, -1}, {2, -1}}),
                                 PiecewiseAffine({1.0}, {{1, -3}, {1, -3}})};
  for (double a : {0.1, 0.5, 0.9}) {
    const SimplexPoint p({a, 1 - a});
    CHECK(expected_identification_root(v, p) ==
          doctest::Approx(oracle::expected_root(v, p)).epsilon(1e-10));
  }
  // flat zero interval: midpoint
  std::vector<PiecewiseAffine> flat{PiecewiseAffine({0.0, 1.0}, {{1, 0}, {0, 0}, {1, -1}})};
  CHECK(expected_identification_root(flat, SimplexPoint({1.0})) == doctest::Approx(0.5));
  // no sign change within the search window
  std::vector<PiecewiseAffine> positive{PiecewiseAffine({0.0}, {{0, 1}, {0, 1}})};
  CHECK_THROWS_AS(expected_identification_root(positive, SimplexPoint({1.0})), Error);
}

}
