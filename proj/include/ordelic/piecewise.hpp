#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ordelic/simplex.hpp"

namespace ordelic {

/// u -> slope * u + intercept
struct Affine {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double u) const { return slope * u + intercept; }
  bool operator==(const Affine&) const = default;
};

/// Piecewise-affine function of one real variable. `pieces[j]` is active on
/// (breakpoints[j-1], breakpoints[j]]; the first and last pieces are unbounded.
class PiecewiseAffine {
 public:
  PiecewiseAffine() : pieces_{Affine{}} {}
  PiecewiseAffine(std::vector<double> breakpoints, std::vector<Affine> pieces);

  double operator()(double u) const;
  /// (left derivative, right derivative) at u.
  std::pair<double, double> derivatives(double u) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Affine>& pieces() const { return pieces_; }
  std::size_t piece_index(double u) const;

  /// Largest jump |f(b+) - f(b-)| over all breakpoints.
  double max_jump() const;
  bool nondecreasing(double tol = 1e-12) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Affine> pieces_;
};

/// u -> c2 u^2 + c1 u + c0
struct Quadratic {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double operator()(double u) const { return (c2 * u + c1) * u + c0; }
  double derivative(double u) const { return 2.0 * c2 * u + c1; }
  bool operator==(const Quadratic&) const = default;
};

class PiecewiseQuadratic {
 public:
  PiecewiseQuadratic() : pieces_{Quadratic{}} {}
  PiecewiseQuadratic(std::vector<double> breakpoints, std::vector<Quadratic> pieces);

  double operator()(double u) const;
  std::pair<double, double> derivatives(double u) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Quadratic>& pieces() const { return pieces_; }

  double max_value_jump() const;
  double max_derivative_jump() const;
  /// Derivative nondecreasing across and within pieces.
  bool convex(double tol = 1e-10) const;

 private:
  std::size_t piece_index(double u) const;

  std::vector<double> breakpoints_;
  std::vector<Quadratic> pieces_;
};

/// u -> max_j (a_j u + b_j); one per outcome in an embedded loss.
class MaxAffine {
 public:
  MaxAffine() = default;
  explicit MaxAffine(std::vector<Affine> pieces);

  double operator()(double u) const;
  std::pair<double, double> derivatives(double u) const;
  const std::vector<Affine>& pieces() const { return pieces_; }

 private:
  std::vector<Affine> pieces_;
};

using MaxAffineLoss = std::vector<MaxAffine>;

struct Chord {
  double u0 = 0.0;
  double u1 = 0.0;
  Affine line;
};

/// Chords of the lower convex hull of (u, v) points, left to right. Collinear
/// interior points are merged into a single chord.
std::vector<Chord> lower_convex_envelope(std::span<const std::pair<double, double>> points);

std::pair<double, double> subgradient_interval(const MaxAffine& f, double u);
std::pair<double, double> subgradient_interval(const PiecewiseQuadratic& f, double u);

/// Antiderivative F with F(0) = 0 and F' = v off the breakpoints.
PiecewiseQuadratic integrate_from_zero(const PiecewiseAffine& v);

/// u -> sum_y p_y v_y(u), on the union of all breakpoints.
PiecewiseAffine expected_function(std::span<const PiecewiseAffine> v_per_outcome,
                                  const SimplexPoint& p);

/// Search window used for root finding: [min breakpoint - 10, max breakpoint + 10].
std::pair<double, double> root_search_range(std::span<const PiecewiseAffine> v_per_outcome);

/// Root of u -> E_{Y~p} v(u, Y). Uses the first sign change from the left;
/// if the zero set there is an interval, returns its midpoint.
double expected_identification_root(std::span<const PiecewiseAffine> v_per_outcome,
                                    const SimplexPoint& p);

}  // namespace ordelic
