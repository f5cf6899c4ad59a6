#include "ordelic/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ordelic {

namespace {

void check_breakpoints(const std::vector<double>& bps, std::size_t pieces) {
  if (pieces != bps.size() + 1) {
    throw Error(ErrorCode::kInvalidInput, "piece count must be breakpoints + 1");
  }
  for (std::size_t i = 1; i < bps.size(); ++i) {
    if (!(bps[i] > bps[i - 1])) {
      throw Error(ErrorCode::kInvalidInput, "breakpoints must be strictly increasing");
    }
  }
}

std::size_t count_below(const std::vector<double>& bps, double u) {
  return static_cast<std::size_t>(std::lower_bound(bps.begin(), bps.end(), u) - bps.begin());
}

bool is_breakpoint(const std::vector<double>& bps, double u) {
  return std::binary_search(bps.begin(), bps.end(), u);
}

}  // namespace

// ---------------------------------------------------------------------------

PiecewiseAffine::PiecewiseAffine(std::vector<double> breakpoints, std::vector<Affine> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  check_breakpoints(breakpoints_, pieces_.size());
}

std::size_t PiecewiseAffine::piece_index(double u) const {
  return count_below(breakpoints_, u);
}

double PiecewiseAffine::operator()(double u) const { return pieces_[piece_index(u)](u); }

std::pair<double, double> PiecewiseAffine::derivatives(double u) const {
  const std::size_t j = piece_index(u);
  if (is_breakpoint(breakpoints_, u)) return {pieces_[j].slope, pieces_[j + 1].slope};
  return {pieces_[j].slope, pieces_[j].slope};
}

double PiecewiseAffine::max_jump() const {
  double jump = 0.0;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double b = breakpoints_[j];
    jump = std::max(jump, std::abs(pieces_[j + 1](b) - pieces_[j](b)));
  }
  return jump;
}

bool PiecewiseAffine::nondecreasing(double tol) const {
  for (const auto& a : pieces_)
    if (a.slope < -tol) return false;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double b = breakpoints_[j];
    if (pieces_[j + 1](b) - pieces_[j](b) < -tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

PiecewiseQuadratic::PiecewiseQuadratic(std::vector<double> breakpoints,
                                       std::vector<Quadratic> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  check_breakpoints(breakpoints_, pieces_.size());
}

std::size_t PiecewiseQuadratic::piece_index(double u) const {
  return count_below(breakpoints_, u);
}

double PiecewiseQuadratic::operator()(double u) const { return pieces_[piece_index(u)](u); }

std::pair<double, double> PiecewiseQuadratic::derivatives(double u) const {
  const std::size_t j = piece_index(u);
  if (is_breakpoint(breakpoints_, u)) {
    return {pieces_[j].derivative(u), pieces_[j + 1].derivative(u)};
  }
  const double d = pieces_[j].derivative(u);
  return {d, d};
}

double PiecewiseQuadratic::max_value_jump() const {
  double jump = 0.0;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double b = breakpoints_[j];
    jump = std::max(jump, std::abs(pieces_[j + 1](b) - pieces_[j](b)));
  }
  return jump;
}

double PiecewiseQuadratic::max_derivative_jump() const {
  double jump = 0.0;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double b = breakpoints_[j];
    jump = std::max(jump, std::abs(pieces_[j + 1].derivative(b) - pieces_[j].derivative(b)));
  }
  return jump;
}

bool PiecewiseQuadratic::convex(double tol) const {
  for (const auto& q : pieces_)
    if (q.c2 < -tol) return false;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double b = breakpoints_[j];
    if (pieces_[j + 1].derivative(b) - pieces_[j].derivative(b) < -tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

MaxAffine::MaxAffine(std::vector<Affine> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw Error(ErrorCode::kInvalidInput, "MaxAffine needs a piece");
}

double MaxAffine::operator()(double u) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : pieces_) best = std::max(best, a(u));
  return best;
}

std::pair<double, double> MaxAffine::derivatives(double u) const {
  const double value = (*this)(u);
  const double tol = 1e-12 * std::max(1.0, std::abs(value));
  double left = std::numeric_limits<double>::infinity();
  double right = -std::numeric_limits<double>::infinity();
  for (const auto& a : pieces_) {
    if (value - a(u) <= tol) {
      left = std::min(left, a.slope);
      right = std::max(right, a.slope);
    }
  }
  return {left, right};
}

std::pair<double, double> subgradient_interval(const MaxAffine& f, double u) {
  return f.derivatives(u);
}

std::pair<double, double> subgradient_interval(const PiecewiseQuadratic& f, double u) {
  return f.derivatives(u);
}

// ---------------------------------------------------------------------------

std::vector<Chord> lower_convex_envelope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "envelope needs at least two points");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first == points[i - 1].first) {
      throw Error(ErrorCode::kInvalidInput, "duplicate u-coordinate in envelope input");
    }
    if (points[i].first < points[i - 1].first) {
      throw Error(ErrorCode::kInvalidInput, "envelope u-coordinates must be increasing");
    }
  }
  // Monotone chain; a point is dropped when it lies on or above the chord
  // joining its neighbours.
  std::vector<std::pair<double, double>> hull;
  for (const auto& pt : points) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (pt.second - a.second) -
                           (b.second - a.second) * (pt.first - a.first);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  std::vector<Chord> chords;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const auto& [u0, v0] = hull[i - 1];
    const auto& [u1, v1] = hull[i];
    const double slope = (v1 - v0) / (u1 - u0);
    chords.push_back({u0, u1, Affine{slope, v0 - slope * u0}});
  }
  return chords;
}

PiecewiseQuadratic integrate_from_zero(const PiecewiseAffine& v) {
  const auto& bps = v.breakpoints();
  const auto& pieces = v.pieces();
  std::vector<Quadratic> q(pieces.size());
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    q[j].c2 = pieces[j].slope / 2.0;
    q[j].c1 = pieces[j].intercept;
  }
  // Anchor the piece containing 0, then propagate continuity outward.
  const std::size_t anchor = v.piece_index(0.0);
  q[anchor].c0 = 0.0;
  for (std::size_t j = anchor; j + 1 < q.size(); ++j) {
    const double b = bps[j];
    q[j + 1].c0 = q[j](b) - (q[j + 1].c2 * b + q[j + 1].c1) * b;
  }
  for (std::size_t j = anchor; j > 0; --j) {
    const double b = bps[j - 1];
    q[j - 1].c0 = q[j](b) - (q[j - 1].c2 * b + q[j - 1].c1) * b;
  }
  return PiecewiseQuadratic(bps, std::move(q));
}

PiecewiseAffine expected_function(std::span<const PiecewiseAffine> v_per_outcome,
                                  const SimplexPoint& p) {
  if (v_per_outcome.size() != p.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "outcome count mismatch");
  }
  std::vector<double> bps;
  for (const auto& v : v_per_outcome)
    bps.insert(bps.end(), v.breakpoints().begin(), v.breakpoints().end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  std::vector<Affine> pieces(bps.size() + 1);
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    double rep = 0.0;
    if (bps.empty()) {
      rep = 0.0;
    } else if (j == 0) {
      rep = bps.front() - 1.0;
    } else if (j == bps.size()) {
      rep = bps.back() + 1.0;
    } else {
      rep = 0.5 * (bps[j - 1] + bps[j]);
    }
    for (std::size_t y = 0; y < p.size(); ++y) {
      const Affine& a = v_per_outcome[y].pieces()[v_per_outcome[y].piece_index(rep)];
      pieces[j].slope += p[y] * a.slope;
      pieces[j].intercept += p[y] * a.intercept;
    }
  }
  return PiecewiseAffine(std::move(bps), std::move(pieces));
}

std::pair<double, double> root_search_range(std::span<const PiecewiseAffine> v_per_outcome) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& v : v_per_outcome) {
    if (v.breakpoints().empty()) continue;
    lo = std::min(lo, v.breakpoints().front());
    hi = std::max(hi, v.breakpoints().back());
  }
  if (lo > hi) {
    lo = 0.0;
    hi = 0.0;
  }
  return {lo - 10.0, hi + 10.0};
}

double expected_identification_root(std::span<const PiecewiseAffine> v_per_outcome,
                                    const SimplexPoint& p) {
  const PiecewiseAffine e = expected_function(v_per_outcome, p);
  const auto [lo, hi] = root_search_range(v_per_outcome);
  constexpr double kZero = 1e-14;

  std::vector<double> nodes{lo};
  for (double b : e.breakpoints())
    if (b > lo && b < hi) nodes.push_back(b);
  nodes.push_back(hi);
  std::vector<double> vals(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = e(nodes[i]);

  if (vals.front() > kZero || vals.back() < -kZero) {
    throw Error(ErrorCode::kNoRoot,
                "expected identification function has no sign change on the search range");
  }
  // Leftmost point where E >= 0.
  std::size_t i = 0;
  double left = nodes.front();
  if (vals.front() < -kZero) {
    while (vals[i + 1] < -kZero) ++i;
    const double d = vals[i + 1] - vals[i];
    left = std::abs(vals[i + 1]) <= kZero ? nodes[i + 1] : nodes[i] - vals[i] * (nodes[i + 1] - nodes[i]) / d;
    left = std::clamp(left, nodes[i], nodes[i + 1]);
    if (std::abs(vals[i + 1]) > kZero) return left;
    i = i + 1;
  }
  // E is zero at nodes[i] (= left); extend across flat zero stretches.
  double right = left;
  while (i + 1 < nodes.size() && std::abs(vals[i]) <= kZero &&
         std::abs(vals[i + 1]) <= kZero) {
    right = nodes[++i];
  }
  return 0.5 * (left + right);
}

}  // namespace ordelic
