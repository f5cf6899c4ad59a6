#include "ordelic/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ordelic/lipschitz.hpp"

namespace ordelic {

EmbeddingInput build_envelope_loss(const CostMatrix& loss, std::vector<double> phi,
                                   std::optional<double> outer_slope) {
  if (phi.size() != loss.reports()) {
    throw Error(ErrorCode::kInvalidInput, "need one embedding point per report");
  }
  for (std::size_t i = 1; i < phi.size(); ++i) {
    if (!(phi[i] > phi[i - 1])) {
      throw Error(ErrorCode::kInvalidInput, "embedding points must be strictly increasing");
    }
  }
  const std::size_t n = loss.outcomes();
  std::vector<std::vector<Chord>> chords(n);
  double steepest = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t r = 0; r < phi.size(); ++r) pts.emplace_back(phi[r], loss(r, y));
    chords[y] = lower_convex_envelope(pts);
    for (const auto& c : chords[y]) steepest = std::max(steepest, std::abs(c.line.slope));
  }
  const double slope = outer_slope.value_or(1.0 + steepest);
  if (slope < steepest) {
    throw Error(ErrorCode::kInvalidInput, "outer slope does not dominate the chord slopes");
  }

  EmbeddingInput input;
  input.phi = phi;
  input.cost = loss;
  for (std::size_t y = 0; y < n; ++y) {
    const double u0 = phi.front(), v0 = loss(0, y);
    const double u1 = phi.back(), v1 = loss(phi.size() - 1, y);
    std::vector<Affine> pieces{Affine{-slope, v0 + slope * u0}};
    for (const auto& c : chords[y]) pieces.push_back(c.line);
    pieces.push_back(Affine{slope, v1 - slope * u1});
    pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
    MaxAffine f(std::move(pieces));
    for (std::size_t r = 0; r < phi.size(); ++r) {
      if (std::abs(f(phi[r]) - loss(r, y)) > 1e-10) {
        throw Error(ErrorCode::kInvalidInput,
                    "envelope loss does not reproduce l(r, y) at the embedding points; "
                    "the embedding is not convex for outcome " + std::to_string(y + 1));
      }
    }
    input.loss.push_back(std::move(f));
  }
  return input;
}

std::vector<double> default_embedding_points(std::size_t reports) {
  std::vector<double> phi(reports);
  for (std::size_t r = 0; r < reports; ++r) phi[r] = static_cast<double>(r);
  return phi;
}

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<double> merged_breakpoints(const std::vector<PiecewiseAffine>& v) {
  std::vector<double> t;
  for (const auto& f : v) t.insert(t.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace

std::vector<double> pseudo_identification(const EmbeddingInput& input, double u) {
  std::vector<double> out(input.outcomes());
  for (std::size_t y = 0; y < out.size(); ++y) {
    const auto [left, right] = input.loss[y].derivatives(u);
    if (left == right) {
      out[y] = left;
    } else if (sign(left) != sign(right)) {
      out[y] = 0.0;
    } else {
      out[y] = 0.5 * (left + right);
    }
  }
  return out;
}

std::vector<double> interpolation_set(const std::vector<double>& phi) {
  std::vector<double> u(phi);
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) u.push_back(0.5 * (phi[i] + phi[i + 1]));
  std::sort(u.begin(), u.end());
  return u;
}

std::vector<PiecewiseAffine> interpolate_identification(const EmbeddingInput& input) {
  const auto grid = interpolation_set(input.phi);
  std::vector<std::vector<double>> values;  // [node][outcome]
  for (double u : grid) values.push_back(pseudo_identification(input, u));

  std::vector<PiecewiseAffine> out;
  for (std::size_t y = 0; y < input.outcomes(); ++y) {
    std::vector<Affine> pieces;
    pieces.push_back(Affine{1.0, values.front()[y] - grid.front()});
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double slope = (values[i + 1][y] - values[i][y]) / (grid[i + 1] - grid[i]);
      pieces.push_back(Affine{slope, values[i][y] - slope * grid[i]});
    }
    pieces.push_back(Affine{1.0, values.back()[y] - grid.back()});
    PiecewiseAffine f(grid, std::move(pieces));
    if (!f.nondecreasing()) {
      throw Error(ErrorCode::kInvalidInput,
                  "interpolated identification is decreasing for outcome " +
                      std::to_string(y + 1) + "; the embedded loss is not convex");
    }
    out.push_back(std::move(f));
  }
  return out;
}

double gamma_surrogate_eval(const SmoothedSurrogate& s, const SimplexPoint& p) {
  const std::size_t n = s.outcomes();
  if (p.size() != n) throw Error(ErrorCode::kDimensionMismatch, "distribution size mismatch");
  const auto& nodes = s.interpolation;
  auto expected_at = [&](double u) {
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) acc += p[y] * s.v_bar[y](u);
    return acc;
  };
  auto piece_root = [&](double rep) {
    double a = 0.0, b = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const Affine& f = s.v_bar[y].pieces()[s.v_bar[y].piece_index(rep)];
      a += p[y] * f.slope;
      b += p[y] * f.intercept;
    }
    if (!(a > 0.0)) throw Error(ErrorCode::kNoRoot, "flat expected identification piece");
    return -b / a;
  };
  if (nodes.empty()) return piece_root(0.0);

  std::size_t j = 0;
  double prev = 0.0, cur = expected_at(nodes[0]);
  if (cur > 0.0) return piece_root(nodes[0] - 1.0);
  while (true) {
    ++j;
    if (j == nodes.size()) return cur == 0.0 ? nodes.back() : piece_root(nodes.back() + 1.0);
    prev = cur;
    cur = expected_at(nodes[j]);
    if (cur > 0.0) break;
  }
  const double slope = (cur - prev) / (nodes[j] - nodes[j - 1]);
  return nodes[j - 1] - prev / slope;
}

int threshold_link(const std::vector<double>& thresholds, double u) {
  int below = 0;
  for (double t : thresholds)
    if (t < u) ++below;
  return 1 + below;
}

int link_eval(const SmoothedSurrogate& s, double u) { return threshold_link(s.thresholds, u); }

double surrogate_lipschitz(const SmoothedSurrogate& s, NormKind norm) {
  return piecewise_lipschitz_bound(ratio_pieces(s.v_bar), s.outcomes(), norm);
}

SmoothedSurrogate surrogate_from_identification(std::vector<PiecewiseAffine> v_bar,
                                                std::vector<double> thresholds,
                                                std::optional<CostMatrix> cost) {
  if (v_bar.empty()) throw Error(ErrorCode::kInvalidInput, "no outcomes");
  std::sort(thresholds.begin(), thresholds.end());
  SmoothedSurrogate s;
  s.v_bar = std::move(v_bar);
  s.thresholds = std::move(thresholds);
  s.interpolation = merged_breakpoints(s.v_bar);
  s.cost = std::move(cost);
  for (const auto& v : s.v_bar) s.l_bar.push_back(integrate_from_zero(v));

  // The property is quasilinear (its sub- and superlevel sets are
  // halfspaces), so its extremes sit at the simplex vertices.
  const std::size_t n = s.outcomes();
  s.gamma_min = std::numeric_limits<double>::infinity();
  s.gamma_max = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < n; ++y) {
    const double g = gamma_surrogate_eval(s, SimplexPoint::vertex(n, y));
    s.gamma_min = std::min(s.gamma_min, g);
    s.gamma_max = std::max(s.gamma_max, g);
  }
  s.lipschitz = surrogate_lipschitz(s, NormKind::kL2);

  std::vector<double> probe{s.gamma_min, s.gamma_max};
  for (double t : s.interpolation)
    if (t > s.gamma_min && t < s.gamma_max) probe.push_back(t);
  for (const auto& v : s.v_bar)
    for (double u : probe) s.vbar_sup = std::max(s.vbar_sup, std::abs(v(u)));
  return s;
}

SmoothedSurrogate build_surrogate(const EmbeddingInput& input) {
  auto v_bar = interpolate_identification(input);
  std::vector<double> thresholds;
  for (std::size_t i = 0; i + 1 < input.phi.size(); ++i)
    thresholds.push_back(0.5 * (input.phi[i] + input.phi[i + 1]));
  SmoothedSurrogate s = surrogate_from_identification(std::move(v_bar), std::move(thresholds),
                                                      input.cost);
  s.phi = input.phi;
  s.interpolation = interpolation_set(input.phi);
  return s;
}

SmoothedSurrogate normalize_surrogate(const SmoothedSurrogate& s) {
  const double lo = s.gamma_min;
  const double width = s.gamma_max - s.gamma_min;
  if (!(width > 1e-12)) {
    throw Error(ErrorCode::kDegenerate, "property range has zero length");
  }
  if (lo == 0.0 && width == 1.0) return s;
  auto map = [&](double u) { return (u - lo) / width; };

  SmoothedSurrogate out = s;
  out.v_bar.clear();
  out.l_bar.clear();
  for (const auto& v : s.v_bar) {
    // V*(w) = V(lo + width * w)
    std::vector<double> bps;
    for (double b : v.breakpoints()) bps.push_back(map(b));
    std::vector<Affine> pieces;
    for (const auto& a : v.pieces())
      pieces.push_back(Affine{a.slope * width, a.slope * lo + a.intercept});
    out.v_bar.emplace_back(std::move(bps), std::move(pieces));
    out.l_bar.push_back(integrate_from_zero(out.v_bar.back()));
  }
  for (double& u : out.interpolation) u = map(u);
  for (double& u : out.thresholds) u = map(u);
  for (double& u : out.phi) u = map(u);
  out.gamma_min = 0.0;
  out.gamma_max = 1.0;
  out.lipschitz = s.lipschitz / width;
  return out;
}

}  // namespace ordelic
