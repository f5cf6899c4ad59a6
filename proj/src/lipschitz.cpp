#include "ordelic/lipschitz.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ordelic {

double RatioPiece::value(const SimplexPoint& p) const {
  return dot(num, p.probs()) / dot(den, p.probs()) + offset;
}

std::vector<double> RatioPiece::gradient(const SimplexPoint& p) const {
  const double a = dot(num, p.probs());
  const double d = dot(den, p.probs());
  std::vector<double> g(num.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (num[i] * d - den[i] * a) / (d * d);
  return g;
}

std::vector<RatioPiece> ratio_pieces(std::span<const PiecewiseAffine> v) {
  const std::size_t n = v.size();
  std::vector<double> t;
  for (const auto& f : v) t.insert(t.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());

  auto values_at = [&](double u) {
    std::vector<double> out(n);
    for (std::size_t y = 0; y < n; ++y) out[y] = v[y](u);
    return out;
  };

  std::vector<RatioPiece> pieces;
  for (std::size_t j = 0; j <= t.size(); ++j) {
    double rep = 0.0;
    if (t.empty()) rep = 0.0;
    else if (j == 0) rep = t.front() - 1.0;
    else if (j == t.size()) rep = t.back() + 1.0;
    else rep = 0.5 * (t[j - 1] + t[j]);
    RatioPiece piece;
    piece.num.resize(n);
    piece.den.resize(n);
    for (std::size_t y = 0; y < n; ++y) {
      const Affine& a = v[y].pieces()[v[y].piece_index(rep)];
      piece.num[y] = -a.intercept;
      piece.den[y] = a.slope;
    }
    if (j > 0) {
      auto h = values_at(t[j - 1]);
      for (double& x : h) x = -x;
      piece.halfspaces.push_back(std::move(h));
    }
    if (j < t.size()) piece.halfspaces.push_back(values_at(t[j]));
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

std::vector<SimplexPoint> region_vertices(std::size_t n,
                                          const std::vector<std::vector<double>>& hs) {
  if (hs.size() > 2) {
    throw Error(ErrorCode::kInvalidInput, "region_vertices supports at most two halfspaces");
  }
  constexpr double tol = 1e-12;
  std::vector<std::vector<double>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    cand.push_back(std::move(v));
  }
  for (const auto& h : hs) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if ((h[a] > 0 && h[b] < 0) || (h[a] < 0 && h[b] > 0)) {
          const double w = h[b] / (h[b] - h[a]);
          std::vector<double> v(n, 0.0);
          v[a] = w;
          v[b] = 1.0 - w;
          cand.push_back(std::move(v));
        }
      }
    }
  }
  if (hs.size() == 2) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c) {
          Eigen::Matrix3d M;
          M << hs[0][a], hs[0][b], hs[0][c], hs[1][a], hs[1][b], hs[1][c], 1, 1, 1;
          Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
          if (!lu.isInvertible()) continue;
          const Eigen::Vector3d x = lu.solve(Eigen::Vector3d(0, 0, 1));
          if ((x.array() < -tol).any()) continue;
          std::vector<double> v(n, 0.0);
          v[a] = std::max(x(0), 0.0);
          v[b] = std::max(x(1), 0.0);
          v[c] = std::max(x(2), 0.0);
          cand.push_back(std::move(v));
        }
  }
  std::vector<SimplexPoint> out;
  for (auto& v : cand) {
    bool ok = true;
    for (const auto& h : hs) {
      const double scale = std::max(1.0, norm(h, NormKind::kLinf));
      if (dot(h, v) < -tol * scale) ok = false;
    }
    if (!ok) continue;
    double sum = 0.0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
    SimplexPoint p(std::move(v));
    const bool dup = std::any_of(out.begin(), out.end(), [&](const SimplexPoint& q) {
      return norm_distance(p, q, NormKind::kLinf) < 1e-12;
    });
    if (!dup) out.push_back(std::move(p));
  }
  return out;
}

namespace {

double gradient_norm_at(const RatioPiece& piece, const std::vector<double>& p, NormKind k) {
  const double d = dot(piece.den, p);
  if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
  const double a = dot(piece.num, p);
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (piece.num[i] * d - piece.den[i] * a) / (d * d);
  return tangent_dual_norm(g, k);
}

double segment_max(const RatioPiece& piece, const SimplexPoint& a, const SimplexPoint& b,
                   NormKind k) {
  const std::size_t n = a.size();
  std::vector<double> p(n);
  auto at = [&](double t) {
    for (std::size_t i = 0; i < n; ++i) p[i] = a[i] + t * (b[i] - a[i]);
    return gradient_norm_at(piece, p, k);
  };
  constexpr int kGrid = 128;
  double best = -1.0;
  int best_i = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = at(double(i) / kGrid);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (!std::isfinite(best)) return best;
  // golden-section refinement around the best grid cell
  double lo = std::max(0, best_i - 1) / double(kGrid);
  double hi = std::min(kGrid, best_i + 1) / double(kGrid);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = at(x1), f2 = at(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 > f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - phi * (hi - lo); f1 = at(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + phi * (hi - lo); f2 = at(x2);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace

double piecewise_lipschitz_bound(const std::vector<RatioPiece>& pieces, std::size_t n,
                                 NormKind norm) {
  double best = 0.0;
  for (const auto& piece : pieces) {
    const auto verts = region_vertices(n, piece.halfspaces);
    // single-point regions carry no segment of positive length
    if (verts.size() < 2) continue;
    for (const auto& v : verts) best = std::max(best, gradient_norm_at(piece, v.vec(), norm));
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        best = std::max(best, segment_max(piece, verts[i], verts[j], norm));
  }
  return best;
}

}  // namespace ordelic
