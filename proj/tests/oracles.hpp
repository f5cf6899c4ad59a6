#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the closed-form evaluators under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "ordelic/piecewise.hpp"
#include "ordelic/simplex.hpp"

namespace oracle {

/// Root of a single-crossing function by plain bisection on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 300 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Root of u -> sum_y p_y v_y(u) by bisection, evaluating each piecewise
/// function pointwise only.
inline double expected_root(std::span<const ordelic::PiecewiseAffine> v,
                            const ordelic::SimplexPoint& p) {
  auto e = [&](double u) {
    double acc = 0.0;
    for (std::size_t y = 0; y < v.size(); ++y) acc += p[y] * v[y](u);
    return acc;
  };
  return bisect(e, -100.0, 100.0);
}

/// All argmin indices (1-based) of <row_r, p> with an absolute tie tolerance.
inline std::vector<int> argmin_rows(const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& p, double tol = 1e-10) {
  std::vector<double> e;
  for (const auto& r : rows) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += r[i] * p[i];
    e.push_back(acc);
  }
  const double best = *std::min_element(e.begin(), e.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] - best <= tol) out.push_back(int(i) + 1);
  return out;
}

/// Kolmogorov-Smirnov statistic of the sample against a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
  }
  return d;
}

/// Euclidean distance between two segments in R^k via dense parameter search
/// followed by coordinate refinement (slow but assumption-free).
inline double segment_distance_brute(const std::vector<double>& a0, const std::vector<double>& a1,
                                     const std::vector<double>& b0, const std::vector<double>& b1) {
  auto dist = [&](double s, double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a0.size(); ++i) {
      const double d = (a0[i] + s * (a1[i] - a0[i])) - (b0[i] + t * (b1[i] - b0[i]));
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  double best = 1e300, bs = 0, bt = 0;
  constexpr int kGrid = 400;
  for (int i = 0; i <= kGrid; ++i)
    for (int j = 0; j <= kGrid; ++j) {
      const double v = dist(double(i) / kGrid, double(j) / kGrid);
      if (v < best) best = v, bs = double(i) / kGrid, bt = double(j) / kGrid;
    }
  for (double step = 1.0 / kGrid; step > 1e-13; step *= 0.5) {
    for (int k = 0; k < 8; ++k) {
      for (auto [ds, dt] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        const double s = std::clamp(bs + ds, 0.0, 1.0), t = std::clamp(bt + dt, 0.0, 1.0);
        const double v = dist(s, t);
        if (v < best) best = v, bs = s, bt = t;
      }
    }
  }
  return best;
}

}  // namespace oracle
