#include "ordelic/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ordelic {

bool in_simplex(std::span<const double> v, double tol) {
  if (v.empty()) return false;
  double sum = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < -tol || x > 1.0 + tol) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

SimplexPoint::SimplexPoint(std::vector<double> probs) : probs_(std::move(probs)) {
  if (!in_simplex(probs_)) {
    throw Error(ErrorCode::kInvalidInput,
                "probability vector is not on the simplex");
  }
  double sum = 0.0;
  for (double& x : probs_) {
    x = std::max(x, 0.0);
    sum += x;
  }
  for (double& x : probs_) x /= sum;
}

SimplexPoint SimplexPoint::vertex(std::size_t n, std::size_t index) {
  std::vector<double> v(n, 0.0);
  v.at(index) = 1.0;
  return SimplexPoint(std::move(v));
}

SimplexPoint SimplexPoint::centroid(std::size_t n) {
  return SimplexPoint(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::string_view norm_name(NormKind k) {
  switch (k) {
    case NormKind::kL1: return "l1";
    case NormKind::kL2: return "l2";
    case NormKind::kLinf: return "linf";
  }
  return "l2";
}

NormKind parse_norm(std::string_view s) {
  if (s == "l1" || s == "1") return NormKind::kL1;
  if (s == "l2" || s == "2") return NormKind::kL2;
  if (s == "linf" || s == "inf") return NormKind::kLinf;
  throw Error(ErrorCode::kInvalidInput, "unknown norm: " + std::string(s));
}

double simplex_diameter(NormKind k) {
  switch (k) {
    case NormKind::kL1: return 2.0;
    case NormKind::kL2: return std::sqrt(2.0);
    case NormKind::kLinf: return 1.0;
  }
  return 0.0;
}

double norm(std::span<const double> v, NormKind k) {
  double acc = 0.0;
  switch (k) {
    case NormKind::kL1:
      for (double x : v) acc += std::abs(x);
      return acc;
    case NormKind::kL2:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
    case NormKind::kLinf:
      for (double x : v) acc = std::max(acc, std::abs(x));
      return acc;
  }
  return acc;
}

double norm_distance(const SimplexPoint& a, const SimplexPoint& b, NormKind k) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "norm_distance: dimension mismatch");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return norm(d, k);
}

double tangent_dual_norm(std::span<const double> g, NormKind k) {
  const std::size_t n = g.size();
  if (n == 0) return 0.0;
  switch (k) {
    case NormKind::kL2: {
      const double mean = std::accumulate(g.begin(), g.end(), 0.0) / double(n);
      double acc = 0.0;
      for (double x : g) acc += (x - mean) * (x - mean);
      return std::sqrt(acc);
    }
    case NormKind::kL1: {
      auto [lo, hi] = std::minmax_element(g.begin(), g.end());
      return (*hi - *lo) / 2.0;
    }
    case NormKind::kLinf: {
      // maximize <g, v> over sum v = 0, |v_i| <= 1: +1 on the top half,
      // -1 on the bottom half.
      std::vector<double> s(g.begin(), g.end());
      std::sort(s.begin(), s.end());
      double acc = 0.0;
      for (std::size_t i = 0; i < n / 2; ++i) acc += s[n - 1 - i] - s[i];
      return acc;
    }
  }
  return 0.0;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "dot: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::exponential() { return -std::log(uniform_open()); }

double Rng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t Rng::index(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double gamma_variate(double alpha, Rng& rng) {
  if (alpha < 1.0) {
    return gamma_variate(alpha + 1.0, rng) * std::pow(rng.uniform_open(), 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = 0.0, v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(root ^ splitmix64(h));
}

SimplexPoint sample_simplex_point(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = rng.exponential();
    sum += x;
  }
  for (double& x : v) x /= sum;
  return SimplexPoint(std::move(v));
}

std::vector<SimplexPoint> sample_simplex(std::size_t n, std::size_t count,
                                         std::uint64_t seed) {
  if (n < 2 || count < 1) {
    throw Error(ErrorCode::kInvalidInput, "sample_simplex requires n >= 2, count >= 1");
  }
  Rng rng(seed);
  std::vector<SimplexPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_simplex_point(n, rng));
  return out;
}

SimplexPoint sample_dirichlet(std::size_t n, double alpha, Rng& rng) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = gamma_variate(alpha, rng);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return SimplexPoint(std::move(v));
}

LabeledDataset::LabeledDataset(std::size_t n, std::vector<LabeledRow> rows)
    : n_(n), rows_(std::move(rows)) {
  if (rows_.empty()) throw Error(ErrorCode::kInvalidInput, "dataset is empty");
  for (const auto& r : rows_) {
    if (r.y < 1 || static_cast<std::size_t>(r.y) > n_) {
      throw Error(ErrorCode::kInvalidInput,
                  "label out of range for row " + r.x_id);
    }
  }
}

std::pair<double, double> ternary_plot_coords(const SimplexPoint& p) {
  if (p.size() != 3) {
    throw Error(ErrorCode::kDimensionMismatch, "ternary plot needs n = 3");
  }
  return {p[2] + p[1] / 2.0, p[1] * std::sqrt(3.0) / 2.0};
}

SimplexPoint from_ternary_plot_coords(double x, double y) {
  const double p2 = 2.0 * y / std::sqrt(3.0);
  const double p3 = x - p2 / 2.0;
  return SimplexPoint({1.0 - p2 - p3, p2, p3});
}

}  // namespace ordelic
