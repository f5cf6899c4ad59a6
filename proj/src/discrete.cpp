#include "ordelic/discrete.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ordelic {

CostMatrix::CostMatrix(std::vector<std::vector<double>> entries)
    : entries_(std::move(entries)) {
  if (entries_.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "cost matrix needs at least two reports");
  }
  const std::size_t n = entries_.front().size();
  if (n < 3) throw Error(ErrorCode::kInvalidInput, "cost matrix needs at least three outcomes");
  for (const auto& row : entries_) {
    if (row.size() != n) throw Error(ErrorCode::kInvalidInput, "ragged cost matrix");
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::kInvalidInput, "cost entries must be finite and nonnegative");
      }
    }
  }
}

std::vector<double> CostMatrix::expected(const SimplexPoint& p) const {
  if (p.size() != outcomes()) {
    throw Error(ErrorCode::kDimensionMismatch, "cost matrix / distribution size mismatch");
  }
  std::vector<double> out(reports());
  for (std::size_t r = 0; r < reports(); ++r) out[r] = dot(entries_[r], p.probs());
  return out;
}

std::vector<int> gamma_from_cost(const CostMatrix& loss, const SimplexPoint& p) {
  const auto e = loss.expected(p);
  const double best = *std::min_element(e.begin(), e.end());
  std::vector<int> out;
  for (std::size_t r = 0; r < e.size(); ++r)
    if (e[r] - best <= kTieTol) out.push_back(static_cast<int>(r) + 1);
  return out;
}

namespace {

std::vector<double> unit(std::vector<double> v) {
  const double len = norm(v, NormKind::kL2);
  for (double& x : v) x /= len;
  return v;
}

bool proportional_to_ones(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= 1e-14 * std::max(1.0, norm(v, NormKind::kLinf));
}

}  // namespace

OrientedNormal homogenize_boundary(const AffineBoundary& bd) {
  if (bd.c.empty()) throw Error(ErrorCode::kInvalidInput, "empty boundary coefficients");
  std::vector<double> o(bd.c.size());
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = bd.c[i] - bd.b;
  if (norm(o, NormKind::kLinf) == 0.0 || proportional_to_ones(o)) {
    throw Error(ErrorCode::kDegenerate, "boundary does not cut the simplex");
  }
  return {unit(std::move(o))};
}

OrientedNormal normal_from_boundary_samples(const std::vector<SimplexPoint>& points) {
  if (points.empty()) throw Error(ErrorCode::kInvalidInput, "no boundary points");
  const std::size_t n = points.front().size();
  const std::size_t m = points.size();
  if (m + 1 < n) {
    throw Error(ErrorCode::kRankDeficient, "need at least n-1 boundary points");
  }
  Eigen::MatrixXd P(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    if (points[i].size() != n) throw Error(ErrorCode::kDimensionMismatch, "point size mismatch");
    for (std::size_t j = 0; j < n; ++j) P(i, j) = points[i][j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  // rank n-1 means the (n-1)-th singular value is above threshold and, when
  // more rows are supplied, the n-th one is below it.
  const double threshold = 1e-9 * s(0);
  if (s(n - 2) <= threshold) {
    throw Error(ErrorCode::kRankDeficient, "boundary points are rank deficient; resample");
  }
  if (static_cast<std::size_t>(s.size()) >= n && s(n - 1) > threshold) {
    throw Error(ErrorCode::kRankDeficient, "boundary points are not coplanar with the origin");
  }
  std::vector<double> o(n);
  for (std::size_t j = 0; j < n; ++j) o[j] = svd.matrixV()(j, n - 1);
  std::size_t big = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs(o[j]) > std::abs(o[big])) big = j;
  if (o[big] < 0) for (double& x : o) x = -x;
  return {unit(std::move(o))};
}

std::vector<OrientedNormal> orient_normals(std::vector<OrientedNormal> normals,
                                           const std::vector<SimplexPoint>& witnesses) {
  if (witnesses.size() != normals.size() + 1) {
    throw Error(ErrorCode::kInvalidInput, "need one witness per region");
  }
  constexpr double tol = 1e-9;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    bool plus_ok = true, minus_ok = true, decisive = false;
    for (std::size_t j = 0; j < witnesses.size(); ++j) {
      const double v = normals[i].at(witnesses[j]);
      if (std::abs(v) > tol) decisive = true;
      // witness j (0-based) lies in region j+1; normal i separates regions
      // i+1 and i+2, so regions j <= i must be on the nonpositive side.
      const bool want_nonpos = j <= i;
      if (want_nonpos) {
        if (v > tol) plus_ok = false;
        if (-v > tol) minus_ok = false;
      } else {
        if (v < -tol) plus_ok = false;
        if (-v < -tol) minus_ok = false;
      }
    }
    if (!decisive) {
      throw Error(ErrorCode::kOrientation,
                  "all witnesses lie on boundary " + std::to_string(i + 1));
    }
    if (plus_ok) continue;
    if (minus_ok) {
      for (double& x : normals[i].o) x = -x;
      continue;
    }
    throw Error(ErrorCode::kOrientation,
                "no orientation of boundary " + std::to_string(i + 1) +
                    " is consistent with the region witnesses");
  }
  return normals;
}

std::vector<SimplexPoint> boundary_vertices(const OrientedNormal& normal) {
  const auto& o = normal.o;
  const std::size_t n = o.size();
  constexpr double zero = 1e-14;
  std::vector<std::vector<double>> pts;
  for (std::size_t a = 0; a < n; ++a) {
    if (std::abs(o[a]) <= zero) {
      std::vector<double> v(n, 0.0);
      v[a] = 1.0;
      pts.push_back(std::move(v));
    }
    for (std::size_t b = a + 1; b < n; ++b) {
      if ((o[a] > zero && o[b] < -zero) || (o[a] < -zero && o[b] > zero)) {
        const double t = o[b] / (o[b] - o[a]);  // weight on vertex a
        std::vector<double> v(n, 0.0);
        v[a] = t;
        v[b] = 1.0 - t;
        pts.push_back(std::move(v));
      }
    }
  }
  std::vector<SimplexPoint> out;
  for (auto& v : pts) out.emplace_back(std::move(v));
  return out;
}

namespace {

SimplexPoint clean_point(std::vector<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return SimplexPoint(std::move(v));
}

bool strictly_positive(const std::vector<double>& v, double tol = 1e-12) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x > tol; });
}

}  // namespace

std::vector<SimplexPoint> sample_boundary(const OrientedNormal& normal, std::size_t count,
                                          std::uint64_t seed) {
  const OrientedNormal o{unit(normal.o)};
  const std::size_t n = o.size();
  const auto verts = boundary_vertices(o);
  if (verts.size() < 2) {
    throw Error(ErrorCode::kEmptyIntersection,
                "boundary does not meet the relative interior of the simplex");
  }
  std::vector<double> center(n, 0.0);
  for (const auto& v : verts)
    for (std::size_t i = 0; i < n; ++i) center[i] += v[i] / double(verts.size());
  if (!strictly_positive(center)) {
    throw Error(ErrorCode::kEmptyIntersection,
                "boundary does not meet the relative interior of the simplex");
  }

  Rng rng(seed);
  std::vector<SimplexPoint> out;
  out.reserve(count);

  if (n == 3) {
    // two endpoints on the simplex edges
    const auto& a = verts.front();
    const auto& b = verts.back();
    while (out.size() < count) {
      const double t = rng.uniform_open();
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = t * a[i] + (1.0 - t) * b[i];
      if (strictly_positive(v, 0.0)) out.push_back(clean_point(std::move(v)));
    }
    return out;
  }

  // Hit-and-run on {p >= 0, sum p = 1, <o,p> = 0}. Directions live in the
  // orthogonal complement of span{1, o}.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  Eigen::VectorXd q2 = Eigen::Map<const Eigen::VectorXd>(o.o.data(), n);
  q2 -= q2.dot(ones) * ones;
  q2.normalize();
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(center.data(), n);
  const double t1 = ones.dot(p), t2 = q2.dot(p);

  auto step = [&]() {
    Eigen::VectorXd d(n);
    for (std::size_t i = 0; i < n; ++i) d(i) = rng.normal();
    d -= d.dot(ones) * ones;
    d -= d.dot(q2) * q2;
    d.normalize();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (d(i) > 1e-15) lo = std::max(lo, -p(i) / d(i));
      else if (d(i) < -1e-15) hi = std::min(hi, -p(i) / d(i));
    }
    const double t = lo + (hi - lo) * rng.uniform_open();
    Eigen::VectorXd next = p + t * d;
    next -= (ones.dot(next) - t1) * ones;
    next -= (q2.dot(next) - t2) * q2;
    if ((next.array() > 0.0).all()) p = next;
  };
  for (int i = 0; i < 100; ++i) step();
  while (out.size() < count) {
    for (int i = 0; i < 5; ++i) step();
    std::vector<double> v(p.data(), p.data() + n);
    out.push_back(clean_point(std::move(v)));
  }
  return out;
}

namespace {

double point_segment_distance(const std::vector<double>& p, const std::vector<double>& a,
                              const std::vector<double>& b) {
  const std::size_t n = p.size();
  double ab2 = 0.0, t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ab2 += (b[i] - a[i]) * (b[i] - a[i]);
    t += (p[i] - a[i]) * (b[i] - a[i]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a[i] + t * (b[i] - a[i]) - p[i];
    d2 += x * x;
  }
  return std::sqrt(d2);
}

// Do the segments [a,b] and [c,d] cross? Both lie in the n = 3 simplex plane.
bool segments_cross(const SimplexPoint& a, const SimplexPoint& b, const SimplexPoint& c,
                    const SimplexPoint& d) {
  auto pa = ternary_plot_coords(a), pb = ternary_plot_coords(b);
  auto pc = ternary_plot_coords(c), pd = ternary_plot_coords(d);
  auto orient = [](std::pair<double, double> p, std::pair<double, double> q,
                   std::pair<double, double> r) {
    return (q.first - p.first) * (r.second - p.second) -
           (q.second - p.second) * (r.first - p.first);
  };
  const double o1 = orient(pa, pb, pc), o2 = orient(pa, pb, pd);
  const double o3 = orient(pc, pd, pa), o4 = orient(pc, pd, pb);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
         o3 != 0 && o4 != 0;
}

}  // namespace

double boundary_distance(const OrientedNormal& a, const OrientedNormal& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "normal size mismatch");
  if (a.size() != 3) return boundary_distance_fw(a, b);
  const auto va = boundary_vertices(a);
  const auto vb = boundary_vertices(b);
  if (va.empty() || vb.empty()) {
    throw Error(ErrorCode::kEmptyIntersection, "boundary misses the simplex");
  }
  const auto& a0 = va.front(); const auto& a1 = va.back();
  const auto& b0 = vb.front(); const auto& b1 = vb.back();
  if (va.size() >= 2 && vb.size() >= 2 && segments_cross(a0, a1, b0, b1)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : va) best = std::min(best, point_segment_distance(p.vec(), b0.vec(), b1.vec()));
  for (const auto& p : vb) best = std::min(best, point_segment_distance(p.vec(), a0.vec(), a1.vec()));
  return best;
}

double boundary_distance_fw(const OrientedNormal& a, const OrientedNormal& b, int iterations) {
  const auto va = boundary_vertices(a);
  const auto vb = boundary_vertices(b);
  if (va.empty() || vb.empty()) {
    throw Error(ErrorCode::kEmptyIntersection, "boundary misses the simplex");
  }
  const std::size_t n = a.size();
  auto avg = [n](const std::vector<SimplexPoint>& vs) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (const auto& v : vs)
      for (std::size_t i = 0; i < n; ++i) c(i) += v[i] / double(vs.size());
    return c;
  };
  auto vec = [n](const SimplexPoint& v) {
    Eigen::VectorXd c(n);
    for (std::size_t i = 0; i < n; ++i) c(i) = v[i];
    return c;
  };
  Eigen::VectorXd p = avg(va), q = avg(vb);
  double lower = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd g = p - q;  // half the gradient w.r.t. p
    std::size_t ia = 0, ib = 0;
    double best_a = std::numeric_limits<double>::infinity();
    double best_b = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < va.size(); ++i) {
      const double v = g.dot(vec(va[i]));
      if (v < best_a) { best_a = v; ia = i; }
    }
    for (std::size_t i = 0; i < vb.size(); ++i) {
      const double v = g.dot(vec(vb[i]));
      if (v > best_b) { best_b = v; ib = i; }
    }
    const Eigen::VectorXd dp = vec(va[ia]) - p;
    const Eigen::VectorXd dq = vec(vb[ib]) - q;
    const Eigen::VectorXd dir = dp - dq;
    const double f = g.squaredNorm();
    const double gap = -2.0 * g.dot(dir);  // <grad f, x - s>
    lower = std::max(lower, f - gap);
    if (gap <= 1e-15) break;
    const double denom = dir.squaredNorm();
    const double t = denom > 0.0 ? std::clamp(-g.dot(dir) / denom, 0.0, 1.0) : 0.0;
    p += t * dp;
    q += t * dq;
  }
  return std::sqrt(std::max(lower, 0.0));
}

double boundary_gap(const OrderableSpec& spec, std::size_t i) {
  if (i + 1 >= spec.normals.size()) {
    throw Error(ErrorCode::kInvalidInput, "no consecutive boundary pair at this index");
  }
  return boundary_distance(spec.normals[i], spec.normals[i + 1]);
}

void require_strongly_orderable(const OrderableSpec& spec, double min_gap) {
  for (std::size_t i = 0; i + 1 < spec.normals.size(); ++i) {
    const double gap = boundary_gap(spec, i);
    if (!(gap > min_gap)) {
      throw Error(ErrorCode::kOrderability,
                  "boundaries " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                      " are not separated (gap " + std::to_string(gap) + ")");
    }
  }
}

int region_of(const std::vector<OrientedNormal>& normals, const SimplexPoint& p) {
  int region = 1;
  for (const auto& o : normals)
    if (o.at(p) > 0.0) ++region;
  return region;
}

std::vector<int> gamma_from_normals(const std::vector<OrientedNormal>& normals,
                                    const SimplexPoint& p, double tol) {
  const int r = region_of(normals, p);
  std::vector<int> out;
  // boundary r-1 (1-based) separates r-1 and r; boundary r separates r and r+1
  if (r >= 2 && std::abs(normals[r - 2].at(p)) <= tol) out.push_back(r - 1);
  out.push_back(r);
  if (static_cast<std::size_t>(r) <= normals.size() && std::abs(normals[r - 1].at(p)) <= tol)
    out.push_back(r + 1);
  return out;
}

namespace {

std::vector<SimplexPoint> centroids(const std::vector<std::vector<double>>& sums,
                                    const std::vector<std::size_t>& counts) {
  std::vector<SimplexPoint> out;
  for (std::size_t r = 0; r < sums.size(); ++r) {
    if (counts[r] == 0) {
      throw Error(ErrorCode::kOrientation,
                  "no interior sample found for region " + std::to_string(r + 1) +
                      "; supply witnesses explicitly");
    }
    std::vector<double> v = sums[r];
    for (double& x : v) x /= double(counts[r]);
    out.push_back(clean_point(std::move(v)));
  }
  return out;
}

}  // namespace

std::vector<SimplexPoint> witnesses_from_cost(const CostMatrix& loss, std::uint64_t seed,
                                              std::size_t samples) {
  const std::size_t n = loss.outcomes(), k = loss.reports();
  std::vector<std::vector<double>> sums(k, std::vector<double>(n, 0.0));
  std::vector<std::size_t> counts(k, 0);
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto p = sample_simplex_point(n, rng);
    const auto g = gamma_from_cost(loss, p);
    if (g.size() != 1) continue;
    const std::size_t r = static_cast<std::size_t>(g.front() - 1);
    for (std::size_t i = 0; i < n; ++i) sums[r][i] += p[i];
    ++counts[r];
  }
  return centroids(sums, counts);
}

std::vector<SimplexPoint> witnesses_from_boundaries(const std::vector<AffineBoundary>& bounds,
                                                    std::uint64_t seed, std::size_t samples) {
  if (bounds.empty()) throw Error(ErrorCode::kInvalidInput, "no boundaries");
  std::vector<OrientedNormal> h;
  for (const auto& b : bounds) h.push_back(homogenize_boundary(b));
  const std::size_t n = h.front().size(), k = h.size();

  std::map<std::vector<int>, std::pair<std::vector<double>, std::size_t>> cells;
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto p = sample_simplex_point(n, rng);
    std::vector<int> pattern(k);
    bool near = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double v = h[i].at(p);
      if (std::abs(v) < 1e-9) near = true;
      pattern[i] = v > 0 ? 1 : 0;
    }
    if (near) continue;
    auto& cell = cells[pattern];
    if (cell.first.empty()) cell.first.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) cell.first[i] += p[i];
    ++cell.second;
  }
  if (cells.size() != k + 1) {
    throw Error(ErrorCode::kOrientation,
                "boundaries split the simplex into " + std::to_string(cells.size()) +
                    " cells, expected " + std::to_string(k + 1) + " for an orderable property");
  }
  auto flip = [](std::vector<int> p, std::size_t i) {
    p[i] = 1 - p[i];
    return p;
  };
  // First region: the cell across boundary 1 from a cell that also borders boundary 2.
  std::vector<int> first;
  for (const auto& [pattern, cell] : cells) {
    const auto across = flip(pattern, 0);
    if (!cells.contains(across)) continue;
    if (k == 1) {
      // report-1 side is <c,p> <= b, i.e. pattern 0
      if (pattern[0] == 0) first = pattern;
    } else if (!cells.contains(flip(pattern, 1)) && cells.contains(flip(across, 1))) {
      first = pattern;
    }
  }
  if (first.empty()) {
    throw Error(ErrorCode::kOrientation, "could not chain the boundary cells in report order");
  }
  std::vector<std::vector<double>> sums;
  std::vector<std::size_t> counts;
  auto current = first;
  for (std::size_t r = 0; r <= k; ++r) {
    auto it = cells.find(current);
    if (it == cells.end()) {
      throw Error(ErrorCode::kOrientation, "boundaries are not listed in report order");
    }
    sums.push_back(it->second.first);
    counts.push_back(it->second.second);
    if (r < k) current = flip(current, r);
  }
  return centroids(sums, counts);
}

std::vector<AffineBoundary> boundaries_from_cost(const CostMatrix& loss) {
  std::vector<AffineBoundary> out;
  for (std::size_t r = 0; r + 1 < loss.reports(); ++r) {
    AffineBoundary b;
    b.c.resize(loss.outcomes());
    for (std::size_t y = 0; y < loss.outcomes(); ++y) b.c[y] = loss(r, y) - loss(r + 1, y);
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

OrderableSpec finish_spec(std::vector<std::string> reports, std::vector<OrientedNormal> normals,
                          const std::vector<SimplexPoint>& witnesses,
                          std::optional<CostMatrix> cost) {
  if (reports.size() != normals.size() + 1) {
    throw Error(ErrorCode::kInvalidInput, "need exactly one boundary between consecutive reports");
  }
  OrderableSpec spec;
  spec.reports = std::move(reports);
  spec.normals = orient_normals(std::move(normals), witnesses);
  spec.cost = std::move(cost);
  return spec;
}

}  // namespace

OrderableSpec spec_from_boundaries(std::vector<std::string> reports,
                                   const std::vector<AffineBoundary>& bounds,
                                   std::optional<std::vector<SimplexPoint>> witnesses,
                                   std::uint64_t seed) {
  std::vector<OrientedNormal> normals;
  for (const auto& b : bounds) normals.push_back(homogenize_boundary(b));
  const auto w = witnesses ? *witnesses : witnesses_from_boundaries(bounds, seed);
  return finish_spec(std::move(reports), std::move(normals), w, std::nullopt);
}

OrderableSpec spec_from_cost(std::vector<std::string> reports, const CostMatrix& loss,
                             std::optional<std::vector<SimplexPoint>> witnesses,
                             std::uint64_t seed) {
  std::vector<OrientedNormal> normals;
  for (const auto& b : boundaries_from_cost(loss)) normals.push_back(homogenize_boundary(b));
  const auto w = witnesses ? *witnesses : witnesses_from_cost(loss, seed);
  return finish_spec(std::move(reports), std::move(normals), w, loss);
}

std::vector<AffineBoundary> PropertyDefinition::resolved_boundaries() const {
  if (cost) return boundaries_from_cost(*cost);
  return boundaries;
}

OrderableSpec PropertyDefinition::orderable_spec(std::uint64_t seed) const {
  if (cost) return spec_from_cost(reports, *cost, witnesses, seed);
  return spec_from_boundaries(reports, boundaries, witnesses, seed);
}

std::vector<int> discrete_property(const OrderableSpec& spec, const SimplexPoint& p) {
  if (spec.cost) return gamma_from_cost(*spec.cost, p);
  return gamma_from_normals(spec.normals, p);
}

}  // namespace ordelic
