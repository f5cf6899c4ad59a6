#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ordelic/simplex.hpp"

namespace ordelic {

/// Discrete loss l(r, y): rows are reports, columns outcomes.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::vector<std::vector<double>> entries);

  std::size_t reports() const { return entries_.size(); }
  std::size_t outcomes() const { return entries_.empty() ? 0 : entries_.front().size(); }
  double operator()(std::size_t r, std::size_t y) const { return entries_[r][y]; }
  const std::vector<double>& row(std::size_t r) const { return entries_[r]; }
  const std::vector<std::vector<double>>& entries() const { return entries_; }

  /// E_{Y~p} l(r, Y) for every report r.
  std::vector<double> expected(const SimplexPoint& p) const;

 private:
  std::vector<std::vector<double>> entries_;
};

inline constexpr double kTieTol = 1e-10;

/// argmin_r E_{Y~p} l(r, Y) as 1-based report indices, ties within kTieTol.
std::vector<int> gamma_from_cost(const CostMatrix& loss, const SimplexPoint& p);

/// Hyperplane {p : <c, p> = b}.
struct AffineBoundary {
  std::vector<double> c;
  double b = 0.0;
};

/// Unit normal o of a homogeneous boundary {p : <o, p> = 0}.
struct OrientedNormal {
  std::vector<double> o;

  double at(const SimplexPoint& p) const { return dot(o, p.probs()); }
  std::size_t size() const { return o.size(); }
};

/// Rewrites <c,p> = b as <c - b*1, p> = 0 using sum(p) = 1 and normalizes.
/// The returned direction keeps the sign of c - b*1.
OrientedNormal homogenize_boundary(const AffineBoundary& bd);

/// Null-space direction of the stacked boundary points (rank n-1 required).
/// Sign is canonical: the largest-magnitude coordinate is positive.
OrientedNormal normal_from_boundary_samples(const std::vector<SimplexPoint>& points);

/// Flips signs so that, for every witness w of region j (1-based, in report
/// order), <o_i, w> <= 0 for i >= j and >= 0 for i < j.
std::vector<OrientedNormal> orient_normals(std::vector<OrientedNormal> normals,
                                           const std::vector<SimplexPoint>& region_witnesses);

/// Vertices of {p in simplex : <o, p> = 0}.
std::vector<SimplexPoint> boundary_vertices(const OrientedNormal& normal);

/// Points on the boundary with strictly positive coordinates. Exact segment
/// sampling for n = 3, hit-and-run (100 burn-in steps) otherwise.
std::vector<SimplexPoint> sample_boundary(const OrientedNormal& normal, std::size_t count,
                                          std::uint64_t seed);

struct OrderableSpec {
  std::vector<std::string> reports;
  std::vector<OrientedNormal> normals;   // size reports - 1, oriented
  std::optional<CostMatrix> cost;

  std::size_t outcomes() const { return normals.empty() ? 0 : normals.front().size(); }
};

/// Minimum Euclidean distance inside the simplex between boundary i and
/// boundary i+1 (0-based). Exact for n = 3; for n > 3 a certified lower bound
/// from a Frank-Wolfe duality gap over the boundary polytopes.
double boundary_gap(const OrderableSpec& spec, std::size_t i);

/// Same quantity for two arbitrary boundaries.
double boundary_distance(const OrientedNormal& a, const OrientedNormal& b);
double boundary_distance_fw(const OrientedNormal& a, const OrientedNormal& b,
                            int iterations = 5000);

/// Throws kOrderability if some consecutive gap is not strictly positive.
void require_strongly_orderable(const OrderableSpec& spec, double min_gap = 1e-9);

/// 1-based region: 1 + #{i : <o_i, p> > 0}. Boundary points go to the lower region.
int region_of(const std::vector<OrientedNormal>& normals, const SimplexPoint& p);

/// Region membership as a set: adds the neighbouring region when p lies
/// within `tol` of a boundary.
std::vector<int> gamma_from_normals(const std::vector<OrientedNormal>& normals,
                                    const SimplexPoint& p, double tol = kTieTol);

/// Interior witness per report: centroid of sampled points where gamma is the
/// single report.
std::vector<SimplexPoint> witnesses_from_cost(const CostMatrix& loss, std::uint64_t seed,
                                              std::size_t samples = 20000);

/// Interior witness per region from unoriented boundaries. Regions are the
/// sign-pattern cells of the sampled simplex, chained so that consecutive
/// cells differ across exactly one boundary in order. With a single boundary
/// the report-1 side is {<c, p> <= b} of the input.
std::vector<SimplexPoint> witnesses_from_boundaries(const std::vector<AffineBoundary>& bounds,
                                                    std::uint64_t seed,
                                                    std::size_t samples = 20000);

/// Tie hyperplanes between consecutive reports: c = l_r - l_{r+1}, b = 0.
std::vector<AffineBoundary> boundaries_from_cost(const CostMatrix& loss);

/// Builds an oriented spec from either source, deriving witnesses when none are given.
OrderableSpec spec_from_boundaries(std::vector<std::string> reports,
                                   const std::vector<AffineBoundary>& bounds,
                                   std::optional<std::vector<SimplexPoint>> witnesses,
                                   std::uint64_t seed);
OrderableSpec spec_from_cost(std::vector<std::string> reports, const CostMatrix& loss,
                             std::optional<std::vector<SimplexPoint>> witnesses,
                             std::uint64_t seed);

/// A discrete property as read from a property-spec file: either a cost
/// matrix or a list of boundaries in report order, optionally with one
/// interior witness per region.
struct PropertyDefinition {
  std::size_t n = 0;
  std::vector<std::string> reports;
  std::optional<CostMatrix> cost;
  std::vector<AffineBoundary> boundaries;
  std::optional<std::vector<SimplexPoint>> witnesses;
  // embedding hints used when no command-line override is given
  std::optional<std::vector<double>> phi;
  std::optional<double> outer_slope;

  /// Boundaries listed in the file, or the cost-matrix tie hyperplanes.
  std::vector<AffineBoundary> resolved_boundaries() const;
  /// Oriented spec built directly from the definition (no sampling of normals).
  OrderableSpec orderable_spec(std::uint64_t seed) const;
};

/// Discrete property as a set of 1-based reports: the cost argmin when a
/// cost matrix is known, region membership under `spec.normals` otherwise.
std::vector<int> discrete_property(const OrderableSpec& spec, const SimplexPoint& p);

}  // namespace ordelic
