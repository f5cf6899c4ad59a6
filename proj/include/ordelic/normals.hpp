#pragma once

#include <cstdint>
#include <vector>

#include "ordelic/discrete.hpp"
#include "ordelic/piecewise.hpp"

namespace ordelic {

/// Surrogate built directly from the oriented boundary normals of a strongly
/// orderable property. Reports are linked through u -> clip(ceil(u), 0, k) + 1
/// where k is the number of boundaries.
struct NormalsSurrogate {
  OrderableSpec spec;
  std::vector<PiecewiseAffine> v;          // per outcome, breakpoints 0..k-1
  std::vector<PiecewiseQuadratic> loss;    // per outcome
  std::vector<double> thresholds;          // 0, 1, ..., k-1
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double lipschitz = 0.0;                  // L2

  std::size_t outcomes() const { return spec.outcomes(); }
  std::size_t reports() const { return spec.normals.size() + 1; }
};

/// Requires strong orderability (positive gaps between consecutive boundaries).
NormalsSurrogate build_normals_surrogate(const OrderableSpec& spec);

/// Identification value V(u, y) written as in the algorithm listing:
///   u - clip(u, 0, k-1) - o_1 - sum_{j=1}^{k-1} clip(u-(j-1), 0, 1) (o_{j+1} - o_j)
double normals_identification_direct(const std::vector<OrientedNormal>& normals, double u,
                                     std::size_t y);

/// Closed form of the elicited property, by region.
double normals_gamma_eval(const NormalsSurrogate& s, const SimplexPoint& p);

/// clip(ceil(u), 0, k) + 1.
int clip_ceiling_link(const NormalsSurrogate& s, double u);

double normals_lipschitz(const NormalsSurrogate& s, NormKind norm);

struct NormalsPipelineOptions {
  std::uint64_t seed = 0;
  std::size_t max_rounds = 20;       // resampling attempts per boundary
  std::size_t refine_samples = 2000; // link checks against the discrete property
  double refine_margin = 1e-8;       // skip points this close to a boundary
};

struct NormalsPipelineResult {
  NormalsSurrogate surrogate;
  std::vector<OrientedNormal> recovered;   // oriented, from sampled boundary points
  std::vector<OrientedNormal> reference;   // oriented, from the definition itself
  std::vector<double> gaps;                // consecutive boundary distances
  std::vector<std::size_t> rounds;         // sampling rounds used per boundary
  std::size_t refine_checked = 0;
  std::size_t refine_passed = 0;

  double refine_pass_rate() const {
    return refine_checked == 0 ? 1.0 : double(refine_passed) / double(refine_checked);
  }
  /// Largest angle-free discrepancy max_i ||recovered_i - reference_i||_2.
  double max_normal_error() const;
};

/// Samples n-1 points per boundary, recovers normals by SVD, orients them
/// with region witnesses, builds the surrogate and checks the link against
/// the discrete property on fresh samples.
NormalsPipelineResult run_normals_pipeline(const PropertyDefinition& def,
                                           const NormalsPipelineOptions& opts = {});

}  // namespace ordelic
