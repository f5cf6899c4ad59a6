#include "ordelic/normals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ordelic/lipschitz.hpp"

namespace ordelic {

NormalsSurrogate build_normals_surrogate(const OrderableSpec& spec) {
  if (spec.normals.empty()) throw Error(ErrorCode::kInvalidInput, "no boundaries");
  if (spec.reports.size() != spec.normals.size() + 1) {
    throw Error(ErrorCode::kInvalidInput, "need exactly one boundary between consecutive reports");
  }
  require_strongly_orderable(spec);

  NormalsSurrogate s;
  s.spec = spec;
  const std::size_t k = spec.normals.size();
  const std::size_t n = spec.outcomes();
  for (std::size_t i = 0; i < k; ++i) s.thresholds.push_back(static_cast<double>(i));

  for (std::size_t y = 0; y < n; ++y) {
    auto o = [&](std::size_t i) { return spec.normals[i - 1].o[y]; };  // 1-based
    std::vector<Affine> pieces{Affine{1.0, -o(1)}};
    for (std::size_t i = 1; i < k; ++i) {
      const double slope = o(i) - o(i + 1);
      pieces.push_back(Affine{slope, -o(i) - slope * double(i - 1)});
    }
    std::vector<double> bps;
    if (k > 1) {
      bps = s.thresholds;
      pieces.push_back(Affine{1.0, -double(k - 1) - o(k)});
    }
    s.v.emplace_back(std::move(bps), std::move(pieces));
    s.loss.push_back(integrate_from_zero(s.v.back()));
  }

  s.gamma_min = std::numeric_limits<double>::infinity();
  s.gamma_max = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < n; ++y) {
    const double g = normals_gamma_eval(s, SimplexPoint::vertex(n, y));
    s.gamma_min = std::min(s.gamma_min, g);
    s.gamma_max = std::max(s.gamma_max, g);
  }
  s.lipschitz = normals_lipschitz(s, NormKind::kL2);
  return s;
}

double normals_identification_direct(const std::vector<OrientedNormal>& normals, double u,
                                     std::size_t y) {
  const std::size_t k = normals.size();
  const double top = double(k) - 1.0;
  double v = u - std::clamp(u, 0.0, top) - normals[0].o[y];
  for (std::size_t j = 1; j < k; ++j) {
    const double w = std::clamp(u - double(j - 1), 0.0, 1.0);
    v -= w * (normals[j].o[y] - normals[j - 1].o[y]);
  }
  return v;
}

double normals_gamma_eval(const NormalsSurrogate& s, const SimplexPoint& p) {
  if (p.size() != s.outcomes()) {
    throw Error(ErrorCode::kDimensionMismatch, "distribution size mismatch");
  }
  const auto& normals = s.spec.normals;
  const std::size_t k = normals.size();
  const int region = region_of(normals, p);
  if (region == 1) return normals[0].at(p);
  if (region == int(k) + 1) return normals[k - 1].at(p) + double(k - 1);
  const std::size_t i = static_cast<std::size_t>(region - 1);  // 1-based normal index
  const double upper = normals[i - 1].at(p);
  const double lower = normals[i].at(p);
  const double den = upper - lower;
  if (!(den > 1e-12)) {
    throw Error(ErrorCode::kDegenerate, "boundaries meet at p; property is not strongly orderable");
  }
  return upper / den + double(i - 1);
}

int clip_ceiling_link(const NormalsSurrogate& s, double u) {
  const double k = double(s.spec.normals.size());
  return static_cast<int>(std::clamp(std::ceil(u), 0.0, k)) + 1;
}

double normals_lipschitz(const NormalsSurrogate& s, NormKind norm) {
  return piecewise_lipschitz_bound(ratio_pieces(s.v), s.outcomes(), norm);
}

double NormalsPipelineResult::max_normal_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < recovered.size() && i < reference.size(); ++i) {
    std::vector<double> d(recovered[i].o);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= reference[i].o[j];
    worst = std::max(worst, norm(d, NormKind::kL2));
  }
  return worst;
}

NormalsPipelineResult run_normals_pipeline(const PropertyDefinition& def,
                                           const NormalsPipelineOptions& opts) {
  const auto bounds = def.resolved_boundaries();
  if (bounds.size() + 1 != def.reports.size()) {
    throw Error(ErrorCode::kInvalidInput, "need one boundary between consecutive reports");
  }
  const std::size_t n = def.n;

  NormalsPipelineResult res;
  const OrderableSpec reference = def.orderable_spec(derive_seed(opts.seed, "witness"));
  res.reference = reference.normals;

  std::vector<OrientedNormal> raw;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const OrientedNormal truth = homogenize_boundary(bounds[i]);
    std::size_t round = 0;
    for (;;) {
      ++round;
      const auto seed = derive_seed(opts.seed, "boundary-" + std::to_string(i) + "-" +
                                                   std::to_string(round));
      try {
        raw.push_back(normal_from_boundary_samples(sample_boundary(truth, n - 1, seed)));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kRankDeficient || round >= opts.max_rounds) throw;
      }
    }
    res.rounds.push_back(round);
  }

  // orient with the same witnesses the reference spec used
  std::vector<SimplexPoint> witnesses;
  if (def.witnesses) {
    witnesses = *def.witnesses;
  } else if (def.cost) {
    witnesses = witnesses_from_cost(*def.cost, derive_seed(opts.seed, "witness"));
  } else {
    witnesses = witnesses_from_boundaries(bounds, derive_seed(opts.seed, "witness"));
  }
  res.recovered = orient_normals(std::move(raw), witnesses);

  OrderableSpec spec{def.reports, res.recovered, def.cost};
  for (std::size_t i = 0; i + 1 < spec.normals.size(); ++i) res.gaps.push_back(boundary_gap(spec, i));
  res.surrogate = build_normals_surrogate(spec);

  Rng rng(derive_seed(opts.seed, "refine"));
  for (std::size_t t = 0; t < opts.refine_samples; ++t) {
    const SimplexPoint p = sample_simplex_point(n, rng);
    const bool near = std::any_of(reference.normals.begin(), reference.normals.end(),
                                  [&](const OrientedNormal& o) {
                                    return std::abs(o.at(p)) < opts.refine_margin;
                                  });
    if (near) continue;
    ++res.refine_checked;
    const int r = clip_ceiling_link(res.surrogate, normals_gamma_eval(res.surrogate, p));
    const auto allowed = discrete_property(reference, p);
    if (std::find(allowed.begin(), allowed.end(), r) != allowed.end()) ++res.refine_passed;
  }
  return res;
}

}  // namespace ordelic
