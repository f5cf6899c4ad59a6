#pragma once

#include <optional>
#include <vector>

#include "ordelic/discrete.hpp"
#include "ordelic/piecewise.hpp"

namespace ordelic {

/// Convex max-affine embedded loss with its embedding points phi(r_1) < ... < phi(r_k).
struct EmbeddingInput {
  MaxAffineLoss loss;            // one MaxAffine per outcome
  std::vector<double> phi;       // one per report
  std::optional<CostMatrix> cost;

  std::size_t outcomes() const { return loss.size(); }
};

/// Envelope chords through {(phi_r, l(r, y))} plus outer extensions with
/// slopes -outer_slope / +outer_slope. When `outer_slope` is absent it
/// defaults to 1 + the largest chord slope magnitude.
EmbeddingInput build_envelope_loss(const CostMatrix& loss, std::vector<double> phi,
                                   std::optional<double> outer_slope = std::nullopt);

/// Evenly spaced default embedding points 0, 1, ..., k-1.
std::vector<double> default_embedding_points(std::size_t reports);

/// Three-case pseudo-identification value for each outcome at u: derivative
/// where differentiable, 0 where the one-sided derivatives change sign, and
/// their average otherwise.
std::vector<double> pseudo_identification(const EmbeddingInput& input, double u);

/// phi(R) together with consecutive midpoints, sorted.
std::vector<double> interpolation_set(const std::vector<double>& phi);

/// Linear interpolation of the pseudo-identification on conv(U), continued
/// with unit slope outside. Throws if some outcome is not nondecreasing.
std::vector<PiecewiseAffine> interpolate_identification(const EmbeddingInput& input);

struct SmoothedSurrogate {
  std::vector<PiecewiseAffine> v_bar;      // per outcome
  std::vector<PiecewiseQuadratic> l_bar;   // per outcome
  std::vector<double> interpolation;       // U
  std::vector<double> thresholds;          // link thresholds (midpoints)
  std::vector<double> phi;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double lipschitz = 0.0;   // sup of the property's gradient norm (L2)
  double vbar_sup = 0.0;    // max |V-bar| over [gamma_min, gamma_max]
  std::optional<CostMatrix> cost;

  std::size_t outcomes() const { return v_bar.size(); }
  std::size_t reports() const { return thresholds.size() + 1; }
};

SmoothedSurrogate build_surrogate(const EmbeddingInput& input);

/// Assembles a surrogate from an identification function and link thresholds,
/// computing range, Lipschitz bound and loss.
SmoothedSurrogate surrogate_from_identification(std::vector<PiecewiseAffine> v_bar,
                                                std::vector<double> thresholds,
                                                std::optional<CostMatrix> cost = std::nullopt);

/// Closed-form root of E V-bar(., Y) by piece index
/// j(p) = min{l : E V-bar(U_l, Y) > 0}.
double gamma_surrogate_eval(const SmoothedSurrogate& s, const SimplexPoint& p);

/// 1 + #{thresholds strictly below u}.
int link_eval(const SmoothedSurrogate& s, double u);
int threshold_link(const std::vector<double>& thresholds, double u);

/// Reparameterizes the report space so the property spans [0, 1].
SmoothedSurrogate normalize_surrogate(const SmoothedSurrogate& s);

/// Lipschitz bound of the elicited property under any norm.
double surrogate_lipschitz(const SmoothedSurrogate& s, NormKind norm);

}  // namespace ordelic
