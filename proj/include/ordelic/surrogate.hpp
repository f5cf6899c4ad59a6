#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ordelic/embedding.hpp"
#include "ordelic/normals.hpp"

namespace ordelic {

/// Either surrogate construction behind one evaluation interface.
class Surrogate {
 public:
  explicit Surrogate(SmoothedSurrogate s) : impl_(std::move(s)) {}
  explicit Surrogate(NormalsSurrogate s) : impl_(std::move(s)) {}

  std::string_view kind() const;   // "embedding" or "normals"
  std::size_t outcomes() const;
  std::size_t reports() const;

  double gamma(const SimplexPoint& p) const;
  int link(double u) const;
  const std::vector<double>& thresholds() const;
  double gamma_min() const;
  double gamma_max() const;
  /// Lipschitz bound of the property under `norm` (L2 is cached).
  double lipschitz(NormKind norm) const;
  std::span<const PiecewiseAffine> identification() const;

  /// The discrete target: cost argmin or region membership when known,
  /// otherwise the level sets of gamma cut at the link thresholds.
  std::vector<int> discrete(const SimplexPoint& p) const;

  const SmoothedSurrogate* embedding() const { return std::get_if<SmoothedSurrogate>(&impl_); }
  const NormalsSurrogate* normals() const { return std::get_if<NormalsSurrogate>(&impl_); }

 private:
  std::variant<SmoothedSurrogate, NormalsSurrogate> impl_;
};

using PropertyFn = std::function<double(const SimplexPoint&)>;
using LinkFn = std::function<int(double)>;
using DiscreteFn = std::function<std::vector<int>(const SimplexPoint&)>;

inline PropertyFn property_fn(const Surrogate& s) {
  return [&s](const SimplexPoint& p) { return s.gamma(p); };
}
inline LinkFn link_fn(const Surrogate& s) {
  return [&s](double u) { return s.link(u); };
}
inline DiscreteFn discrete_fn(const Surrogate& s) {
  return [&s](const SimplexPoint& p) { return s.discrete(p); };
}

struct RefinementCheck {
  std::size_t checked = 0;
  std::size_t passed = 0;
  double pass_rate() const { return checked == 0 ? 1.0 : double(passed) / double(checked); }
};

/// Fraction of uniform simplex samples with link(gamma(p)) in the discrete
/// property, skipping points within `margin` of a discrete boundary.
RefinementCheck refinement_check(const Surrogate& s, std::size_t samples, std::uint64_t seed,
                                 double margin = 1e-8);

/// Distance-like margin of p from the nearest discrete boundary: the
/// expected-cost gap between the best and runner-up reports, or the smallest
/// |<o_i, p>| over the oriented normals.
double boundary_margin(const Surrogate& s, const SimplexPoint& p);

}  // namespace ordelic
