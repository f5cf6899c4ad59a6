#include "ordelic/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ordelic {

namespace {
template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
}  // namespace

std::string_view Surrogate::kind() const {
  return embedding() ? "embedding" : "normals";
}

std::size_t Surrogate::outcomes() const {
  return std::visit([](const auto& s) { return s.outcomes(); }, impl_);
}

std::size_t Surrogate::reports() const {
  return std::visit([](const auto& s) { return s.reports(); }, impl_);
}

double Surrogate::gamma(const SimplexPoint& p) const {
  return std::visit(overloaded{
                        [&](const SmoothedSurrogate& s) { return gamma_surrogate_eval(s, p); },
                        [&](const NormalsSurrogate& s) { return normals_gamma_eval(s, p); },
                    },
                    impl_);
}

int Surrogate::link(double u) const {
  return std::visit(overloaded{
                        [&](const SmoothedSurrogate& s) { return link_eval(s, u); },
                        [&](const NormalsSurrogate& s) { return clip_ceiling_link(s, u); },
                    },
                    impl_);
}

const std::vector<double>& Surrogate::thresholds() const {
  return std::visit([](const auto& s) -> const std::vector<double>& { return s.thresholds; },
                    impl_);
}

double Surrogate::gamma_min() const {
  return std::visit([](const auto& s) { return s.gamma_min; }, impl_);
}

double Surrogate::gamma_max() const {
  return std::visit([](const auto& s) { return s.gamma_max; }, impl_);
}

double Surrogate::lipschitz(NormKind norm) const {
  if (norm == NormKind::kL2) return std::visit([](const auto& s) { return s.lipschitz; }, impl_);
  return std::visit(overloaded{
                        [&](const SmoothedSurrogate& s) { return surrogate_lipschitz(s, norm); },
                        [&](const NormalsSurrogate& s) { return normals_lipschitz(s, norm); },
                    },
                    impl_);
}

std::span<const PiecewiseAffine> Surrogate::identification() const {
  return std::visit(overloaded{
                        [](const SmoothedSurrogate& s) { return std::span<const PiecewiseAffine>(s.v_bar); },
                        [](const NormalsSurrogate& s) { return std::span<const PiecewiseAffine>(s.v); },
                    },
                    impl_);
}

std::vector<int> Surrogate::discrete(const SimplexPoint& p) const {
  if (const auto* s = normals()) return discrete_property(s->spec, p);
  const auto& s = *embedding();
  if (s.cost) return gamma_from_cost(*s.cost, p);
  const double u = gamma(p);
  std::vector<int> out{link(u)};
  for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
    if (std::abs(u - s.thresholds[i]) <= kTieTol) {
      out = {int(i) + 1, int(i) + 2};
      break;
    }
  }
  return out;
}

double boundary_margin(const Surrogate& s, const SimplexPoint& p) {
  double best = std::numeric_limits<double>::infinity();
  if (const auto* n = s.normals()) {
    for (const auto& o : n->spec.normals) best = std::min(best, std::abs(o.at(p)));
    return best;
  }
  const auto& e = *s.embedding();
  if (e.cost) {
    auto costs = e.cost->expected(p);
    std::sort(costs.begin(), costs.end());
    return costs[1] - costs[0];
  }
  const double u = s.gamma(p);
  for (double t : e.thresholds) best = std::min(best, std::abs(u - t));
  return best;
}

RefinementCheck refinement_check(const Surrogate& s, std::size_t samples, std::uint64_t seed,
                                 double margin) {
  RefinementCheck out;
  Rng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    const SimplexPoint p = sample_simplex_point(s.outcomes(), rng);
    if (boundary_margin(s, p) < margin) continue;
    ++out.checked;
    const auto allowed = s.discrete(p);
    if (std::find(allowed.begin(), allowed.end(), s.link(s.gamma(p))) != allowed.end()) ++out.passed;
  }
  return out;
}

}  // namespace ordelic
