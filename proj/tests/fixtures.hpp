#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ordelic/discrete.hpp"
#include "ordelic/embedding.hpp"
#include "ordelic/normals.hpp"
#include "ordelic/surrogate.hpp"

namespace fixture {

inline ordelic::CostMatrix three_outcome_cost() {
  return ordelic::CostMatrix({{0, 3, 5}, {1, 0, 3}, {3, 1, 0}});
}

inline std::vector<ordelic::AffineBoundary> three_outcome_boundaries() {
  return {{{-3, 1, 0}, -2}, {{5, 4, 0}, 3}};
}

inline const double kRoot14 = std::sqrt(14.0);

inline std::vector<double> normal_one() { return {-1 / kRoot14, 3 / kRoot14, 2 / kRoot14}; }
inline std::vector<double> normal_two() { return {-2 / kRoot14, -1 / kRoot14, 3 / kRoot14}; }

inline ordelic::EmbeddingInput embedding_input() {
  return ordelic::build_envelope_loss(three_outcome_cost(), {0, 1, 3}, 3.0);
}

inline ordelic::SmoothedSurrogate embedding_surrogate() {
  return ordelic::build_surrogate(embedding_input());
}

inline ordelic::OrderableSpec normals_spec() {
  return ordelic::OrderableSpec{{"r1", "r2", "r3"}, {{normal_one()}, {normal_two()}},
                                three_outcome_cost()};
}

inline ordelic::NormalsSurrogate normals_surrogate() {
  return ordelic::build_normals_surrogate(normals_spec());
}

/// -3 p1 + p2 + 2 (zero on the first boundary)
inline double first_boundary(const ordelic::SimplexPoint& p) { return -3 * p[0] + p[1] + 2; }
/// 5 p1 + 4 p2 - 3 (zero on the second boundary)
inline double second_boundary(const ordelic::SimplexPoint& p) { return 5 * p[0] + 4 * p[1] - 3; }


/// Random cost matrix whose columns are strictly convex in the embedding
/// points, so the envelope construction embeds it exactly. Outcome 1 prefers
/// the first report and outcome n the last one.
inline ordelic::CostMatrix random_embeddable_cost(std::size_t n, std::size_t k,
                                                  std::vector<double>& phi, ordelic::Rng& rng) {
  phi.assign(k, 0.0);
  for (std::size_t r = 1; r < k; ++r) phi[r] = phi[r - 1] + rng.uniform(0.5, 2.0);
  std::vector<std::vector<double>> cols(n, std::vector<double>(k));
  for (std::size_t y = 0; y < n; ++y) {
    std::vector<double> slopes(k - 1);
    for (double& s : slopes) s = rng.normal() * 2.0;
    std::sort(slopes.begin(), slopes.end());
    if (y == 0) {
      const double shift = 0.2 - slopes.front();
      for (double& s : slopes) s += shift;
    } else if (y + 1 == n) {
      const double shift = -0.2 - slopes.back();
      for (double& s : slopes) s += shift;
    }
    for (std::size_t i = 1; i < slopes.size(); ++i)
      slopes[i] = std::max(slopes[i], slopes[i - 1] + 0.05);
    cols[y][0] = 0.0;
    for (std::size_t r = 1; r < k; ++r)
      cols[y][r] = cols[y][r - 1] + slopes[r - 1] * (phi[r] - phi[r - 1]);
    const double lo = *std::min_element(cols[y].begin(), cols[y].end());
    for (double& v : cols[y]) v -= lo;
  }
  std::vector<std::vector<double>> rows(k, std::vector<double>(n));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t y = 0; y < n; ++y) rows[r][y] = cols[y][r];
  return ordelic::CostMatrix(std::move(rows));
}

struct RandomSpec {
  ordelic::CostMatrix cost;
  std::vector<double> phi;
  ordelic::OrderableSpec spec;
  std::vector<ordelic::SimplexPoint> witnesses;
};

/// Draws random embeddable costs until every report owns a full-dimensional
/// region and consecutive tie boundaries are strictly separated.
inline RandomSpec random_orderable_spec(std::size_t n, std::size_t k, std::uint64_t seed) {
  ordelic::Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> phi;
    auto cost = random_embeddable_cost(n, k, phi, rng);
    std::vector<std::string> names;
    for (std::size_t r = 1; r <= k; ++r) names.push_back("r" + std::to_string(r));
    try {
      auto witnesses = ordelic::witnesses_from_cost(cost, ordelic::derive_seed(seed, "witness"));
      auto spec = ordelic::spec_from_cost(names, cost, witnesses, 0);
      ordelic::require_strongly_orderable(spec, 1e-3);
      return {cost, phi, spec, witnesses};
    } catch (const ordelic::Error&) {
    }
  }
  throw std::runtime_error("no orderable spec drawn");
}


/// Mean of Y in {1, 2, 3} thresholded at 3/2, with identification u - y.
inline ordelic::SmoothedSurrogate mean_threshold_surrogate() {
  std::vector<ordelic::PiecewiseAffine> v;
  for (double y : {1.0, 2.0, 3.0}) v.emplace_back(std::vector<double>{}, std::vector<ordelic::Affine>{{1.0, -y}});
  return ordelic::surrogate_from_identification(
      std::move(v), {1.5}, ordelic::CostMatrix({{0, 0.5, 1.5}, {0.5, 0, 0}}));
}

}  // namespace fixture
