#include "ordelic/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace ordelic {

void ScenarioSpec::validate() const {
  if (n < 2) throw Error(ErrorCode::kInvalidInput, "scenario needs at least two outcomes");
  if (features.empty()) throw Error(ErrorCode::kInvalidInput, "scenario has no features");
  double total = 0.0;
  for (const auto& f : features) {
    if (!(f.weight >= 0.0) || !std::isfinite(f.weight)) {
      throw Error(ErrorCode::kInvalidInput, "feature weights must be nonnegative");
    }
    if (f.conditional.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "conditional for '" + f.x_id + "' has wrong size");
    }
    total += f.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidInput, "feature weights must sum to 1");
  }
  if (predictor.kind == RecipeKind::kPerturbed && !(predictor.eta >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "perturbation scale must be nonnegative");
  }
  if (predictor.kind == RecipeKind::kFixed) {
    for (const auto& f : features)
      if (!predictor.table.contains(f.x_id)) {
        throw Error(ErrorCode::kInvalidInput, "fixed predictor misses x_id '" + f.x_id + "'");
      }
  }
}

Population ScenarioSpec::population() const {
  validate();
  Population out;
  for (const auto& f : features) out.push_back({f.x_id, f.weight, f.conditional, 0});
  return out;
}

LabeledDataset simulate_dataset(const ScenarioSpec& s, std::size_t rows, std::uint64_t seed) {
  s.validate();
  if (rows == 0) throw Error(ErrorCode::kInvalidInput, "need at least one row");
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& f : s.features) cum.push_back(acc += f.weight);
  Rng rng(derive_seed(seed, "simulate"));
  std::vector<LabeledRow> out;
  out.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double u = rng.uniform() * acc;
    const auto idx = std::min<std::size_t>(
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(), cum.size() - 1);
    const auto& cond = s.features[idx].conditional;
    double v = rng.uniform(), c = 0.0;
    int y = static_cast<int>(s.n);
    for (std::size_t j = 0; j < s.n; ++j) {
      c += cond[j];
      if (v < c) {
        y = static_cast<int>(j) + 1;
        break;
      }
    }
    out.push_back({s.features[idx].x_id, y});
  }
  return LabeledDataset(s.n, std::move(out));
}

PredictorTable materialize_predictor(const ScenarioSpec& s, std::uint64_t seed) {
  s.validate();
  if (s.predictor.kind == RecipeKind::kFixed) return s.predictor.table;
  PredictorTable out(PredictionKind::kDistribution);
  Rng rng(derive_seed(seed, "predictor"));
  for (const auto& f : s.features) {
    if (s.predictor.kind == RecipeKind::kBayes || s.predictor.eta == 0.0) {
      out.set(f.x_id, f.conditional);
      continue;
    }
    const SimplexPoint w = sample_dirichlet(s.n, 1.0, rng);
    std::vector<double> p(s.n);
    for (std::size_t j = 0; j < s.n; ++j)
      p[j] = (f.conditional[j] + s.predictor.eta * w[j]) / (1.0 + s.predictor.eta);
    out.set(f.x_id, SimplexPoint(std::move(p)));
  }
  return out;
}

}  // namespace ordelic
