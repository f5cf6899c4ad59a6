#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ordelic/calibration.hpp"

namespace ordelic {

struct ScenarioFeature {
  std::string x_id;
  double weight = 0.0;
  SimplexPoint conditional;
};

enum class RecipeKind { kBayes, kPerturbed, kFixed };

struct PredictorRecipe {
  RecipeKind kind = RecipeKind::kBayes;
  double eta = 0.0;        // perturbed: f = (c + eta * w) / (1 + eta), w ~ Dirichlet(1)
  PredictorTable table;    // fixed
};

/// Finite feature space with marginal weights and per-feature label
/// distributions, plus a recipe for the predictor.
struct ScenarioSpec {
  std::size_t n = 0;
  std::vector<ScenarioFeature> features;
  PredictorRecipe predictor;

  /// Throws unless weights are nonnegative and sum to 1 and conditionals have n entries.
  void validate() const;
  /// Exact population cells (weight, conditional) for audits without sampling.
  Population population() const;
};

/// Draws `rows` (x, y) pairs: x by weight, then y from its conditional.
LabeledDataset simulate_dataset(const ScenarioSpec& s, std::size_t rows, std::uint64_t seed);

/// Distributional predictor materialized from the recipe.
PredictorTable materialize_predictor(const ScenarioSpec& s, std::uint64_t seed);

}  // namespace ordelic
