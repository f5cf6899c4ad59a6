#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ordelic/calibration.hpp"
#include "ordelic/discrete.hpp"
#include "ordelic/scenario.hpp"
#include "ordelic/surrogate.hpp"

namespace ordelic {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips the double.
std::string format_number(double v);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Property spec: {"n", "reports", "cost_matrix"} or {"n", "reports", "boundaries": [{"c", "b"}]},
// with an optional "witnesses" list (one distribution per region).
PropertyDefinition property_from_json(const Json& j);
Json property_to_json(const PropertyDefinition& def);

// Surrogate export, discriminated by "kind".
Json surrogate_to_json(const Surrogate& s);
Surrogate surrogate_from_json(const Json& j);

// Dataset CSV with header x_id,y (y is 1-based).
void write_dataset_csv(std::ostream& out, const LabeledDataset& data);
LabeledDataset read_dataset_csv(std::istream& in, std::size_t outcomes);

// Predictor table: {"kind": ..., "predictions": {x_id: value}}.
Json predictor_to_json(const PredictorTable& t);
PredictorTable predictor_from_json(const Json& j);

// Scenario: {"n", "features": [{"x_id", "weight", "conditional"}], "predictor": {...}}.
// A conditional is a probability list or {"plot": [x, y]} for n = 3.
Json scenario_to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const Json& j);

Json audit_report_to_json(const AuditReport& r);
Json bound_check_to_json(const BoundCheck& b);

struct ConstructResult {
  Surrogate surrogate;
  Json details = Json::object();   // construction diagnostics for reports
};

/// Runs the normals pipeline or the embedding construction ("normals" / "embedding").
/// Embedding points default to the spec's hint, then to 0, 1, ..., k-1.
ConstructResult construct_surrogate(const PropertyDefinition& def, std::string_view algo,
                                    std::optional<std::vector<double>> phi = std::nullopt,
                                    std::optional<double> outer_slope = std::nullopt,
                                    std::uint64_t seed = 0);

struct AuditOptions {
  NormKind norm = NormKind::kL2;
  Binning binning;
  std::optional<double> marginal_lipschitz;
};

/// Every estimator and bound check that applies to the predictor's kind:
/// {"reports": [...], "all_satisfied": bool}.
Json audit_to_json(const Surrogate& s, const Population& cells, const PredictorTable& pred,
                   const AuditOptions& opts);

struct LevelSetRow {
  SimplexPoint p;
  std::vector<int> discrete;
  double surrogate = 0.0;
};

/// Barycentric grid {(i, j, k) / resolution : i + j + k = resolution}, n = 3 only.
std::vector<LevelSetRow> level_set_grid(const Surrogate& s, std::size_t resolution);
void write_level_set_csv(std::ostream& out, const std::vector<LevelSetRow>& rows);

}  // namespace ordelic
