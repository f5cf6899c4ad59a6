#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ordelic/simplex.hpp"
#include "ordelic/surrogate.hpp"

namespace ordelic {

/// One feature value with its probability mass and label distribution. A
/// dataset becomes a list of cells with empirical conditionals; synthetic
/// populations carry exact conditionals.
struct FeatureCell {
  std::string x_id;
  double weight = 0.0;
  SimplexPoint conditional;
  std::size_t count = 0;  // rows behind the cell (0 for exact populations)
};

using Population = std::vector<FeatureCell>;

Population cells_from_dataset(const LabeledDataset& data);

enum class PredictionKind { kDistribution, kScalar, kDiscrete };

std::string_view prediction_kind_name(PredictionKind k);
PredictionKind parse_prediction_kind(std::string_view s);

/// Predictions per x_id; all entries share one kind.
class PredictorTable {
 public:
  using Value = std::variant<SimplexPoint, double, int>;

  PredictorTable() = default;
  explicit PredictorTable(PredictionKind kind) : kind_(kind) {}

  PredictionKind kind() const { return kind_; }
  void set(const std::string& x_id, Value v);
  bool contains(const std::string& x_id) const { return values_.contains(x_id); }
  std::size_t size() const { return values_.size(); }
  const std::map<std::string, Value>& values() const { return values_; }

  const SimplexPoint& distribution(const std::string& x_id) const;
  double scalar(const std::string& x_id) const;
  int discrete(const std::string& x_id) const;

  /// g = prop(f) for a distributional table.
  PredictorTable compose(const PropertyFn& prop) const;
  /// h = link(g) for a scalar table.
  PredictorTable compose(const LinkFn& link) const;

 private:
  const Value& at(const std::string& x_id) const;

  PredictionKind kind_ = PredictionKind::kDistribution;
  std::map<std::string, Value> values_;
};

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  std::map<std::string, double> params;
  std::vector<std::string> flags;
};

struct BinStats {
  std::size_t count = 0;
  std::size_t min_size = 0;
  std::size_t empty = 0;
};

struct AuditReport {
  std::string notion;
  NormKind norm = NormKind::kL2;
  double epsilon_hat = 0.0;
  std::optional<double> epsilon_plot;   // ternary plot distance, n = 3 only
  BinStats bins;
  std::vector<BoundCheck> bounds;

  bool all_satisfied() const;
};

/// Scalar bins: exact values, or uniform width with the bin midpoint as key.
struct Binning {
  std::optional<double> width;
  double key(double u) const;
};

// ---------------------------------------------------------------------------
// Calibration estimators.

/// E ||f(X) - D_{Y | bin(f(X))}|| with bins keyed by prop(f(x)).
AuditReport dist_calibration_wrt(const PredictorTable& f, const Population& cells,
                                 const PropertyFn& prop, NormKind norm,
                                 const Binning& binning = {});

/// E |prop(D_{Y | g(X)}) - g(X)|.
AuditReport surrogate_calibration(const PredictorTable& g, const Population& cells,
                                  const PropertyFn& prop, const Binning& binning = {});

/// Pr[h(X) not in gamma(D_{Y | h(X)})].
AuditReport discrete_calibration(const PredictorTable& h, const Population& cells,
                                 const DiscreteFn& gamma);

// ---------------------------------------------------------------------------
// Bounds.

/// Post-processing bound eps' <= K eps for g = prop o f, plus the contraction
/// check eps' <= eps when K < 1. Returns the report for eps' with the checks attached.
AuditReport check_postprocessing_bound(const PredictorTable& f, const Population& cells,
                                       const PropertyFn& prop, double lipschitz,
                                       NormKind norm);

double delta_to_threshold(const std::vector<double>& thresholds, double u);

/// Widest interval of reports mapped to one discrete report, clipped to [lo, hi].
double link_diameter(const std::vector<double>& thresholds, double lo, double hi);

struct DiscretizationOptions {
  std::optional<double> marginal_lipschitz;  // estimated from bins when absent
  std::vector<double> t_grid;                // default: 20 log-spaced values + delta_min
  NormKind norm = NormKind::kL2;
  Binning binning;
  /// Distributional predictor behind g, enables the composed variant.
  const PredictorTable* source = nullptr;
};

/// Mismatch probability of link(g) against gamma of the bin conditional,
/// bounded by min_t Pr[delta(g) < t] + (eps' + K C diam) / t.
BoundCheck check_discretization_bound(const PredictorTable& g, const Population& cells,
                                      const Surrogate& s, const DiscretizationOptions& opts = {});

/// Max over pairs of bins of ||cond_u - cond_u'|| / |u - u'|.
double estimate_marginal_lipschitz(const PredictorTable& g, const Population& cells,
                                   NormKind norm, const Binning& binning = {});

std::vector<double> default_t_grid(double delta_min, double range_width);

// ---------------------------------------------------------------------------
// Lipschitz search and the lower-bound counterexample.

struct PairSearchResult {
  SimplexPoint p;
  SimplexPoint q;
  double ratio = 0.0;
};

/// Max difference quotient |prop(p) - prop(q)| / ||p - q|| over random
/// pairs, followed by local refinement of the best pair.
PairSearchResult lipschitz_estimate(const PropertyFn& prop, std::size_t n, NormKind norm,
                                    std::size_t samples, std::uint64_t seed);

struct Counterexample {
  bool found = false;
  PairSearchResult pair;
  double constant = 0.0;
  Population population;       // one feature with conditional q
  PredictorTable predictor;    // f(x) = p
  AuditReport distribution;    // eps = ||p - q||
  AuditReport surrogate;       // |prop(q) - prop(p)| > C eps when found
};

Counterexample counterexample_gap(const PropertyFn& prop, std::size_t n, double constant,
                                  NormKind norm, std::size_t budget, std::uint64_t seed);

/// Point with prop(p) = target on the ternary-plot circle of `radius` around
/// (cx, cy), taking the crossing angularly nearest to (hint_x, hint_y).
SimplexPoint level_point_on_plot_circle(const PropertyFn& prop, double target, double cx,
                                       double cy, double radius, double hint_x, double hint_y);

}  // namespace ordelic
