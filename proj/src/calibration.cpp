#include "ordelic/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ordelic {

Population cells_from_dataset(const LabeledDataset& data) {
  if (data.size() == 0) throw Error(ErrorCode::kInvalidInput, "empty dataset");
  const auto est = empirical_conditional<std::string>(
      data, [](const std::string& x) { return x; });
  Population out;
  const double total = static_cast<double>(data.size());
  for (const auto& [x, cond] : est.conditionals) {
    const std::size_t c = est.counts.at(x);
    out.push_back({x, double(c) / total, cond, c});
  }
  return out;
}

std::string_view prediction_kind_name(PredictionKind k) {
  switch (k) {
    case PredictionKind::kDistribution: return "distribution";
    case PredictionKind::kScalar: return "scalar";
    case PredictionKind::kDiscrete: return "discrete";
  }
  return "?";
}

PredictionKind parse_prediction_kind(std::string_view s) {
  if (s == "distribution") return PredictionKind::kDistribution;
  if (s == "scalar") return PredictionKind::kScalar;
  if (s == "discrete") return PredictionKind::kDiscrete;
  throw Error(ErrorCode::kInvalidInput, "unknown predictor kind '" + std::string(s) + "'");
}

void PredictorTable::set(const std::string& x_id, Value v) {
  const std::size_t want = static_cast<std::size_t>(kind_);
  if (v.index() != want) {
    throw Error(ErrorCode::kInvalidInput, "prediction for '" + x_id + "' does not match the " +
                                              std::string(prediction_kind_name(kind_)) +
                                              " table");
  }
  values_.insert_or_assign(x_id, std::move(v));
}

const PredictorTable::Value& PredictorTable::at(const std::string& x_id) const {
  const auto it = values_.find(x_id);
  if (it == values_.end()) {
    throw Error(ErrorCode::kInvalidInput, "no prediction for x_id '" + x_id + "'");
  }
  return it->second;
}

const SimplexPoint& PredictorTable::distribution(const std::string& x_id) const {
  return std::get<SimplexPoint>(at(x_id));
}
double PredictorTable::scalar(const std::string& x_id) const { return std::get<double>(at(x_id)); }
int PredictorTable::discrete(const std::string& x_id) const { return std::get<int>(at(x_id)); }

PredictorTable PredictorTable::compose(const PropertyFn& prop) const {
  if (kind_ != PredictionKind::kDistribution) {
    throw Error(ErrorCode::kInvalidInput, "property composition needs a distributional table");
  }
  PredictorTable out(PredictionKind::kScalar);
  for (const auto& [x, v] : values_) out.set(x, prop(std::get<SimplexPoint>(v)));
  return out;
}

PredictorTable PredictorTable::compose(const LinkFn& link) const {
  if (kind_ != PredictionKind::kScalar) {
    throw Error(ErrorCode::kInvalidInput, "link composition needs a scalar table");
  }
  PredictorTable out(PredictionKind::kDiscrete);
  for (const auto& [x, v] : values_) out.set(x, link(std::get<double>(v)));
  return out;
}

bool AuditReport::all_satisfied() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const BoundCheck& b) { return b.satisfied; });
}

double Binning::key(double u) const {
  if (!width) return u;
  return (std::floor(u / *width) + 0.5) * *width;
}

namespace {

template <typename Key>
struct Bin {
  double weight = 0.0;
  std::vector<double> mass;
  std::size_t rows = 0;
};

template <typename Key>
struct Bins {
  std::map<Key, Bin<Key>> bins;
  std::map<Key, SimplexPoint> conditional;
  double total = 0.0;
};

template <typename Key, typename KeyFn>
Bins<Key> bin_cells(const Population& cells, KeyFn&& key_of) {
  if (cells.empty()) throw Error(ErrorCode::kInvalidInput, "empty dataset");
  Bins<Key> out;
  for (const auto& c : cells) {
    if (c.weight < 0.0 || !std::isfinite(c.weight)) {
      throw Error(ErrorCode::kInvalidInput, "cell weights must be nonnegative");
    }
    if (c.weight == 0.0) continue;
    auto& b = out.bins[key_of(c)];
    if (b.mass.empty()) b.mass.assign(c.conditional.size(), 0.0);
    if (c.conditional.size() != b.mass.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "conditional size mismatch");
    }
    b.weight += c.weight;
    for (std::size_t i = 0; i < b.mass.size(); ++i) b.mass[i] += c.weight * c.conditional[i];
    b.rows += c.count;
    out.total += c.weight;
  }
  if (!(out.total > 0.0)) throw Error(ErrorCode::kInvalidInput, "empty dataset");
  for (auto& [k, b] : out.bins) {
    std::vector<double> p(b.mass);
    for (double& x : p) x /= b.weight;
    out.conditional.emplace(k, SimplexPoint(std::move(p)));
  }
  return out;
}

template <typename Key>
BinStats stats_of(const Bins<Key>& b, const Binning* binning = nullptr) {
  BinStats s;
  s.count = b.bins.size();
  s.min_size = std::numeric_limits<std::size_t>::max();
  for (const auto& [k, bin] : b.bins) s.min_size = std::min(s.min_size, bin.rows);
  if (b.bins.empty()) s.min_size = 0;
  if constexpr (std::is_same_v<Key, double>) {
    if (binning && binning->width && !b.bins.empty()) {
      const double lo = b.bins.begin()->first, hi = b.bins.rbegin()->first;
      const auto span = static_cast<std::size_t>(std::llround((hi - lo) / *binning->width)) + 1;
      s.empty = span - b.bins.size();
    }
  }
  return s;
}

double plot_distance(const SimplexPoint& a, const SimplexPoint& b) {
  const auto [ax, ay] = ternary_plot_coords(a);
  const auto [bx, by] = ternary_plot_coords(b);
  return std::hypot(ax - bx, ay - by);
}

}  // namespace

AuditReport dist_calibration_wrt(const PredictorTable& f, const Population& cells,
                                 const PropertyFn& prop, NormKind norm, const Binning& binning) {
  std::map<std::string, double> key_of_x;
  const auto bins = bin_cells<double>(cells, [&](const FeatureCell& c) {
    const double k = binning.key(prop(f.distribution(c.x_id)));
    key_of_x[c.x_id] = k;
    return k;
  });
  AuditReport r;
  r.notion = "distribution";
  r.norm = norm;
  const bool ternary = cells.front().conditional.size() == 3;
  double eps = 0.0, eps_plot = 0.0;
  for (const auto& c : cells) {
    if (c.weight == 0.0) continue;
    const auto& pred = f.distribution(c.x_id);
    const auto& cond = bins.conditional.at(key_of_x.at(c.x_id));
    eps += c.weight * norm_distance(pred, cond, norm);
    if (ternary) eps_plot += c.weight * plot_distance(pred, cond);
  }
  r.epsilon_hat = eps / bins.total;
  if (ternary) r.epsilon_plot = eps_plot / bins.total;
  r.bins = stats_of(bins, &binning);
  return r;
}

AuditReport surrogate_calibration(const PredictorTable& g, const Population& cells,
                                  const PropertyFn& prop, const Binning& binning) {
  const auto bins = bin_cells<double>(
      cells, [&](const FeatureCell& c) { return binning.key(g.scalar(c.x_id)); });
  AuditReport r;
  r.notion = "surrogate";
  r.norm = NormKind::kL2;
  double eps = 0.0;
  for (const auto& [k, bin] : bins.bins) {
    // the key is the prediction itself, or the bin midpoint under width binning
    eps += bin.weight * std::abs(prop(bins.conditional.at(k)) - k);
  }
  r.epsilon_hat = eps / bins.total;
  r.bins = stats_of(bins, &binning);
  return r;
}

AuditReport discrete_calibration(const PredictorTable& h, const Population& cells,
                                 const DiscreteFn& gamma) {
  const auto bins =
      bin_cells<int>(cells, [&](const FeatureCell& c) { return h.discrete(c.x_id); });
  AuditReport r;
  r.notion = "discrete";
  double miss = 0.0;
  for (const auto& [k, bin] : bins.bins) {
    const auto allowed = gamma(bins.conditional.at(k));
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) miss += bin.weight;
  }
  r.epsilon_hat = miss / bins.total;
  r.bins = stats_of(bins);
  return r;
}

AuditReport check_postprocessing_bound(const PredictorTable& f, const Population& cells,
                                       const PropertyFn& prop, double lipschitz,
                                       NormKind norm) {
  const AuditReport dist = dist_calibration_wrt(f, cells, prop, norm);
  AuditReport out = surrogate_calibration(f.compose(prop), cells, prop);
  out.norm = norm;
  BoundCheck b;
  b.name = "postprocessing";
  b.lhs = out.epsilon_hat;
  b.rhs = lipschitz * dist.epsilon_hat;
  b.satisfied = b.lhs <= b.rhs + 1e-9;
  b.params = {{"K", lipschitz}, {"epsilon", dist.epsilon_hat}};
  out.bounds.push_back(b);
  if (lipschitz < 1.0) {
    BoundCheck c;
    c.name = "contraction";
    c.lhs = out.epsilon_hat;
    c.rhs = dist.epsilon_hat;
    c.satisfied = c.lhs <= c.rhs + 1e-9;
    c.params = {{"K", lipschitz}};
    out.bounds.push_back(c);
  }
  return out;
}

double delta_to_threshold(const std::vector<double>& thresholds, double u) {
  if (thresholds.empty()) throw Error(ErrorCode::kInvalidInput, "no link thresholds");
  double best = std::numeric_limits<double>::infinity();
  for (double t : thresholds) best = std::min(best, std::abs(u - t));
  return best;
}

double link_diameter(const std::vector<double>& thresholds, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::kDegenerate, "property range has zero length");
  std::vector<double> cuts{lo};
  for (double t : thresholds) cuts.push_back(std::clamp(t, lo, hi));
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double widest = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) widest = std::max(widest, cuts[i + 1] - cuts[i]);
  return widest;
}

std::vector<double> default_t_grid(double delta_min, double range_width) {
  const double hi = range_width;
  const double lo = delta_min > 0.0 ? std::min(delta_min / 10.0, hi) : hi * 1e-6;
  std::vector<double> grid;
  constexpr int kPoints = 20;
  for (int i = 0; i < kPoints; ++i) {
    grid.push_back(lo * std::pow(hi / lo, double(i) / double(kPoints - 1)));
  }
  if (delta_min > 0.0) grid.push_back(delta_min);
  std::sort(grid.begin(), grid.end());
  return grid;
}

double estimate_marginal_lipschitz(const PredictorTable& g, const Population& cells,
                                   NormKind norm, const Binning& binning) {
  const auto bins = bin_cells<double>(
      cells, [&](const FeatureCell& c) { return binning.key(g.scalar(c.x_id)); });
  double best = 0.0;
  for (auto a = bins.conditional.begin(); a != bins.conditional.end(); ++a) {
    for (auto b = std::next(a); b != bins.conditional.end(); ++b) {
      const double du = std::abs(a->first - b->first);
      if (du > 0.0) best = std::max(best, norm_distance(a->second, b->second, norm) / du);
    }
  }
  return best;
}

BoundCheck check_discretization_bound(const PredictorTable& g, const Population& cells,
                                      const Surrogate& s, const DiscretizationOptions& opts) {
  const PropertyFn prop = property_fn(s);
  const auto bins = bin_cells<double>(
      cells, [&](const FeatureCell& c) { return opts.binning.key(g.scalar(c.x_id)); });
  const double eps_prime = surrogate_calibration(g, cells, prop, opts.binning).epsilon_hat;

  double delta_min = std::numeric_limits<double>::infinity();
  double mismatch = 0.0;
  std::size_t rows = 0;
  std::vector<std::pair<double, double>> deltas;  // (delta, weight)
  for (const auto& c : cells) {
    if (c.weight == 0.0) continue;
    const double u = g.scalar(c.x_id);
    const double d = delta_to_threshold(s.thresholds(), u);
    delta_min = std::min(delta_min, d);
    deltas.emplace_back(d, c.weight / bins.total);
    const auto allowed = s.discrete(bins.conditional.at(opts.binning.key(u)));
    if (std::find(allowed.begin(), allowed.end(), s.link(u)) == allowed.end()) {
      mismatch += c.weight / bins.total;
    }
    rows += c.count;
  }

  const double lo = s.gamma_min(), hi = s.gamma_max();
  const double diam = link_diameter(s.thresholds(), lo, hi);
  const double lip = s.lipschitz(opts.norm);
  BoundCheck b;
  b.name = "discretization";
  double marginal = 0.0;
  if (opts.marginal_lipschitz) {
    marginal = *opts.marginal_lipschitz;
  } else {
    marginal = estimate_marginal_lipschitz(g, cells, opts.norm, opts.binning);
    b.flags.push_back("marginal_lipschitz_estimated");
  }
  std::vector<double> grid = opts.t_grid.empty() ? default_t_grid(delta_min, hi - lo) : opts.t_grid;
  if (opts.t_grid.size() && delta_min > 0.0) grid.push_back(delta_min);

  auto tail = [&](double t) {
    double pr = 0.0;
    for (const auto& [d, w] : deltas)
      if (d < t) pr += w;
    return pr;
  };
  auto minimize = [&](double numerator, double& t_star) {
    double best = std::numeric_limits<double>::infinity();
    for (double t : grid) {
      if (!(t > 0.0)) continue;
      const double v = tail(t) + numerator / t;
      if (v < best) {
        best = v;
        t_star = t;
      }
    }
    return best;
  };

  double t_star = 0.0;
  b.lhs = mismatch;
  b.rhs = minimize(eps_prime + lip * marginal * diam, t_star);
  b.satisfied = b.lhs <= b.rhs + 1e-9;
  b.params = {{"epsilon_prime", eps_prime}, {"delta_min", delta_min}, {"diam", diam},
              {"K", lip},  {"C", marginal},  {"t_star", t_star},
              {"at_delta_min", delta_min > 0.0
                                   ? (eps_prime + lip * marginal * diam) / delta_min
                                   : std::numeric_limits<double>::infinity()}};
  if (rows > 0) b.params["standard_error"] = std::sqrt(mismatch * (1.0 - mismatch) / double(rows));
  if (b.rhs >= 1.0) b.flags.push_back("vacuous");

  if (opts.source) {
    const double eps = dist_calibration_wrt(*opts.source, cells, prop, opts.norm).epsilon_hat;
    double t_c = 0.0;
    b.params["composed_epsilon"] = eps;
    b.params["composed_rhs"] = minimize(lip * eps + marginal * lip * diam, t_c);
    b.params["composed_t_star"] = t_c;
  }
  return b;
}

namespace {

std::vector<double> tangent_direction(std::size_t n, Rng& rng) {
  std::vector<double> d(n);
  double mean = 0.0;
  for (double& x : d) {
    x = rng.normal();
    mean += x / double(n);
  }
  for (double& x : d) x -= mean;
  const double len = norm(d, NormKind::kL2);
  for (double& x : d) x /= len;
  return d;
}

// Moves along d and clips back onto the simplex, so faces stay reachable.
std::optional<SimplexPoint> shifted(const SimplexPoint& p, const std::vector<double>& d, double r) {
  std::vector<double> q(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = std::max(0.0, p[i] + r * d[i]);
    sum += q[i];
  }
  if (!(sum > 0.0)) return std::nullopt;
  for (double& x : q) x /= sum;
  return SimplexPoint(std::move(q));
}

SimplexPoint sample_face_point(std::size_t n, Rng& rng) {
  std::vector<double> q = sample_simplex_point(n, rng).vec();
  const std::size_t keep = rng.index(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != keep && rng.uniform() < 0.5) q[i] = 0.0;
    sum += q[i];
  }
  for (double& x : q) x /= sum;
  return SimplexPoint(std::move(q));
}

}  // namespace

PairSearchResult lipschitz_estimate(const PropertyFn& prop, std::size_t n, NormKind norm,
                                    std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw Error(ErrorCode::kInvalidInput, "need at least two samples");
  Rng rng(seed);
  PairSearchResult best{SimplexPoint::centroid(n), SimplexPoint::centroid(n), 0.0};
  auto consider = [&](const SimplexPoint& p, const SimplexPoint& q) {
    const double dist = norm_distance(p, q, norm);
    // shorter pairs are dominated by rounding in the difference quotient
    if (!(dist > 1e-8)) return false;
    double gp, gq;
    try {
      gp = prop(p);
      gq = prop(q);
    } catch (const Error&) {
      return false;
    }
    const double ratio = std::abs(gp - gq) / dist;
    if (ratio > best.ratio) {
      best = {p, q, ratio};
      return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < samples; ++i) {
    const SimplexPoint p = i % 4 == 3 ? sample_face_point(n, rng) : sample_simplex_point(n, rng);
    if (i % 2 == 0) {
      consider(p, sample_simplex_point(n, rng));
    } else {
      const auto d = tangent_direction(n, rng);
      const double r = std::pow(10.0, rng.uniform(-5.0, -1.0));
      if (auto q = shifted(p, d, r)) consider(p, *q);
    }
  }

  // coordinate-free hill climbing on both endpoints
  if (best.ratio > 0.0) {
    double scale = 0.5 * norm_distance(best.p, best.q, NormKind::kL2);
    for (int it = 0; it < 4000 && scale > 1e-12; ++it) {
      const auto dp = tangent_direction(n, rng);
      const auto dq = tangent_direction(n, rng);
      const auto p = shifted(best.p, dp, scale * rng.uniform());
      const auto q = shifted(best.q, dq, scale * rng.uniform());
      if (!p || !q || !consider(*p, *q)) scale *= 0.995;
    }
  }
  return best;
}

Counterexample counterexample_gap(const PropertyFn& prop, std::size_t n, double constant,
                                  NormKind norm, std::size_t budget, std::uint64_t seed) {
  if (!(constant >= 0.0)) throw Error(ErrorCode::kInvalidInput, "constant must be nonnegative");
  Counterexample out;
  out.constant = constant;
  out.pair = lipschitz_estimate(prop, n, norm, budget, seed);
  out.found = out.pair.ratio > constant;

  out.population = {FeatureCell{"x", 1.0, out.pair.q, 0}};
  out.predictor = PredictorTable(PredictionKind::kDistribution);
  out.predictor.set("x", out.pair.p);
  out.distribution = dist_calibration_wrt(out.predictor, out.population, prop, norm);
  out.surrogate = surrogate_calibration(out.predictor.compose(prop), out.population, prop);
  out.surrogate.norm = norm;
  BoundCheck b;
  b.name = "exceeds_constant_times_distribution_error";
  b.lhs = out.surrogate.epsilon_hat;
  b.rhs = constant * out.distribution.epsilon_hat;
  b.satisfied = b.lhs > b.rhs;
  b.params = {{"C", constant}, {"ratio", out.pair.ratio}, {"epsilon", out.distribution.epsilon_hat}};
  out.surrogate.bounds.push_back(b);
  return out;
}

SimplexPoint level_point_on_plot_circle(const PropertyFn& prop, double target, double cx,
                                       double cy, double radius, double hint_x, double hint_y) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidInput, "radius must be positive");
  const double pi = std::acos(-1.0);
  auto point = [&](double a) -> std::optional<SimplexPoint> {
    const double x = cx + radius * std::cos(a), y = cy + radius * std::sin(a);
    const double p2 = 2.0 * y / std::sqrt(3.0), p3 = x - p2 / 2.0;
    if (p2 < 0.0 || p3 < 0.0 || p2 + p3 > 1.0) return std::nullopt;
    return from_ternary_plot_coords(x, y);
  };
  auto f = [&](double a) -> std::optional<double> {
    const auto p = point(a);
    if (!p) return std::nullopt;
    return prop(*p) - target;
  };
  const double hint = std::atan2(hint_y - cy, hint_x - cx);
  auto angular = [&](double a) { return std::abs(std::remainder(a - hint, 2.0 * pi)); };
  constexpr int kSteps = 20000;
  double best_a = 0.0, best_b = 0.0, best_dist = std::numeric_limits<double>::infinity();
  double a0 = 0.0;
  auto f0 = f(a0);
  for (int i = 1; i <= kSteps; ++i) {
    const double a1 = 2.0 * pi * double(i) / kSteps;
    const auto f1 = f(a1);
    if (f0 && f1 && ((*f0 <= 0.0) != (*f1 <= 0.0))) {
      const double d = angular(0.5 * (a0 + a1));
      if (d < best_dist) {
        best_dist = d;
        best_a = a0;
        best_b = a1;
      }
    }
    a0 = a1;
    f0 = f1;
  }
  if (!std::isfinite(best_dist)) {
    throw Error(ErrorCode::kNoRoot, "level set does not cross the plot circle");
  }
  const bool a_low = *f(best_a) <= 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (best_a + best_b);
    if ((*f(mid) <= 0.0) == a_low) best_a = mid;
    else best_b = mid;
  }
  return *point(0.5 * (best_a + best_b));
}

}  // namespace ordelic
