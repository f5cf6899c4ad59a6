#include "ordelic/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ordelic {

std::string format_number(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path.string());
  out << text;
}

namespace {

// Wraps nlohmann access errors as input errors.
template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string(what) + ": " + e.what());
  }
}

std::vector<double> numbers(const Json& j) { return j.get<std::vector<double>>(); }

Json affine_json(const PiecewiseAffine& f) {
  Json pieces = Json::array();
  for (const auto& a : f.pieces()) pieces.push_back({a.slope, a.intercept});
  return {{"breakpoints", f.breakpoints()}, {"pieces", pieces}};
}

PiecewiseAffine affine_from(const Json& j) {
  std::vector<Affine> pieces;
  for (const auto& p : j.at("pieces")) pieces.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return PiecewiseAffine(numbers(j.at("breakpoints")), std::move(pieces));
}

Json quadratic_json(const PiecewiseQuadratic& f) {
  Json pieces = Json::array();
  for (const auto& q : f.pieces()) pieces.push_back({q.c2, q.c1, q.c0});
  return {{"breakpoints", f.breakpoints()}, {"pieces", pieces}};
}

PiecewiseQuadratic quadratic_from(const Json& j) {
  std::vector<Quadratic> pieces;
  for (const auto& p : j.at("pieces"))
    pieces.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  return PiecewiseQuadratic(numbers(j.at("breakpoints")), std::move(pieces));
}

std::vector<std::string> default_reports(std::size_t k) {
  std::vector<std::string> r;
  for (std::size_t i = 1; i <= k; ++i) r.push_back("r" + std::to_string(i));
  return r;
}

SimplexPoint point_from(const Json& j, std::size_t n) {
  if (j.is_object() && j.contains("plot")) {
    if (n != 3) throw Error(ErrorCode::kInvalidInput, "plot coordinates need n = 3");
    return from_ternary_plot_coords(j.at("plot").at(0).get<double>(), j.at("plot").at(1).get<double>());
  }
  auto v = numbers(j);
  if (v.size() != n) throw Error(ErrorCode::kDimensionMismatch, "distribution has wrong length");
  return SimplexPoint(std::move(v));
}

}  // namespace

PropertyDefinition property_from_json(const Json& j) {
  return guarded("property spec", [&] {
    PropertyDefinition def;
    def.n = j.at("n").get<std::size_t>();
    if (def.n < 2) throw Error(ErrorCode::kInvalidInput, "n must be at least 2");
    const bool has_cost = j.contains("cost_matrix");
    const bool has_bounds = j.contains("boundaries");
    if (has_cost == has_bounds) {
      throw Error(ErrorCode::kInvalidInput,
                  "property spec needs exactly one of cost_matrix or boundaries");
    }
    if (has_cost) {
      def.cost = CostMatrix(j.at("cost_matrix").get<std::vector<std::vector<double>>>());
      if (def.cost->outcomes() != def.n) {
        throw Error(ErrorCode::kDimensionMismatch, "cost matrix columns must equal n");
      }
    } else {
      for (const auto& b : j.at("boundaries")) {
        AffineBoundary bd{numbers(b.at("c")), b.at("b").get<double>()};
        if (bd.c.size() != def.n) {
          throw Error(ErrorCode::kDimensionMismatch, "boundary coefficients must have n entries");
        }
        def.boundaries.push_back(std::move(bd));
      }
      if (def.boundaries.empty()) throw Error(ErrorCode::kInvalidInput, "no boundaries");
    }
    const std::size_t k = def.cost ? def.cost->reports() : def.boundaries.size() + 1;
    if (j.contains("reports")) {
      def.reports = j.at("reports").get<std::vector<std::string>>();
      if (def.reports.size() != k) {
        throw Error(ErrorCode::kInvalidInput, "expected " + std::to_string(k) + " report names");
      }
    } else {
      def.reports = default_reports(k);
    }
    if (j.contains("witnesses")) {
      std::vector<SimplexPoint> w;
      for (const auto& p : j.at("witnesses")) w.push_back(point_from(p, def.n));
      if (w.size() != k) throw Error(ErrorCode::kInvalidInput, "need one witness per report");
      def.witnesses = std::move(w);
    }
    if (j.contains("embedding")) {
      const auto& e = j.at("embedding");
      if (e.contains("phi")) def.phi = numbers(e.at("phi"));
      if (e.contains("outer_slope")) def.outer_slope = e.at("outer_slope").get<double>();
    }
    return def;
  });
}

Json property_to_json(const PropertyDefinition& def) {
  Json j{{"n", def.n}, {"reports", def.reports}};
  if (def.cost) {
    j["cost_matrix"] = def.cost->entries();
  } else {
    Json b = Json::array();
    for (const auto& bd : def.boundaries) b.push_back({{"c", bd.c}, {"b", bd.b}});
    j["boundaries"] = b;
  }
  if (def.witnesses) {
    Json w = Json::array();
    for (const auto& p : *def.witnesses) w.push_back(p.vec());
    j["witnesses"] = w;
  }
  if (def.phi || def.outer_slope) {
    Json e = Json::object();
    if (def.phi) e["phi"] = *def.phi;
    if (def.outer_slope) e["outer_slope"] = *def.outer_slope;
    j["embedding"] = e;
  }
  return j;
}

Json surrogate_to_json(const Surrogate& s) {
  Json j{{"kind", s.kind()}, {"outcomes", s.outcomes()}};
  Json ident = Json::array(), loss = Json::array();
  std::optional<CostMatrix> cost;
  if (const auto* e = s.embedding()) {
    for (const auto& v : e->v_bar) ident.push_back(affine_json(v));
    for (const auto& l : e->l_bar) loss.push_back(quadratic_json(l));
    j["reports"] = default_reports(e->reports());
    j["phi"] = e->phi;
    j["interpolation"] = e->interpolation;
    j["vbar_sup"] = e->vbar_sup;
    cost = e->cost;
  } else {
    const auto& n = *s.normals();
    for (const auto& v : n.v) ident.push_back(affine_json(v));
    for (const auto& l : n.loss) loss.push_back(quadratic_json(l));
    j["reports"] = n.spec.reports;
    Json normals = Json::array();
    for (const auto& o : n.spec.normals) normals.push_back(o.o);
    j["normals"] = normals;
    cost = n.spec.cost;
  }
  j["thresholds"] = s.thresholds();
  j["range"] = {s.gamma_min(), s.gamma_max()};
  j["lipschitz"] = s.lipschitz(NormKind::kL2);
  j["identification"] = ident;
  j["loss"] = loss;
  if (cost) j["cost_matrix"] = cost->entries();
  return j;
}

Surrogate surrogate_from_json(const Json& j) {
  return guarded("surrogate", [&]() -> Surrogate {
    const auto kind = j.at("kind").get<std::string>();
    std::vector<PiecewiseAffine> ident;
    std::vector<PiecewiseQuadratic> loss;
    for (const auto& v : j.at("identification")) ident.push_back(affine_from(v));
    for (const auto& l : j.at("loss")) loss.push_back(quadratic_from(l));
    if (ident.size() != loss.size() || ident.empty()) {
      throw Error(ErrorCode::kInvalidInput, "identification and loss must cover every outcome");
    }
    std::optional<CostMatrix> cost;
    if (j.contains("cost_matrix")) {
      cost = CostMatrix(j.at("cost_matrix").get<std::vector<std::vector<double>>>());
    }
    const auto range = numbers(j.at("range"));
    if (range.size() != 2) throw Error(ErrorCode::kInvalidInput, "range must be [min, max]");
    if (kind == "embedding") {
      SmoothedSurrogate s;
      s.v_bar = std::move(ident);
      s.l_bar = std::move(loss);
      s.thresholds = numbers(j.at("thresholds"));
      s.interpolation = numbers(j.at("interpolation"));
      s.phi = numbers(j.at("phi"));
      s.gamma_min = range[0];
      s.gamma_max = range[1];
      s.lipschitz = j.at("lipschitz").get<double>();
      s.vbar_sup = j.value("vbar_sup", 0.0);
      s.cost = std::move(cost);
      return Surrogate(std::move(s));
    }
    if (kind == "normals") {
      NormalsSurrogate s;
      s.spec.reports = j.at("reports").get<std::vector<std::string>>();
      for (const auto& o : j.at("normals")) s.spec.normals.push_back({numbers(o)});
      s.spec.cost = std::move(cost);
      if (s.spec.reports.size() != s.spec.normals.size() + 1) {
        throw Error(ErrorCode::kInvalidInput, "need one normal between consecutive reports");
      }
      s.v = std::move(ident);
      s.loss = std::move(loss);
      s.thresholds = numbers(j.at("thresholds"));
      s.gamma_min = range[0];
      s.gamma_max = range[1];
      s.lipschitz = j.at("lipschitz").get<double>();
      return Surrogate(std::move(s));
    }
    throw Error(ErrorCode::kInvalidInput, "unknown surrogate kind '" + kind + "'");
  });
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
  out << "x_id,y\n";
  for (const auto& r : data.rows()) out << r.x_id << ',' << r.y << '\n';
}

LabeledDataset read_dataset_csv(std::istream& in, std::size_t outcomes) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kInvalidInput, "empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x_id,y") throw Error(ErrorCode::kInvalidInput, "dataset header must be x_id,y");
  std::vector<LabeledRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kInvalidInput, "line " + std::to_string(lineno) + ": expected x_id,y");
    }
    LabeledRow r;
    r.x_id = line.substr(0, comma);
    try {
      std::size_t used = 0;
      const std::string ytext = line.substr(comma + 1);
      r.y = std::stoi(ytext, &used);
      if (used != ytext.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidInput, "line " + std::to_string(lineno) + ": bad label");
    }
    rows.push_back(std::move(r));
  }
  return LabeledDataset(outcomes, std::move(rows));
}

Json predictor_to_json(const PredictorTable& t) {
  Json preds = Json::object();
  for (const auto& [x, v] : t.values()) {
    std::visit([&](const auto& val) {
      using T = std::decay_t<decltype(val)>;
      if constexpr (std::is_same_v<T, SimplexPoint>) preds[x] = val.vec();
      else preds[x] = val;
    }, v);
  }
  return {{"kind", prediction_kind_name(t.kind())}, {"predictions", preds}};
}

PredictorTable predictor_from_json(const Json& j) {
  return guarded("predictor", [&] {
    PredictorTable t(parse_prediction_kind(j.at("kind").get<std::string>()));
    for (const auto& [x, v] : j.at("predictions").items()) {
      switch (t.kind()) {
        case PredictionKind::kDistribution: t.set(x, SimplexPoint(numbers(v))); break;
        case PredictionKind::kScalar: t.set(x, v.get<double>()); break;
        case PredictionKind::kDiscrete: t.set(x, v.get<int>()); break;
      }
    }
    return t;
  });
}

Json scenario_to_json(const ScenarioSpec& s) {
  Json feats = Json::array();
  for (const auto& f : s.features)
    feats.push_back({{"x_id", f.x_id}, {"weight", f.weight}, {"conditional", f.conditional.vec()}});
  Json pred;
  switch (s.predictor.kind) {
    case RecipeKind::kBayes: pred = {{"type", "bayes"}}; break;
    case RecipeKind::kPerturbed: pred = {{"type", "perturbed"}, {"eta", s.predictor.eta}}; break;
    case RecipeKind::kFixed: pred = {{"type", "fixed"}, {"table", predictor_to_json(s.predictor.table)}}; break;
  }
  return {{"n", s.n}, {"features", feats}, {"predictor", pred}};
}

ScenarioSpec scenario_from_json(const Json& j) {
  return guarded("scenario", [&] {
    ScenarioSpec s;
    s.n = j.at("n").get<std::size_t>();
    for (const auto& f : j.at("features")) {
      s.features.push_back({f.at("x_id").get<std::string>(), f.at("weight").get<double>(),
                            point_from(f.at("conditional"), s.n)});
    }
    if (j.contains("predictor")) {
      const auto& p = j.at("predictor");
      const auto type = p.at("type").get<std::string>();
      if (type == "bayes") {
        s.predictor.kind = RecipeKind::kBayes;
      } else if (type == "perturbed") {
        s.predictor.kind = RecipeKind::kPerturbed;
        s.predictor.eta = p.at("eta").get<double>();
      } else if (type == "fixed") {
        s.predictor.kind = RecipeKind::kFixed;
        const auto& t = p.at("table");
        s.predictor.table = PredictorTable(parse_prediction_kind(t.at("kind").get<std::string>()));
        for (const auto& [x, v] : t.at("predictions").items()) {
          switch (s.predictor.table.kind()) {
            case PredictionKind::kDistribution: s.predictor.table.set(x, point_from(v, s.n)); break;
            case PredictionKind::kScalar: s.predictor.table.set(x, v.get<double>()); break;
            case PredictionKind::kDiscrete: s.predictor.table.set(x, v.get<int>()); break;
          }
        }
      } else {
        throw Error(ErrorCode::kInvalidInput, "unknown predictor type '" + type + "'");
      }
    }
    s.validate();
    return s;
  });
}

namespace {

Json finite_or_tag(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

Json bound_check_to_json(const BoundCheck& b) {
  Json params = Json::object();
  for (const auto& [k, v] : b.params) params[k] = finite_or_tag(v);
  return {{"name", b.name}, {"lhs", finite_or_tag(b.lhs)}, {"rhs", finite_or_tag(b.rhs)},
          {"satisfied", b.satisfied},
          {"params", params}, {"flags", b.flags}};
}

Json audit_report_to_json(const AuditReport& r) {
  Json bounds = Json::array();
  for (const auto& b : r.bounds) bounds.push_back(bound_check_to_json(b));
  Json j{{"notion", r.notion},
         {"norm", norm_name(r.norm)},
         {"epsilon_hat", r.epsilon_hat},
         {"bins", {{"count", r.bins.count}, {"min_size", r.bins.min_size}, {"empty", r.bins.empty}}},
         {"bounds", bounds}};
  if (r.epsilon_plot) j["epsilon_plot"] = *r.epsilon_plot;
  return j;
}

ConstructResult construct_surrogate(const PropertyDefinition& def, std::string_view algo,
                                    std::optional<std::vector<double>> phi_override,
                                    std::optional<double> outer_slope, std::uint64_t seed) {
  if (algo == "normals") {
    NormalsPipelineOptions opts;
    opts.seed = seed;
    opts.refine_samples = 0;
    auto res = run_normals_pipeline(def, opts);
    Json normals = Json::array();
    for (const auto& o : res.recovered) normals.push_back(o.o);
    Json details{{"recovered_normals", normals},
                 {"max_normal_error", res.max_normal_error()},
                 {"boundary_gaps", res.gaps},
                 {"sampling_rounds", res.rounds}};
    return {Surrogate(std::move(res.surrogate)), details};
  }
  if (algo == "embedding") {
    if (!def.cost) {
      throw Error(ErrorCode::kInvalidInput, "the embedding construction needs a cost_matrix spec");
    }
    bool heuristic = false;
    std::vector<double> phi;
    if (phi_override) phi = *phi_override;
    else if (def.phi) phi = *def.phi;
    else {
      phi = default_embedding_points(def.cost->reports());
      heuristic = true;
    }
    const auto slope = outer_slope ? outer_slope : def.outer_slope;
    const auto input = build_envelope_loss(*def.cost, phi, slope);
    auto s = build_surrogate(input);
    Json details{{"phi", s.phi},
                 {"phi_heuristic", heuristic},
                 {"interpolation", s.interpolation},
                 {"vbar_sup", s.vbar_sup}};
    return {Surrogate(std::move(s)), details};
  }
  throw Error(ErrorCode::kInvalidInput, "algorithm must be embedding or normals");
}

Json audit_to_json(const Surrogate& s, const Population& cells, const PredictorTable& pred,
                   const AuditOptions& opts) {
  const PropertyFn prop = property_fn(s);
  DiscretizationOptions dopts;
  dopts.marginal_lipschitz = opts.marginal_lipschitz;
  dopts.norm = opts.norm;
  dopts.binning = opts.binning;

  Json reports = Json::array();
  bool ok = true;
  auto add = [&](const AuditReport& r) {
    ok = ok && r.all_satisfied();
    reports.push_back(audit_report_to_json(r));
  };
  std::optional<PredictorTable> scalar;
  if (pred.kind() == PredictionKind::kDistribution) {
    add(dist_calibration_wrt(pred, cells, prop, opts.norm, opts.binning));
    add(check_postprocessing_bound(pred, cells, prop, s.lipschitz(opts.norm), opts.norm));
    scalar = pred.compose(prop);
    dopts.source = &pred;
  } else if (pred.kind() == PredictionKind::kScalar) {
    scalar = pred;
    add(surrogate_calibration(pred, cells, prop, opts.binning));
  }
  if (scalar) {
    AuditReport d = discrete_calibration(scalar->compose(link_fn(s)), cells, discrete_fn(s));
    d.bounds.push_back(check_discretization_bound(*scalar, cells, s, dopts));
    add(d);
  } else {
    add(discrete_calibration(pred, cells, discrete_fn(s)));
  }
  return {{"reports", reports}, {"all_satisfied", ok}};
}

std::vector<LevelSetRow> level_set_grid(const Surrogate& s, std::size_t resolution) {
  if (s.outcomes() != 3) throw Error(ErrorCode::kInvalidInput, "level-set grids need n = 3");
  if (resolution < 1) throw Error(ErrorCode::kInvalidInput, "resolution must be positive");
  std::vector<LevelSetRow> rows;
  const double r = static_cast<double>(resolution);
  for (std::size_t i = 0; i <= resolution; ++i) {
    for (std::size_t j = 0; i + j <= resolution; ++j) {
      const std::size_t k = resolution - i - j;
      SimplexPoint p({double(i) / r, double(j) / r, double(k) / r});
      rows.push_back({p, s.discrete(p), s.gamma(p)});
    }
  }
  return rows;
}

void write_level_set_csv(std::ostream& out, const std::vector<LevelSetRow>& rows) {
  out << "p1,p2,p3,gamma_discrete,gamma_surrogate\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < 3; ++i) out << format_number(row.p[i]) << ',';
    for (std::size_t i = 0; i < row.discrete.size(); ++i) out << (i ? "|" : "") << row.discrete[i];
    out << ',' << format_number(row.surrogate) << '\n';
  }
}

}  // namespace ordelic
