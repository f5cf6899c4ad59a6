#include "ordelic/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ordelic/io.hpp"

namespace ordelic {

namespace {

struct RunConfig {
  std::string spec;
  std::string algo = "normals";
  std::string phi;
  std::optional<double> outer_slope;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::string norm = "l2";
  std::optional<double> bin_width;
  std::size_t resolution = 200;
  std::string out;
  // subcommand-specific inputs
  std::string surrogate;
  std::string scenario;
  std::string data;
  std::string predictor;
  std::string predictor_out;
  std::optional<double> constant;
  std::optional<double> marginal_lipschitz;
};

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("ORDELIC_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kInvalidInput, "ORDELIC_SEED is not an unsigned integer");
  }
  throw Error(ErrorCode::kInvalidInput, "a seed is required (--seed or ORDELIC_SEED)");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidInput, "bad number '" + item + "' in list");
    }
  }
  return out;
}

Json config_json(const std::string& command, const RunConfig& cfg,
                 std::optional<std::uint64_t> seed) {
  Json j{{"subcommand", command}};
  if (!cfg.spec.empty()) j["spec"] = cfg.spec;
  if (!cfg.surrogate.empty()) j["surrogate"] = cfg.surrogate;
  if (!cfg.scenario.empty()) j["scenario"] = cfg.scenario;
  if (!cfg.data.empty()) j["data"] = cfg.data;
  if (!cfg.predictor.empty()) j["predictor"] = cfg.predictor;
  if (!cfg.spec.empty()) j["algo"] = cfg.algo;
  if (!cfg.phi.empty()) j["phi"] = parse_list(cfg.phi);
  if (cfg.outer_slope) j["outer_slope"] = *cfg.outer_slope;
  if (seed) j["seed"] = *seed;
  if (cfg.samples) j["samples"] = *cfg.samples;
  j["norm"] = norm_name(parse_norm(cfg.norm));
  if (cfg.bin_width) j["bin_width"] = *cfg.bin_width;
  if (cfg.constant) j["constant"] = *cfg.constant;
  if (cfg.marginal_lipschitz) j["marginal_lipschitz"] = *cfg.marginal_lipschitz;
  return j;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ConstructResult build_from_spec(const RunConfig& cfg, std::uint64_t seed) {
  std::optional<std::vector<double>> phi;
  if (!cfg.phi.empty()) phi = parse_list(cfg.phi);
  return construct_surrogate(property_from_json(read_json_file(cfg.spec)), cfg.algo, phi,
                             cfg.outer_slope, seed);
}

Surrogate load_or_build(const RunConfig& cfg, std::optional<std::uint64_t>& seed) {
  if (!cfg.surrogate.empty()) return surrogate_from_json(read_json_file(cfg.surrogate));
  if (cfg.spec.empty()) throw Error(ErrorCode::kInvalidInput, "need --surrogate or --spec");
  seed = resolve_seed(cfg);
  return build_from_spec(cfg, *seed).surrogate;
}

int cmd_construct(const RunConfig& cfg) {
  if (cfg.spec.empty()) throw Error(ErrorCode::kInvalidInput, "--spec is required");
  const auto seed = resolve_seed(cfg);
  ConstructResult b = build_from_spec(cfg, seed);
  const auto check =
      refinement_check(b.surrogate, cfg.samples.value_or(10000), derive_seed(seed, "refine"));
  Json report{{"config", config_json("construct", cfg, seed)},
              {"kind", b.surrogate.kind()},
              {"thresholds", b.surrogate.thresholds()},
              {"range", {b.surrogate.gamma_min(), b.surrogate.gamma_max()}},
              {"lipschitz",
               {{"l1", b.surrogate.lipschitz(NormKind::kL1)},
                {"l2", b.surrogate.lipschitz(NormKind::kL2)},
                {"linf", b.surrogate.lipschitz(NormKind::kLinf)}}},
              {"refinement",
               {{"checked", check.checked}, {"passed", check.passed}, {"pass_rate", check.pass_rate()}}}};
  for (auto& [k, v] : b.details.items()) report[k] = v;
  emit(cfg.out, dump(surrogate_to_json(b.surrogate)));
  // the report goes to stdout unless stdout already carries the surrogate
  (cfg.out.empty() || cfg.out == "-" ? std::cerr : std::cout) << dump(report);
  return check.passed == check.checked ? kExitOk : kExitBoundViolation;
}

int cmd_levelsets(const RunConfig& cfg) {
  std::optional<std::uint64_t> seed;
  const Surrogate s = load_or_build(cfg, seed);
  std::ostringstream out;
  write_level_set_csv(out, level_set_grid(s, cfg.resolution));
  emit(cfg.out, out.str());
  return kExitOk;
}

std::string default_predictor_path(const std::string& out) {
  if (out.empty() || out == "-") return "predictor.json";
  std::filesystem::path p(out);
  p.replace_extension(".predictor.json");
  return p.string();
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.scenario.empty()) throw Error(ErrorCode::kInvalidInput, "--scenario is required");
  const auto seed = resolve_seed(cfg);
  const ScenarioSpec sc = scenario_from_json(read_json_file(cfg.scenario));
  const auto data = simulate_dataset(sc, cfg.samples.value_or(10000), seed);
  const auto pred = materialize_predictor(sc, seed);
  std::ostringstream csv;
  write_dataset_csv(csv, data);
  emit(cfg.out, csv.str());
  Json pj = predictor_to_json(pred);
  pj["config"] = config_json("simulate", cfg, seed);
  write_text_file(cfg.predictor_out.empty() ? default_predictor_path(cfg.out) : cfg.predictor_out,
                  dump(pj));
  return kExitOk;
}

int cmd_audit(const RunConfig& cfg) {
  std::optional<std::uint64_t> seed;
  const Surrogate s = load_or_build(cfg, seed);
  const NormKind norm = parse_norm(cfg.norm);
  Binning binning{cfg.bin_width};
  if (cfg.bin_width && !(*cfg.bin_width > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "--bin-width must be positive");
  }

  Population cells;
  std::optional<ScenarioSpec> sc;
  if (!cfg.scenario.empty()) sc = scenario_from_json(read_json_file(cfg.scenario));
  if (!cfg.data.empty()) {
    std::ifstream in(cfg.data);
    if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + cfg.data);
    cells = cells_from_dataset(read_dataset_csv(in, s.outcomes()));
  } else if (sc) {
    cells = sc->population();
  } else {
    throw Error(ErrorCode::kInvalidInput, "need --data or --scenario");
  }
  for (const auto& c : cells)
    if (c.conditional.size() != s.outcomes()) {
      throw Error(ErrorCode::kDimensionMismatch, "data and surrogate disagree on outcomes");
    }

  PredictorTable pred;
  if (!cfg.predictor.empty()) {
    pred = predictor_from_json(read_json_file(cfg.predictor));
  } else if (sc) {
    if (!seed) seed = resolve_seed(cfg);
    pred = materialize_predictor(*sc, *seed);
  } else {
    throw Error(ErrorCode::kInvalidInput, "need --predictor or a scenario recipe");
  }

  AuditOptions opts;
  opts.norm = norm;
  opts.binning = binning;
  opts.marginal_lipschitz = cfg.marginal_lipschitz;
  const Json result = audit_to_json(s, cells, pred, opts);
  const bool ok = result.at("all_satisfied").get<bool>();
  Json out{{"config", config_json("audit", cfg, seed)},
           {"reports", result.at("reports")},
           {"all_satisfied", ok}};
  emit(cfg.out, dump(out));
  return ok ? kExitOk : kExitBoundViolation;
}

int cmd_counterexample(const RunConfig& cfg) {
  if (!cfg.constant) throw Error(ErrorCode::kInvalidInput, "--constant is required");
  std::optional<std::uint64_t> seed;
  const Surrogate s = load_or_build(cfg, seed);
  if (!seed) seed = resolve_seed(cfg);
  const NormKind norm = parse_norm(cfg.norm);
  const auto cx = counterexample_gap(property_fn(s), s.outcomes(), *cfg.constant, norm,
                                     cfg.samples.value_or(20000), derive_seed(*seed, "counterexample"));
  Json report{{"config", config_json("counterexample", cfg, seed)},
              {"found", cx.found},
              {"best_ratio", cx.pair.ratio},
              {"p", cx.pair.p.vec()},
              {"q", cx.pair.q.vec()},
              {"audits", {audit_report_to_json(cx.distribution), audit_report_to_json(cx.surrogate)}}};
  if (!cx.found) {
    std::cerr << "no pair with ratio above " << *cfg.constant << " (best " << cx.pair.ratio
              << ")\n";
    emit(cfg.out.empty() ? "" : cfg.out + ".report.json", dump(report));
    return kExitSearchFailure;
  }
  ScenarioSpec sc;
  sc.n = s.outcomes();
  sc.features = {{"x", 1.0, cx.pair.q}};
  sc.predictor.kind = RecipeKind::kFixed;
  sc.predictor.table = cx.predictor;
  if (cfg.out.empty()) {
    report["scenario"] = scenario_to_json(sc);
    std::cout << dump(report);
  } else {
    write_text_file(cfg.out + ".scenario.json", dump(scenario_to_json(sc)));
    write_text_file(cfg.out + ".predictor.json", dump(predictor_to_json(cx.predictor)));
    write_text_file(cfg.out + ".report.json", dump(report));
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Lipschitz surrogates for orderable discrete properties, and calibration audits"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "root seed (falls back to ORDELIC_SEED)");
    sub->add_option("--out", cfg.out, "output path (stdout when omitted)");
  };
  auto source = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec, "property-spec JSON");
    sub->add_option("--algo", cfg.algo, "construction: embedding or normals")
        ->check(CLI::IsMember({"embedding", "normals"}));
    sub->add_option("--phi", cfg.phi, "embedding points, comma separated");
    sub->add_option("--outer-slope", cfg.outer_slope, "slope of the envelope extensions");
  };
  auto norm_opt = [&](CLI::App* sub) {
    sub->add_option("--norm", cfg.norm, "distribution norm")
        ->check(CLI::IsMember({"l1", "l2", "linf"}));
  };

  auto* construct = app.add_subcommand("construct", "build a surrogate from a property spec");
  common(construct);
  source(construct);
  norm_opt(construct);
  construct->add_option("--samples", cfg.samples, "refinement check samples");

  auto* levelsets = app.add_subcommand("levelsets", "emit the barycentric level-set grid (n = 3)");
  common(levelsets);
  source(levelsets);
  levelsets->add_option("--surrogate", cfg.surrogate, "surrogate JSON from construct");
  levelsets->add_option("--resolution", cfg.resolution, "grid resolution");

  auto* simulate = app.add_subcommand("simulate", "sample a dataset and predictor from a scenario");
  common(simulate);
  simulate->add_option("--scenario", cfg.scenario, "scenario JSON")->required();
  simulate->add_option("--samples", cfg.samples, "rows to draw");
  simulate->add_option("--predictor-out", cfg.predictor_out, "predictor JSON path");

  auto* audit = app.add_subcommand("audit", "calibration audit with bound checks");
  common(audit);
  source(audit);
  norm_opt(audit);
  audit->add_option("--surrogate", cfg.surrogate, "surrogate JSON from construct");
  audit->add_option("--data", cfg.data, "dataset CSV (x_id,y)");
  audit->add_option("--scenario", cfg.scenario, "scenario JSON (exact population)");
  audit->add_option("--predictor", cfg.predictor, "predictor JSON");
  audit->add_option("--bin-width", cfg.bin_width, "uniform bin width for scalar predictions");
  audit->add_option("--marginal-lipschitz", cfg.marginal_lipschitz,
                    "Lipschitz constant of u -> D(Y | g = u); estimated when omitted");

  auto* counter = app.add_subcommand("counterexample", "instance with a Lipschitz calibration gap");
  common(counter);
  source(counter);
  norm_opt(counter);
  counter->add_option("--surrogate", cfg.surrogate, "surrogate JSON from construct");
  counter->add_option("--constant", cfg.constant, "target constant C")->required();
  counter->add_option("--samples", cfg.samples, "search budget (random pairs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*construct) return cmd_construct(cfg);
    if (*levelsets) return cmd_levelsets(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*audit) return cmd_audit(cfg);
    if (*counter) return cmd_counterexample(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kSearchFailed ? kExitSearchFailure : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace ordelic
