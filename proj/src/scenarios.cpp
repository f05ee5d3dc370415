#include "weaklab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "weaklab/disturbance.hpp"
#include "weaklab/version.hpp"

namespace weaklab {

namespace {

struct Problems {
  std::vector<ConfigInvalid::Item> items;

  void add(const std::string& path, const std::string& message) {
    items.push_back({path, message});
  }
  void raise_if_any() const {
    if (!items.empty()) {
      throw ConfigInvalid(items);
    }
  }
};

void check_keys(const Json& obj, const std::string& path,
                const std::set<std::string>& allowed, Problems& problems) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      problems.add(path + "." + it.key(), "unknown field");
    }
  }
}

struct ScenarioSchema {
  std::set<std::string> params;
  std::vector<std::string> required;
  bool needs_seed = false;
};

const std::map<std::string, ScenarioSchema>& schemas() {
  static const std::map<std::string, ScenarioSchema> table{
      {"weak-value",
       {{"A_hat", "builder", "instrument", "A_tilde", "O_hat", "B_hat",
         "meter", "state", "effect"},
        {"state", "effect"},
        false}},
      {"sweep-lambda",
       {{"builder", "instrument", "A_hat", "A_tilde", "state", "effect",
         "ladder"},
        {"state", "effect"},
        false}},
      {"model",
       {{"builder", "instrument", "A_hat", "A_tilde", "state", "effect"},
        {},
        false}},
      {"disturbance",
       {{"builder", "instrument", "A_hat", "A_tilde", "samples"}, {}, true}},
      {"minimize",
       {{"dim", "n_outcomes", "target", "values", "box_low", "box_high",
         "optimize_weights", "multi_starts", "max_iterations"},
        {"target"},
        true}},
      {"haar-check", {{"dim", "B", "C", "pairs", "samples"}, {"dim"}, true}},
      {"meter",
       {{"O_hat", "B_hat", "meter", "state", "effect"},
        {"O_hat", "state", "effect"},
        false}},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Parameter materialization

DensityState state_from_json(const Json& j) {
  if (j.is_object() && j.contains("pure")) {
    return DensityState::pure(PureState::normalized(vec_from_json(j["pure"])));
  }
  if (j.is_object() && j.contains("density")) {
    return DensityState(mat_from_json(j["density"]));
  }
  if (j.is_array()) {  // bare amplitude list
    return DensityState::pure(PureState::normalized(vec_from_json(j)));
  }
  throw ConfigInvalid("state", "expected {\"pure\": [...]}, {\"density\": "
                                 "[...]} or an amplitude array");
}

Effect effect_from_json(const Json& j, Eigen::Index dim) {
  if (j.is_string() && j.get<std::string>() == "identity") {
    return Effect::identity(dim);
  }
  if (j.is_object() && j.contains("pure")) {
    return Effect::pure(PureState::normalized(vec_from_json(j["pure"])));
  }
  if (j.is_object() && j.contains("matrix")) {
    return Effect(mat_from_json(j["matrix"]));
  }
  if (j.is_array()) {
    return Effect::pure(PureState::normalized(vec_from_json(j)));
  }
  throw ConfigInvalid("effect", "expected \"identity\", {\"pure\": [...]}, "
                                  "{\"matrix\": [...]} or an amplitude "
                                  "array");
}

MeterSpec meter_from_json(const Json& j) {
  MeterSpec spec;
  if (j.is_null()) {
    return spec;
  }
  Problems problems;
  check_keys(j, "meter", {"sigma", "chirp", "points", "half_width"}, problems);
  problems.raise_if_any();
  if (j.contains("sigma")) {
    spec.sigma = j["sigma"].get<double>();
  }
  if (j.contains("chirp")) {
    spec.chirp = j["chirp"].get<double>();
  }
  if (j.contains("points")) {
    spec.points = j["points"].get<int>();
  }
  if (j.contains("half_width")) {
    spec.half_width = j["half_width"].get<double>();
  }
  return spec;
}

// Everything a weak-value source can resolve to.
struct SourceBundle {
  std::optional<GeneralizedObservable> direct;
  std::optional<QuantumInstrument> instrument;
  std::optional<NullWeakModel> bilinear;
  std::optional<VonNeumannModel> pointer_model;
};

SourceBundle build_from_builder(const std::string& name, const Json& args,
                                const std::string& path) {
  SourceBundle bundle;
  if (name == "qubit_coupling") {
    if (!args.contains("A_hat")) {
      throw ConfigInvalid(path, "qubit_coupling needs A_hat");
    }
    bundle.instrument = build_qubit_model(mat_from_json(args["A_hat"]));
  } else if (name == "classical_embedding") {
    if (!args.contains("A_tilde")) {
      throw ConfigInvalid(path, "classical_embedding needs A_tilde");
    }
    bundle.instrument =
        classical_embedding_instrument(real_mat_from_json(args["A_tilde"]));
  } else if (name == "null_weak") {
    if (!args.contains("O_hat")) {
      throw ConfigInvalid(path, "null_weak needs O_hat");
    }
    bundle.bilinear = null_weak_model(mat_from_json(args["O_hat"]));
  } else if (name == "von_neumann") {
    if (!args.contains("O_hat")) {
      throw ConfigInvalid(path, "von_neumann needs O_hat");
    }
    const Mat o_hat = mat_from_json(args["O_hat"]);
    const Mat b_hat = args.contains("B_hat") ? mat_from_json(args["B_hat"])
                                             : Mat::Zero(o_hat.rows(),
                                                         o_hat.cols());
    bundle.pointer_model = VonNeumannModel(
        o_hat, b_hat,
        meter_from_json(args.contains("meter") ? args["meter"] : Json()));
  } else {
    throw ConfigInvalid(path, "unknown builder '" + name + "'");
  }
  return bundle;
}

// Resolves the measurement source of a scenario. `allow_direct` admits the
// plain A_hat form (weak-value only).
SourceBundle resolve_source(const Json& params, bool allow_direct) {
  const bool has_direct = allow_direct && params.contains("A_hat") &&
                          !params.contains("builder");
  const bool has_builder = params.contains("builder");
  const bool has_instrument = params.contains("instrument");

  if (allow_direct && params.contains("A_hat") && has_builder) {
    throw ConfigInvalid("params", "both A_hat and builder given; ambiguous source");
  }
  const int sources = static_cast<int>(has_direct) +
                      static_cast<int>(has_builder) +
                      static_cast<int>(has_instrument);
  if (sources == 0) {
    throw ConfigInvalid("params", "no measurement source given");
  }
  if (sources > 1) {
    throw ConfigInvalid("params", "more than one measurement source given; "
                                    "ambiguous");
  }

  if (has_direct) {
    SourceBundle bundle;
    bundle.direct = GeneralizedObservable(mat_from_json(params["A_hat"]));
    return bundle;
  }
  if (has_builder) {
    return build_from_builder(params["builder"].get<std::string>(), params,
                              "params.builder");
  }
  const Json& inst = params["instrument"];
  if (inst.is_object() && inst.contains("builder")) {
    return build_from_builder(inst["builder"].get<std::string>(), inst,
                              "params.instrument.builder");
  }
  SourceBundle bundle;
  bundle.instrument = quantum_instrument_from_json(inst);
  return bundle;
}

LambdaLadder ladder_from_json(const Json& j) {
  LambdaLadder ladder;
  if (j.is_null()) {
    return ladder;
  }
  Problems problems;
  check_keys(j, "ladder", {"top", "count", "ratio"}, problems);
  problems.raise_if_any();
  if (j.contains("top")) {
    ladder.top = j["top"].get<double>();
  }
  if (j.contains("count")) {
    ladder.count = j["count"].get<int>();
  }
  if (j.contains("ratio")) {
    ladder.ratio = j["ratio"].get<double>();
  }
  return ladder;
}

Json value_with_provenance(double value, const char* provenance) {
  return Json{{"value", value}, {"provenance", provenance}};
}

// ---------------------------------------------------------------------------
// Scenario runners

Report run_weak_value(const ScenarioConfig& cfg) {
  const SourceBundle source = resolve_source(cfg.params, true);
  const DensityState s = state_from_json(cfg.params.at("state"));
  const Effect effect = effect_from_json(cfg.params.at("effect"), s.dim());

  Json results;
  if (source.direct) {
    results["weak_value"] = value_with_provenance(
        weak_value(*source.direct, s, effect), "formula");
  } else if (source.bilinear) {
    results["weak_value"] = value_with_provenance(
        general_bilinear_weak_value(*source.bilinear, s, effect), "formula");
  } else if (source.pointer_model) {
    const VonNeumannModel& model = *source.pointer_model;
    results["weak_value"] =
        value_with_provenance(weak_value(model.observable(), s, effect),
                              "formula");
    results["conditioned_meter_mean"] = value_with_provenance(
        model.conditioned_meter_mean(s, effect), "grid");
    results["sigma"] = model.sigma();
  } else {
    const QuantumInstrument& inst = *source.instrument;
    double formula = 0.0;
    if (inst.has_series()) {
      formula = weak_value(extract_generalized_observable(inst).observable, s,
                           effect);
    } else {
      // √λ families evaluate through the signed bilinear form, folding the
      // contextual magnitude into the operators.
      NullWeakModel signed_terms;
      for (int m = 0; m < inst.n_outcomes(); ++m) {
        const double value = inst.contextual_value(m);
        for (const KrausSeries& ks : inst.outcomes()[m].kraus) {
          signed_terms.terms.push_back(
              {std::sqrt(std::abs(value)) * ks.first_order,
               value >= 0.0 ? +1 : -1});
        }
      }
      formula = general_bilinear_weak_value(signed_terms, s, effect);
    }
    const WeakLimit limit = numeric_weak_limit(inst, s, effect);
    results["weak_value"] = value_with_provenance(formula, "formula");
    results["weak_limit"] = Json{{"value", limit.value},
                                 {"error_estimate", limit.error_estimate},
                                 {"provenance", "extrapolation"}};
    results["agreement"] =
        std::abs(limit.value - formula) <=
        std::max(limit.error_estimate * 10.0, 1e-6);
  }

  Report report;
  report.body = Json{{"results", std::move(results)}};
  return report;
}

Report run_sweep_lambda(const ScenarioConfig& cfg) {
  const SourceBundle source = resolve_source(cfg.params, false);
  if (!source.instrument) {
    throw ConfigInvalid("params", "sweep-lambda needs an instrument source");
  }
  const QuantumInstrument& inst = *source.instrument;
  const DensityState s = state_from_json(cfg.params.at("state"));
  const Effect effect = effect_from_json(cfg.params.at("effect"), s.dim());
  const LambdaLadder ladder = ladder_from_json(
      cfg.params.contains("ladder") ? cfg.params["ladder"] : Json());

  CsvTable table;
  table.header = {"lambda", "conditional_expectation", "value_over_lambda"};
  Json rows = Json::array();
  for (double lambda : ladder.values()) {
    if (lambda > inst.lambda_max()) {
      continue;
    }
    const double expectation = postselected_expectation(inst, s, effect,
                                                        lambda);
    table.rows.push_back({lambda, expectation, expectation / lambda});
    rows.push_back(Json{{"lambda", lambda},
                        {"conditional_expectation", expectation},
                        {"value_over_lambda", expectation / lambda}});
  }

  Report report;
  report.body = Json{{"results", Json{{"rows", std::move(rows)}}}};
  report.table = std::move(table);
  return report;
}

Report run_model(const ScenarioConfig& cfg) {
  const SourceBundle source = resolve_source(cfg.params, false);
  if (!source.instrument) {
    throw ConfigInvalid("params", "model needs an instrument source");
  }
  const QuantumInstrument& inst = *source.instrument;

  Json results;
  results["dim"] = inst.dim();
  results["mode"] = inst.mode() == InstrumentMode::SqrtLambda ? "sqrt-lambda"
                    : inst.mode() == InstrumentMode::Exact    ? "exact"
                                                              : "series";
  results["zero_coupling_probs"] = to_json(inst.zero_coupling_probs());
  results["contextual_shift"] = inst.contextual_shift();

  if (inst.has_series()) {
    const ObservableExtraction extraction =
        extract_generalized_observable(inst);
    results["A_hat"] = to_json(extraction.observable.canonical());
    const Mat drift = drift_operator(inst);
    results["drift"] = to_json(drift);
    results["drift_norm"] = max_abs(drift);
    const auto witness = strong_sense_witness(inst);
    if (witness) {
      results["strong_sense_witness"] =
          Json{{"outcome", witness->outcome},
               {"state", to_json(witness->state.amplitudes())},
               {"slope", witness->slope}};
    } else {
      results["strong_sense_witness"] = nullptr;
    }
    const double lambda = std::min(1e-2, inst.lambda_max());
    Mat completeness = Mat::Zero(inst.dim(), inst.dim());
    for (const auto& outcome_kraus : inst.evaluate(lambda)) {
      for (const Mat& k : outcome_kraus) {
        completeness += k.adjoint() * k;
      }
    }
    results["completeness_residual"] = max_abs(
        completeness - Mat::Identity(inst.dim(), inst.dim()));
    if (cfg.params.contains("state") && cfg.params.contains("effect")) {
      const DensityState s = state_from_json(cfg.params["state"]);
      const Effect effect = effect_from_json(cfg.params["effect"], s.dim());
      results["postselection_shift"] = value_with_provenance(
          postselection_shift(inst, s, effect), "formula");
    }
  }

  Report report;
  report.body = Json{{"results", std::move(results)}};
  return report;
}

Report run_disturbance(const ScenarioConfig& cfg) {
  const SourceBundle source = resolve_source(cfg.params, false);
  if (!source.instrument) {
    throw ConfigInvalid("params", "disturbance needs an instrument "
                                    "source");
  }
  const QuantumInstrument& inst = *source.instrument;
  const int samples = cfg.params.contains("samples")
                          ? cfg.params["samples"].get<int>()
                          : 200000;
  const DisturbanceReport rep = script_f(inst, *cfg.seed, samples);

  Json results;
  results["f_script"] = value_with_provenance(rep.f_script, "formula");
  results["f_script_split"] =
      value_with_provenance(rep.f_script_split, "formula");
  results["f_script_mc"] = Json{{"value", rep.f_script_mc},
                                {"std_error", rep.mc_std_error},
                                {"samples", rep.mc_samples},
                                {"provenance", "monte-carlo"}};
  results["split_agrees"] =
      std::abs(rep.f_script - rep.f_script_split) <= 1e-12 *
          std::max(1.0, std::abs(rep.f_script));
  results["mc_agrees_5_sigma"] =
      std::abs(rep.f_script_mc - rep.f_script) <= 5.0 * rep.mc_std_error;

  Report report;
  report.body = Json{{"results", std::move(results)}};
  return report;
}

Report run_minimize(const ScenarioConfig& cfg) {
  MinimizationProblem prob;
  prob.target = mat_from_json(cfg.params.at("target"));
  prob.dim = prob.target.rows();
  if (cfg.params.contains("dim")) {
    prob.dim = cfg.params["dim"].get<Eigen::Index>();
  }
  prob.n_outcomes = cfg.params.contains("n_outcomes")
                        ? cfg.params["n_outcomes"].get<int>()
                        : 2;
  if (cfg.params.contains("values")) {
    prob.fixed_values = real_vec_from_json(cfg.params["values"]);
  }
  if (cfg.params.contains("box_low")) {
    prob.value_box_low = real_vec_from_json(cfg.params["box_low"]);
  }
  if (cfg.params.contains("box_high")) {
    prob.value_box_high = real_vec_from_json(cfg.params["box_high"]);
  }
  if (cfg.params.contains("optimize_weights")) {
    prob.optimize_weights = cfg.params["optimize_weights"].get<bool>();
  }
  if (cfg.params.contains("multi_starts")) {
    prob.multi_starts = cfg.params["multi_starts"].get<int>();
  }
  if (cfg.params.contains("max_iterations")) {
    prob.max_iterations = cfg.params["max_iterations"].get<int>();
  }
  if (!prob.fixed_values && !prob.value_box_low) {
    prob.fixed_values = RealVec(prob.n_outcomes);
    for (int m = 0; m < prob.n_outcomes; ++m) {
      (*prob.fixed_values)(m) = m % 2 == 0 ? 1.0 : -1.0;
    }
  }
  prob.seed = *cfg.seed;

  const MinimizationResult result = minimize_disturbance(prob);
  const double baseline = 0.25 * f_functional(prob.target);

  Json results;
  results["f_script"] = value_with_provenance(result.f_script, "optimizer");
  results["baseline_qubit_model"] = value_with_provenance(baseline, "formula");
  results["certificate_gap"] = result.certificate_gap;
  results["values"] = to_json(result.values);
  results["weights"] = to_json(result.weights);
  results["iterations"] = result.iterations;
  results["instrument"] = to_json(result.instrument);

  CsvTable table;
  table.header = {"d", "N", "f_script", "bound", "gap", "iterations"};
  table.rows.push_back({static_cast<double>(prob.dim),
                        static_cast<double>(prob.n_outcomes), result.f_script,
                        baseline, result.certificate_gap,
                        static_cast<double>(result.iterations)});

  Report report;
  report.body = Json{{"results", std::move(results)}};
  report.table = std::move(table);
  return report;
}

Report run_haar_check(const ScenarioConfig& cfg) {
  const Eigen::Index dim = cfg.params.at("dim").get<Eigen::Index>();
  const int samples = cfg.params.contains("samples")
                          ? cfg.params["samples"].get<int>()
                          : 200000;
  Rng rng(*cfg.seed);

  std::vector<std::pair<Mat, Mat>> pairs;
  if (cfg.params.contains("B") || cfg.params.contains("C")) {
    if (!cfg.params.contains("B") || !cfg.params.contains("C")) {
      throw ConfigInvalid("params", "haar-check needs both B and C");
    }
    pairs.emplace_back(mat_from_json(cfg.params["B"]),
                       mat_from_json(cfg.params["C"]));
  } else {
    const int n_pairs =
        cfg.params.contains("pairs") ? cfg.params["pairs"].get<int>() : 1;
    for (int i = 0; i < n_pairs; ++i) {
      pairs.emplace_back(random_hermitian(dim, rng),
                         random_hermitian(dim, rng));
    }
  }

  const double dd = static_cast<double>(dim);
  Json rows = Json::array();
  CsvTable table;
  table.header = {"pair", "analytic", "estimate", "std_error", "z"};
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Mat& b = pairs[p].first;
    const Mat& c = pairs[p].second;
    const double analytic =
        ((b * c).trace().real() + b.trace().real() * c.trace().real()) /
        (dd * (dd + 1.0));
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < samples; ++i) {
      const PureState psi = haar_random_pure(dim, rng);
      const Vec& v = psi.amplitudes();
      const double value = (v.adjoint() * b * v)(0).real() *
                           (v.adjoint() * c * v)(0).real();
      const double delta = value - mean;
      mean += delta / (i + 1);
      m2 += delta * (value - mean);
    }
    const double std_error =
        std::sqrt((samples > 1 ? m2 / (samples - 1) : 0.0) / samples);
    const double z = std_error > 0.0 ? (mean - analytic) / std_error : 0.0;
    rows.push_back(Json{{"analytic", analytic},
                        {"estimate", mean},
                        {"std_error", std_error},
                        {"z", z},
                        {"provenance", "monte-carlo"}});
    table.rows.push_back(
        {static_cast<double>(p), analytic, mean, std_error, z});
  }

  Report report;
  report.body =
      Json{{"results", Json{{"pairs", std::move(rows)},
                            {"samples", samples}}}};
  report.table = std::move(table);
  return report;
}

Report run_meter(const ScenarioConfig& cfg) {
  const Mat o_hat = mat_from_json(cfg.params.at("O_hat"));
  const Mat b_hat = cfg.params.contains("B_hat")
                        ? mat_from_json(cfg.params["B_hat"])
                        : Mat(Mat::Zero(o_hat.rows(), o_hat.cols()));
  const VonNeumannModel model(
      o_hat, b_hat,
      meter_from_json(cfg.params.contains("meter") ? cfg.params["meter"]
                                                   : Json()));
  const DensityState s = state_from_json(cfg.params.at("state"));
  const Effect effect = effect_from_json(cfg.params.at("effect"), s.dim());

  const VonNeumannModel::MeterDistribution dist =
      model.meter_distribution(s, effect);

  CsvTable table;
  table.header = {"x", "P_i", "P_f", "residual"};
  for (Eigen::Index i = 0; i < dist.x.size(); ++i) {
    table.rows.push_back(
        {dist.x(i), dist.initial(i), dist.postselected(i), dist.residual(i)});
  }

  Json results;
  results["weak_value_O"] = to_json(dist.weak_value_o);
  results["weak_value_B"] = to_json(dist.weak_value_b);
  results["xp_anticommutator"] = model.meter_xp_anticommutator();
  results["p_squared"] = model.meter_p_squared();
  results["residual_max"] = dist.residual.cwiseAbs().maxCoeff();
  results["residual_l1"] = dist.residual.cwiseAbs().sum() * model.grid_step();
  results["unconditioned_mean"] =
      value_with_provenance(model.unconditioned_meter_mean(s), "grid");
  results["conditioned_mean"] =
      value_with_provenance(model.conditioned_meter_mean(s, effect), "grid");

  Report report;
  report.body = Json{{"results", std::move(results)}};
  report.table = std::move(table);
  return report;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{
      "weak-value", "sweep-lambda", "model",     "disturbance",
      "minimize",   "haar-check",   "meter"};
  return names;
}

ScenarioConfig parse_config(const std::string& text,
                            const std::string& forced_scenario,
                            std::optional<std::uint64_t> seed_override) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw ConfigInvalid("", std::string("not valid JSON: ") + err.what());
  }

  Problems problems;
  if (!doc.is_object()) {
    problems.add("", "config must be a JSON object");
    problems.raise_if_any();
  }
  check_keys(doc, "", {"scenario", "params", "seed", "output"}, problems);

  ScenarioConfig cfg;
  if (doc.contains("scenario")) {
    if (!doc["scenario"].is_string()) {
      problems.add("scenario", "must be a string");
    } else {
      cfg.scenario = doc["scenario"].get<std::string>();
    }
  }
  if (!forced_scenario.empty()) {
    if (!cfg.scenario.empty() && cfg.scenario != forced_scenario) {
      problems.add("scenario", "config says '" + cfg.scenario +
                                   "' but the subcommand is '" +
                                   forced_scenario + "'");
    }
    cfg.scenario = forced_scenario;
  }
  if (cfg.scenario.empty()) {
    problems.add("scenario", "missing");
  } else if (!schemas().count(cfg.scenario)) {
    problems.add("scenario", "unknown scenario '" + cfg.scenario + "'");
  }

  if (doc.contains("params")) {
    if (!doc["params"].is_object()) {
      problems.add("params", "must be an object");
    } else {
      cfg.params = doc["params"];
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      problems.add("seed", "must be a non-negative integer");
    } else {
      const auto value = doc["seed"].get<std::int64_t>();
      if (value < 0) {
        problems.add("seed", "must be non-negative");
      } else {
        cfg.seed = static_cast<std::uint64_t>(value);
      }
    }
  }
  if (seed_override) {
    cfg.seed = seed_override;
  }
  if (doc.contains("output")) {
    const Json& output = doc["output"];
    if (!output.is_object()) {
      problems.add("output", "must be an object");
    } else {
      check_keys(output, "output", {"path", "format"}, problems);
      if (output.contains("path")) {
        cfg.out_path = output["path"].get<std::string>();
      }
      if (output.contains("format")) {
        const std::string format = output["format"].get<std::string>();
        if (format != "json" && format != "csv") {
          problems.add("output.format", "must be 'json' or 'csv'");
        } else {
          cfg.format = format;
        }
      }
    }
  }

  if (schemas().count(cfg.scenario)) {
    const ScenarioSchema& schema = schemas().at(cfg.scenario);
    check_keys(cfg.params, "params", schema.params, problems);
    for (const std::string& key : schema.required) {
      if (!cfg.params.contains(key)) {
        problems.add("params." + key, "missing");
      }
    }
    if (schema.needs_seed && !cfg.seed) {
      problems.add("seed", "required for the stochastic scenario '" +
                               cfg.scenario + "'");
    }
  }

  problems.raise_if_any();
  return cfg;
}

Report run_scenario(const ScenarioConfig& cfg) {
  Report report;
  if (cfg.scenario == "weak-value") {
    report = run_weak_value(cfg);
  } else if (cfg.scenario == "sweep-lambda") {
    report = run_sweep_lambda(cfg);
  } else if (cfg.scenario == "model") {
    report = run_model(cfg);
  } else if (cfg.scenario == "disturbance") {
    report = run_disturbance(cfg);
  } else if (cfg.scenario == "minimize") {
    report = run_minimize(cfg);
  } else if (cfg.scenario == "haar-check") {
    report = run_haar_check(cfg);
  } else if (cfg.scenario == "meter") {
    report = run_meter(cfg);
  } else {
    throw ConfigInvalid("scenario", "unknown scenario");
  }

  Json echo = Json{{"scenario", cfg.scenario}, {"params", cfg.params}};
  if (cfg.seed) {
    echo["seed"] = *cfg.seed;
    report.body["seed"] = *cfg.seed;
  }
  report.body["scenario"] = cfg.scenario;
  report.body["config"] = std::move(echo);
  report.body["version"] = kVersion;
  report.body["tolerances"] =
      Json{{"hermitian", tol::hermitian},
           {"completeness", tol::completeness},
           {"state_norm", tol::state_norm},
           {"overlap_floor", tol::overlap_floor}};
  return report;
}

std::string render_report(const Report& report, const std::string& format) {
  if (format == "csv") {
    if (!report.table) {
      throw ConfigInvalid("output.format", "this scenario has no CSV table");
    }
    return render_csv(*report.table);
  }
  return stable_json(report.body);
}

Json describe_scenario(const std::string& scenario) {
  if (!schemas().count(scenario)) {
    throw ConfigInvalid("scenario", "unknown scenario '" + scenario + "'");
  }
  const ScenarioSchema& schema = schemas().at(scenario);
  Json fields = Json::array();
  for (const std::string& key : schema.params) {
    fields.push_back(key);
  }
  Json required = Json::array();
  for (const std::string& key : schema.required) {
    required.push_back(key);
  }
  return Json{{"scenario", scenario},
              {"params", std::move(fields)},
              {"required", std::move(required)},
              {"seed", schema.needs_seed ? "required" : "optional"},
              {"top_level", Json::array({"scenario", "params", "seed",
                                         "output"})},
              {"output_formats",
               Json::array({"json", "csv"})}};
}

}  // namespace weaklab
