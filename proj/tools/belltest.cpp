// belltest: prediction, analysis, drift normalization, simulation and
// reference validation for Eberhard-type coincidence experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bell/data_io.hpp"
#include "bell/drift_norm.hpp"
#include "bell/event_sim.hpp"
#include "bell/fixtures.hpp"
#include "bell/validation.hpp"

namespace {

using namespace bell;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct ConfigFlags {
  std::string configFile;
  std::optional<double> r, V, etaA, etaB, r0, t, zeta, tauC;
  std::vector<double> angles;

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (configFile.empty()) {
      cfg = reference_config();
    } else {
      std::ifstream in(configFile);
      if (!in) throw ValidationError(configFile, "cannot open config file");
      std::stringstream buffer;
      buffer << in.rdbuf();
      cfg = config_from_json(buffer.str());
    }
    if (r) cfg.state.r = *r;
    if (V) cfg.state.V = *V;
    if (etaA) cfg.etaA = *etaA;
    if (etaB) cfg.etaB = *etaB;
    if (r0) cfg.r0 = *r0;
    if (t) cfg.t = *t;
    if (zeta) cfg.zeta = *zeta;
    if (tauC) cfg.tauC = *tauC;
    if (!angles.empty()) {
      cfg.alpha1 = MeasurementAngle{angles[0]};
      cfg.alpha2 = MeasurementAngle{angles[1]};
      cfg.beta1 = MeasurementAngle{angles[2]};
      cfg.beta2 = MeasurementAngle{angles[3]};
    }
    cfg.validate();
    return cfg;
  }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.configFile,
                  "experiment parameters as JSON (defaults to the reference "
                  "experiment)");
  cmd->add_option("--r", flags.r, "state amplitude ratio r");
  cmd->add_option("--V", flags.V, "coherence visibility V");
  cmd->add_option("--eta-a", flags.etaA, "Alice arm efficiency");
  cmd->add_option("--eta-b", flags.etaB, "Bob arm efficiency");
  cmd->add_option("--r0", flags.r0, "pair production rate per second");
  cmd->add_option("--t", flags.t, "seconds per setting combination");
  cmd->add_option("--zeta,--dark", flags.zeta,
                  "dark/background events per second and party");
  cmd->add_option("--tau-c", flags.tauC, "coincidence window in seconds");
  cmd->add_option("--angles", flags.angles,
                  "alpha1,alpha2,beta1,beta2 in degrees")
      ->delimiter(',')
      ->expected(0, 4);
}

int emit(const std::vector<ReportRow>& rows, bool json) {
  if (json)
    std::cout << rows_to_json(rows) << '\n';
  else
    std::cout << render_rows(rows);
  return kExitOk;
}

NormalizationPath parse_path(const std::string& text) {
  if (text.empty()) return NormalizationPath::standard();
  // e.g. "a1b1-a1b2:A,a1b2-a2b2:B,a2b2-a2b1:A"
  std::vector<PathLink> links;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    const auto colon = item.find(':');
    if (dash == std::string::npos || colon == std::string::npos ||
        colon < dash)
      throw std::invalid_argument("bad path link '" + item +
                                  "', expected from-to:party");
    links.push_back({combo_from_label(item.substr(0, dash)),
                     combo_from_label(item.substr(dash + 1, colon - dash - 1)),
                     party_from_char(item.at(colon + 1))});
  }
  return NormalizationPath(std::move(links));
}

BaselinePolicy parse_baseline(const std::string& text) {
  if (text.empty() || text == "smallest") return BaselinePolicy::smallest_f();
  return BaselinePolicy::fixed(combo_from_label(text));
}

IntensityProfile parse_profile(const std::string& text) {
  IntensityProfile profile;
  if (text.empty()) return profile;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq != 3 || item[0] != 'g')
      throw std::invalid_argument("bad profile entry '" + item +
                                  "', expected gIJ=value");
    const int ai = item[1] - '0';
    const int bi = item[2] - '0';
    const SettingCombo combo = combo_from_indices(ai, bi);
    profile.g[static_cast<std::size_t>(sequence_position(combo))] =
        std::stod(item.substr(eq + 1));
  }
  profile.validate();
  return profile;
}

LhvStrategy parse_lhv(const std::string& text, IntensityProfile profile) {
  if (text == "always-pass") return LhvStrategy::always_pass(profile);
  std::ifstream in(text);
  if (!in) throw ValidationError(text, "cannot open LHV strategy file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(text, std::string("malformed JSON: ") + e.what());
  }
  LhvStrategy strategy;
  strategy.profile = std::move(profile);
  for (const auto& tj : j.at("tables")) {
    LhvOutcomeTable table;
    table.aPass = {tj.at("aPass").at(0).get<bool>(),
                   tj.at("aPass").at(1).get<bool>()};
    table.bPass = {tj.at("bPass").at(0).get<bool>(),
                   tj.at("bPass").at(1).get<bool>()};
    strategy.tables.emplace_back(tj.at("weight").get<double>(), table);
  }
  strategy.validate();
  return strategy;
}

int cmd_predict(const ConfigFlags& flags, bool json) {
  const ExperimentConfig cfg = flags.resolve();
  const ModelPrediction model = predict_counts(cfg);
  std::vector<ReportRow> rows;
  auto row = [&rows](std::string label, double value) {
    rows.push_back({std::move(label), value, std::nullopt, std::nullopt,
                    std::nullopt, ValueFormat::Count});
  };
  row("C(a1b1)", model.observed.block(SettingCombo::A1B1).cOO);
  row("C(a1b2)", model.observed.block(SettingCombo::A1B2).cOO);
  row("C(a2b1)", model.observed.block(SettingCombo::A2B1).cOO);
  row("C(a2b2)", model.observed.block(SettingCombo::A2B2).cOO);
  row("S_A(a1)", model.observed.block(SettingCombo::A1B2).sA);
  row("S_B(b1)", model.observed.block(SettingCombo::A2B1).sB);
  row("J", model.j);
  return emit(rows, json);
}

int cmd_analyze(const std::string& datasetPath, bool json) {
  const Dataset ds = load_dataset(datasetPath);
  if (ds.rounds.empty())
    throw ValidationError(datasetPath, "dataset has no rounds to analyze");

  std::vector<ReportRow> rows;
  auto row = [&rows](std::string label, double value,
                     ValueFormat fmt = ValueFormat::Count) {
    rows.push_back({std::move(label), value, std::nullopt, std::nullopt,
                    std::nullopt, fmt});
  };
  std::vector<double> js;
  for (std::size_t i = 0; i < ds.rounds.size(); ++i) {
    js.push_back(eberhard_j(ds.rounds[i]));
    row("J/round" + std::to_string(i + 1), js.back());
  }
  const SeriesStats stats = series_stats(js);
  row("J/sum", stats.sum);
  row("J/mean", stats.mean);
  if (stats.sampleStdDev) row("J/std", *stats.sampleStdDev);

  const SinglesDeviationTable delta = singles_deviations(ds.accumulated());
  row("delta/A(a1)", 100.0 * delta.dA1, ValueFormat::Percent);
  row("delta/A(a2)", 100.0 * delta.dA2, ValueFormat::Percent);
  row("delta/B(b1)", 100.0 * delta.dB1, ValueFormat::Percent);
  row("delta/B(b2)", 100.0 * delta.dB2, ValueFormat::Percent);
  return emit(rows, json);
}

int cmd_normalize(const std::string& datasetPath, const std::string& pathSpec,
                  const std::string& baselineSpec, const std::string& variant,
                  bool json) {
  const Dataset ds = load_dataset(datasetPath);
  if (ds.rounds.empty())
    throw ValidationError(datasetPath, "dataset has no rounds to normalize");
  const NormalizationPath path = parse_path(pathSpec);

  BaselinePolicy policy = parse_baseline(baselineSpec);
  if (variant == "fixed-combo" && policy.kind == BaselinePolicy::Kind::SmallestF)
    policy = BaselinePolicy::fixed(SettingCombo::A1B1);

  std::vector<ReportRow> rows;
  auto row = [&rows](std::string label, double value,
                     ValueFormat fmt = ValueFormat::Count) {
    rows.push_back({std::move(label), value, std::nullopt, std::nullopt,
                    std::nullopt, fmt});
  };

  if (variant == "per-round" || variant == "fixed-combo") {
    std::vector<double> jPrimes;
    for (std::size_t i = 0; i < ds.rounds.size(); ++i) {
      const std::string tag = "round" + std::to_string(i + 1);
      const CorrectionFactors f = compute_factors(ds.rounds[i], path, policy);
      for (SettingCombo combo : kSequence)
        row("f/" + tag + "/" + combo_label(combo), 100.0 * f.at(combo),
            ValueFormat::Percent);
      jPrimes.push_back(j_prime(ds.rounds[i], path, policy));
      row("Jprime/" + tag, jPrimes.back());
    }
    const SeriesStats stats = series_stats(jPrimes);
    row("Jprime/sum", stats.sum);
    row("Jprime/mean", stats.mean);
    if (stats.sampleStdDev) row("Jprime/std", *stats.sampleStdDev);
  } else if (variant == "adversarial") {
    for (std::size_t i = 0; i < ds.rounds.size(); ++i) {
      const double j = eberhard_j(ds.rounds[i]);
      const double jp = j_prime(ds.rounds[i], path, policy);
      row("adversarial/round" + std::to_string(i + 1), std::max(j, jp));
    }
    const SeriesStats stats = adversarial_series(ds.rounds, path, policy);
    row("adversarial/sum", stats.sum);
    row("adversarial/mean", stats.mean);
    if (stats.sampleStdDev) row("adversarial/std", *stats.sampleStdDev);
  } else if (variant == "total") {
    const RoundData total = ds.accumulated();
    const CorrectionFactors f = compute_factors(total, path, policy);
    for (SettingCombo combo : kSequence)
      row(std::string("f/total/") + combo_label(combo), 100.0 * f.at(combo),
          ValueFormat::Percent);
    row("Jprime/total", normalize_total(ds.rounds, path, policy));
  } else {
    throw std::invalid_argument("unknown variant '" + variant + "'");
  }
  return emit(rows, json);
}

int cmd_simulate(const ConfigFlags& flags, int rounds, double secondsPerBlock,
                 std::uint64_t seed, const std::string& profileSpec,
                 const std::string& lhvSpec, const std::string& outputPath,
                 const std::string& eventsPath) {
  const ExperimentConfig cfg = flags.resolve();
  const IntensityProfile profile = parse_profile(profileSpec);
  const Schedule schedule = Schedule::uniform(rounds, secondsPerBlock);

  Dataset ds;
  ds.metadata.durationSeconds = secondsPerBlock;
  ds.metadata.sequence = kSequence;
  ds.metadata.settings = SettingAngles::from_config(cfg);
  ds.metadata.sim = SimInfo{cfg, seed, kRngAlgorithm};

  if (!lhvSpec.empty()) {
    if (!eventsPath.empty())
      throw std::invalid_argument(
          "event output requires the quantum simulator");
    const LhvStrategy strategy = parse_lhv(lhvSpec, profile);
    ds.metadata.source = "lhv-simulation";
    ds.rounds = simulate_lhv_experiment(strategy, cfg.r0, schedule,
                                        SimSeed{seed});
  } else {
    ds.metadata.source = "simulation";
    const bool keepEvents = !eventsPath.empty();
    SimulatedExperiment sim =
        simulate_experiment(cfg, schedule, profile, SimSeed{seed}, keepEvents);
    ds.rounds = std::move(sim.rounds);
    if (keepEvents) save_events(sim.events, eventsPath);
  }
  ds.totals = sum_rounds(ds.rounds);
  save_dataset(ds, outputPath);
  std::cout << "wrote " << outputPath << " (" << ds.rounds.size()
            << " rounds, seed " << seed << ")\n";
  return kExitOk;
}

int cmd_validate_paper(const std::string& datasetPath, bool quick, bool json) {
  const Dataset ds =
      datasetPath.empty() ? builtin_paper_dataset() : load_dataset(datasetPath);
  std::vector<ReportRow> rows = reference_checks(ds);
  if (!quick) {
    for (auto& row : simulation_checks()) rows.push_back(std::move(row));
    for (auto& row : lhv_demo_checks()) rows.push_back(std::move(row));
  }
  emit(rows, json);
  const bool ok = all_passed(rows);
  if (!json)
    std::cout << (ok ? "all checks passed\n" : "CHECKS FAILED\n");
  return ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Eberhard-inequality coincidence experiment toolkit: count "
      "prediction, J analysis, production-rate drift normalization, event "
      "simulation and reference validation"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "machine-readable report output");

  ConfigFlags predictFlags;
  CLI::App* predict =
      app.add_subcommand("predict", "predict the count model's table row");
  add_config_flags(predict, predictFlags);

  std::string analyzePath;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Eberhard values of a counts dataset");
  analyze->add_option("dataset", analyzePath, "counts dataset (JSON)")
      ->required();

  std::string normPath, normPathSpec, normBaseline;
  std::string normVariant = "per-round";
  CLI::App* normalize = app.add_subcommand(
      "normalize", "production-rate drift normalization (f and J')");
  normalize->add_option("dataset", normPath, "counts dataset (JSON)")
      ->required();
  normalize->add_option("--path", normPathSpec,
                        "correction-factor path, e.g. "
                        "a1b1-a1b2:A,a1b2-a2b2:B,a2b2-a2b1:A");
  normalize->add_option("--baseline", normBaseline,
                        "baseline policy: smallest (default) or a combination "
                        "label such as a1b1");
  normalize
      ->add_option("--variant", normVariant,
                   "per-round, adversarial, total or fixed-combo")
      ->check(CLI::IsMember({"per-round", "adversarial", "total",
                             "fixed-combo"}));

  ConfigFlags simFlags;
  int simRounds = 5;
  double simSeconds = 60.0;
  std::uint64_t simSeed = 1;
  std::string simProfile, simLhv, simOutput, simEvents;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate a timestamped-detection dataset");
  add_config_flags(simulate, simFlags);
  simulate->add_option("--rounds", simRounds, "measurement rounds");
  simulate->add_option("--seconds-per-block", simSeconds,
                       "seconds per setting combination");
  simulate->add_option("--seed", simSeed, "master RNG seed");
  simulate->add_option("--profile", simProfile,
                       "intensity multipliers, e.g. g22=0.9");
  simulate->add_option("--lhv", simLhv,
                       "local-realist source: 'always-pass' or a strategy "
                       "JSON file");
  simulate->add_option("-o,--output", simOutput, "output dataset path")
      ->required();
  simulate->add_option("--events", simEvents,
                       "also write the raw event stream (CSV)");

  std::string validateDataset;
  bool validateQuick = false;
  CLI::App* validate = app.add_subcommand(
      "validate-paper",
      "check every published reference value against this build");
  validate->add_option("--dataset", validateDataset,
                       "analyze this dataset instead of the embedded record");
  validate->add_flag("--quick", validateQuick,
                     "skip the Monte Carlo cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (predict->parsed()) return cmd_predict(predictFlags, json);
    if (analyze->parsed()) return cmd_analyze(analyzePath, json);
    if (normalize->parsed())
      return cmd_normalize(normPath, normPathSpec, normBaseline, normVariant,
                           json);
    if (simulate->parsed())
      return cmd_simulate(simFlags, simRounds, simSeconds, simSeed, simProfile,
                          simLhv, simOutput, simEvents);
    if (validate->parsed())
      return cmd_validate_paper(validateDataset, validateQuick, json);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
