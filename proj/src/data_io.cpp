#include "bell/data_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bell {
namespace {

using nlohmann::json;

// Counts and angles are stored as plain JSON numbers; integral values are
// emitted without a decimal point so fixtures stay human-diffable.
json number_json(double v) {
  if (std::isfinite(v) && v == std::floor(v) &&
      std::abs(v) <= 9.0e15) {
    return json(static_cast<std::int64_t>(v));
  }
  return json(v);
}

double require_number(const json& j, const std::string& location) {
  if (!j.is_number())
    throw ValidationError(location, "expected a number");
  return j.get<double>();
}

const json& require_field(const json& j, const char* key,
                          const std::string& location) {
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(location, std::string("missing field '") + key + "'");
  return *it;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

json block_to_json(const CountsBlock& block, const SettingAngles& settings) {
  json j;
  j["alpha"] = number_json(settings.alpha(block.alphaIndex));
  j["beta"] = number_json(settings.beta(block.betaIndex));
  j["sA"] = number_json(block.sA);
  j["sB"] = number_json(block.sB);
  j["cOO"] = number_json(block.cOO);
  return j;
}

json round_to_json(const RoundData& round,
                   const std::array<SettingCombo, 4>& sequence,
                   const SettingAngles& settings) {
  json blocks = json::array();
  for (SettingCombo combo : sequence)
    blocks.push_back(block_to_json(round.block(combo), settings));
  return blocks;
}

RoundData round_from_json(const json& j, const DatasetMetadata& meta,
                          const std::string& location) {
  if (!j.is_array() || j.size() != 4)
    throw ValidationError(location, "a round must contain exactly 4 blocks");
  std::array<CountsBlock, 4> blocks;
  for (std::size_t pos = 0; pos < 4; ++pos) {
    const SettingCombo combo = meta.sequence[pos];
    const std::string here = location + "[" + std::to_string(pos) + "]";
    const json& bj = j[pos];
    if (!bj.is_object()) throw ValidationError(here, "expected an object");

    const double alpha = require_number(require_field(bj, "alpha", here),
                                        here + ".alpha");
    const double beta = require_number(require_field(bj, "beta", here),
                                       here + ".beta");
    if (!close(alpha, meta.settings.alpha(alpha_index(combo))))
      throw ValidationError(here + ".alpha",
                            "angle does not match the declared sequence");
    if (!close(beta, meta.settings.beta(beta_index(combo))))
      throw ValidationError(here + ".beta",
                            "angle does not match the declared sequence");

    CountsBlock block;
    block.alphaIndex = alpha_index(combo);
    block.betaIndex = beta_index(combo);
    block.sA = require_number(require_field(bj, "sA", here), here + ".sA");
    block.sB = require_number(require_field(bj, "sB", here), here + ".sB");
    block.cOO = require_number(require_field(bj, "cOO", here), here + ".cOO");
    blocks[sequence_position(combo)] = block;
  }
  RoundData round;
  round.blocks = blocks;
  return round;
}

json config_to_json_value(const ExperimentConfig& cfg) {
  json j;
  j["r"] = cfg.state.r;
  j["V"] = cfg.state.V;
  j["etaA"] = cfg.etaA;
  j["etaB"] = cfg.etaB;
  j["r0"] = number_json(cfg.r0);
  j["t"] = number_json(cfg.t);
  j["zeta"] = number_json(cfg.zeta);
  j["tauC"] = cfg.tauC;
  j["alpha1"] = number_json(cfg.alpha1.degrees);
  j["alpha2"] = number_json(cfg.alpha2.degrees);
  j["beta1"] = number_json(cfg.beta1.degrees);
  j["beta2"] = number_json(cfg.beta2.degrees);
  return j;
}

ExperimentConfig config_from_json_value(const json& j,
                                        const std::string& location) {
  if (!j.is_object()) throw ValidationError(location, "expected an object");
  auto num = [&](const char* key) {
    return require_number(require_field(j, key, location),
                          location + "." + key);
  };
  ExperimentConfig cfg;
  cfg.state.r = num("r");
  cfg.state.V = num("V");
  cfg.etaA = num("etaA");
  cfg.etaB = num("etaB");
  cfg.r0 = num("r0");
  cfg.t = num("t");
  cfg.zeta = num("zeta");
  cfg.tauC = num("tauC");
  cfg.alpha1 = MeasurementAngle{num("alpha1")};
  cfg.alpha2 = MeasurementAngle{num("alpha2")};
  cfg.beta1 = MeasurementAngle{num("beta1")};
  cfg.beta2 = MeasurementAngle{num("beta2")};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(location, e.what());
  }
  return cfg;
}

}  // namespace

ValidationError::ValidationError(std::string location,
                                 const std::string& message)
    : std::runtime_error(location + ": " + message),
      location_(std::move(location)) {}

double SettingAngles::alpha(int index) const {
  if (index == 1) return alpha1;
  if (index == 2) return alpha2;
  throw std::invalid_argument("alpha index must be 1 or 2");
}

double SettingAngles::beta(int index) const {
  if (index == 1) return beta1;
  if (index == 2) return beta2;
  throw std::invalid_argument("beta index must be 1 or 2");
}

SettingAngles SettingAngles::from_config(const ExperimentConfig& cfg) {
  return {cfg.alpha1.degrees, cfg.alpha2.degrees, cfg.beta1.degrees,
          cfg.beta2.degrees};
}

void Dataset::validate() const {
  if (!(metadata.durationSeconds > 0.0))
    throw ValidationError("metadata.durationSeconds", "must be > 0");
  std::array<bool, 4> seen{};
  for (SettingCombo combo : metadata.sequence) {
    auto& flag = seen[sequence_position(combo)];
    if (flag)
      throw ValidationError("metadata.sequence",
                            "sequence must list each combination once");
    flag = true;
  }
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    for (SettingCombo combo : kSequence) {
      const CountsBlock& block = rounds[i].block(combo);
      const std::string here = "rounds[" + std::to_string(i) + "]." +
                               std::string(combo_label(combo));
      if (block.sA < 0 || block.sB < 0 || block.cOO < 0)
        throw ValidationError(here, "counts must be >= 0");
      if (block.cOO > std::min(block.sA, block.sB))
        throw ValidationError(here, "cOO must not exceed min(sA, sB)");
    }
  }
  if (totals) {
    if (rounds.empty())
      throw ValidationError("totals", "totals present but no rounds");
    const RoundData sum = accumulated();
    std::ostringstream diff;
    for (SettingCombo combo : kSequence) {
      const CountsBlock& expect = sum.block(combo);
      const CountsBlock& found = totals->block(combo);
      auto check = [&](const char* field, double e, double f) {
        if (!close(e, f))
          diff << combo_label(combo) << "." << field << ": sum of rounds "
               << e << " != totals " << f << "; ";
      };
      check("sA", expect.sA, found.sA);
      check("sB", expect.sB, found.sB);
      check("cOO", expect.cOO, found.cOO);
    }
    const std::string report = diff.str();
    if (!report.empty()) throw ValidationError("totals", report);
  }
}

RoundData Dataset::accumulated() const {
  if (rounds.empty())
    throw std::invalid_argument("dataset has no rounds to accumulate");
  return sum_rounds(rounds);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open file");
  return load_dataset(in, path);
}

Dataset load_dataset(std::istream& in, const std::string& name) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(name, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError(name, "expected a JSON object");

  const json& version = require_field(j, "format_version", name);
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion)
    throw ValidationError(name + ".format_version",
                          "unsupported format version");

  Dataset ds;
  const json& meta = require_field(j, "metadata", name);
  if (!meta.is_object())
    throw ValidationError(name + ".metadata", "expected an object");
  const json& source = require_field(meta, "source", "metadata");
  if (!source.is_string())
    throw ValidationError("metadata.source", "expected a string");
  ds.metadata.source = source.get<std::string>();
  ds.metadata.durationSeconds = require_number(
      require_field(meta, "durationSeconds", "metadata"),
      "metadata.durationSeconds");

  const json& seq = require_field(meta, "sequence", "metadata");
  if (!seq.is_array() || seq.size() != 4)
    throw ValidationError("metadata.sequence", "expected 4 labels");
  for (std::size_t i = 0; i < 4; ++i) {
    if (!seq[i].is_string())
      throw ValidationError("metadata.sequence", "labels must be strings");
    try {
      ds.metadata.sequence[i] = combo_from_label(seq[i].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ValidationError("metadata.sequence", e.what());
    }
  }

  const json& settings = require_field(meta, "settings", "metadata");
  if (!settings.is_object())
    throw ValidationError("metadata.settings", "expected an object");
  auto angle = [&](const char* key) {
    return require_number(require_field(settings, key, "metadata.settings"),
                          std::string("metadata.settings.") + key);
  };
  ds.metadata.settings = {angle("alpha1"), angle("alpha2"), angle("beta1"),
                          angle("beta2")};

  if (auto it = meta.find("sim"); it != meta.end() && !it->is_null()) {
    SimInfo sim;
    sim.config = config_from_json_value(
        require_field(*it, "config", "metadata.sim"), "metadata.sim.config");
    const json& seed = require_field(*it, "seed", "metadata.sim");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
      throw ValidationError("metadata.sim.seed", "expected an integer");
    sim.seed = seed.get<std::uint64_t>();
    const json& rng = require_field(*it, "rng", "metadata.sim");
    if (!rng.is_string())
      throw ValidationError("metadata.sim.rng", "expected a string");
    sim.rng = rng.get<std::string>();
    ds.metadata.sim = std::move(sim);
  }

  const json& rounds = require_field(j, "rounds", name);
  if (!rounds.is_array())
    throw ValidationError("rounds", "expected an array");
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    ds.rounds.push_back(round_from_json(
        rounds[i], ds.metadata, "rounds[" + std::to_string(i) + "]"));
  }

  if (auto it = j.find("totals"); it != j.end() && !it->is_null())
    ds.totals = round_from_json(*it, ds.metadata, "totals");

  ds.validate();
  return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path, "cannot open file for writing");
  save_dataset(dataset, out);
}

void save_dataset(const Dataset& dataset, std::ostream& out) {
  dataset.validate();
  json j;
  j["format_version"] = kFormatVersion;
  json meta;
  meta["source"] = dataset.metadata.source;
  meta["durationSeconds"] = number_json(dataset.metadata.durationSeconds);
  json seq = json::array();
  for (SettingCombo combo : dataset.metadata.sequence)
    seq.push_back(combo_label(combo));
  meta["sequence"] = std::move(seq);
  json settings;
  settings["alpha1"] = number_json(dataset.metadata.settings.alpha1);
  settings["alpha2"] = number_json(dataset.metadata.settings.alpha2);
  settings["beta1"] = number_json(dataset.metadata.settings.beta1);
  settings["beta2"] = number_json(dataset.metadata.settings.beta2);
  meta["settings"] = std::move(settings);
  if (dataset.metadata.sim) {
    json sim;
    sim["config"] = config_to_json_value(dataset.metadata.sim->config);
    sim["seed"] = dataset.metadata.sim->seed;
    sim["rng"] = dataset.metadata.sim->rng;
    meta["sim"] = std::move(sim);
  }
  j["metadata"] = std::move(meta);

  json rounds = json::array();
  for (const RoundData& round : dataset.rounds)
    rounds.push_back(round_to_json(round, dataset.metadata.sequence,
                                   dataset.metadata.settings));
  j["rounds"] = std::move(rounds);
  if (dataset.totals)
    j["totals"] = round_to_json(*dataset.totals, dataset.metadata.sequence,
                                dataset.metadata.settings);

  out << j.dump(2) << '\n';
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return config_to_json_value(cfg).dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("<config>", std::string("malformed JSON: ") +
                                          e.what());
  }
  return config_from_json_value(j, "<config>");
}

std::vector<EventRecord> load_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open file");
  return load_events(in, path);
}

std::vector<EventRecord> load_events(std::istream& in,
                                     const std::string& name) {
  std::vector<EventRecord> events;
  std::string line;
  if (!std::getline(in, line)) return events;  // empty file, empty streams
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_ns,party,block_id")
    throw ValidationError(name + ":1", "expected header time_ns,party,block_id");

  // Track contiguous block groups and in-group time ordering.
  bool haveBlock = false;
  std::uint32_t currentRound = 0;
  SettingCombo currentCombo = SettingCombo::A1B1;
  std::int64_t lastTime = 0;
  std::vector<std::pair<std::uint32_t, SettingCombo>> closed;

  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string here = name + ":" + std::to_string(lineNo);

    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ValidationError(here, "expected 3 comma-separated fields");

    EventRecord ev;
    const std::string timeField = line.substr(0, c1);
    try {
      std::size_t used = 0;
      ev.timeNs = std::stoll(timeField, &used);
      if (used != timeField.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError(here, "bad time_ns value '" + timeField + "'");
    }
    const std::string partyField = line.substr(c1 + 1, c2 - c1 - 1);
    if (partyField.size() != 1)
      throw ValidationError(here, "party must be A or B");
    try {
      ev.party = party_from_char(partyField[0]);
      const auto [round, combo] = parse_block_id(line.substr(c2 + 1));
      ev.round = round;
      ev.combo = combo;
    } catch (const std::invalid_argument& e) {
      throw ValidationError(here, e.what());
    }

    if (!haveBlock || ev.round != currentRound || ev.combo != currentCombo) {
      if (haveBlock)
        closed.emplace_back(currentRound, currentCombo);
      for (const auto& [round, combo] : closed)
        if (round == ev.round && combo == ev.combo)
          throw ValidationError(here, "event blocks must be contiguous");
      haveBlock = true;
      currentRound = ev.round;
      currentCombo = ev.combo;
      lastTime = ev.timeNs;
    } else if (ev.timeNs < lastTime) {
      throw ValidationError(here, "timestamps out of order within a block");
    } else {
      lastTime = ev.timeNs;
    }
    events.push_back(ev);
  }
  return events;
}

void save_events(const std::vector<EventRecord>& events,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path, "cannot open file for writing");
  save_events(events, out);
}

void save_events(const std::vector<EventRecord>& events, std::ostream& out) {
  out << "time_ns,party,block_id\n";
  for (const EventRecord& ev : events) {
    out << ev.timeNs << ',' << party_char(ev.party) << ','
        << block_id(ev.round, ev.combo) << '\n';
  }
}

std::pair<EventStream, EventStream> split_block(
    const std::vector<EventRecord>& events, std::uint32_t round,
    SettingCombo combo) {
  EventStream a;
  EventStream b;
  for (const EventRecord& ev : events) {
    if (ev.round != round || ev.combo != combo) continue;
    (ev.party == Party::A ? a : b).push_back(ev);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace bell
