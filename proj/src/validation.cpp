#include "bell/validation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "bell/data_io.hpp"
#include "bell/drift_norm.hpp"
#include "bell/event_sim.hpp"

namespace bell {
namespace {

using nlohmann::json;

const char* format_name(ValueFormat f) {
  switch (f) {
    case ValueFormat::Count: return "count";
    case ValueFormat::Percent: return "percent";
    case ValueFormat::Plain: return "plain";
  }
  throw std::invalid_argument("unknown value format");
}

ValueFormat format_from_name(const std::string& name) {
  if (name == "count") return ValueFormat::Count;
  if (name == "percent") return ValueFormat::Percent;
  if (name == "plain") return ValueFormat::Plain;
  throw std::invalid_argument("unknown value format '" + name + "'");
}

void check_row_invariant(const ReportRow& row) {
  const bool both = row.modelValue.has_value();
  if (row.deviation.has_value() != both)
    throw std::invalid_argument(
        "report row '" + row.label +
        "': deviation must be present exactly when modelValue is");
}

double relative_deviation(double data, double model) {
  if (data == 0.0) return model;
  return (model - data) / std::abs(data);
}

std::string format_value(double v, ValueFormat f) {
  char buf[64];
  switch (f) {
    case ValueFormat::Count:
      std::snprintf(buf, sizeof buf, "%.0f", v);
      break;
    case ValueFormat::Percent:
      std::snprintf(buf, sizeof buf, "%.2f%%", v);
      break;
    case ValueFormat::Plain:
      std::snprintf(buf, sizeof buf, "%.6g", v);
      break;
  }
  return buf;
}

// Assembles rows for reference_checks and friends.
class RowBuilder {
 public:
  explicit RowBuilder(std::vector<ReportRow>& rows) : rows_(rows) {}

  void add(std::string label, double published, double computed, bool pass,
           ValueFormat fmt) {
    rows_.push_back({std::move(label), published, computed,
                     relative_deviation(published, computed), pass, fmt});
  }
  // |computed - published| <= tol * |published|
  void rel(std::string label, double published, double computed, double tol,
           ValueFormat fmt = ValueFormat::Count) {
    const bool ok = std::abs(computed - published) <= tol * std::abs(published);
    add(std::move(label), published, computed, ok, fmt);
  }
  // |computed - published| <= tol
  void abs(std::string label, double published, double computed, double tol,
           ValueFormat fmt = ValueFormat::Count) {
    add(std::move(label), published, computed,
        std::abs(computed - published) <= tol, fmt);
  }
  // nearest integer within +-slack of the published integer
  void rounded(std::string label, double published, double computed,
               double slack = 1.0) {
    add(std::move(label), published, computed,
        std::abs(std::round(computed) - published) <= slack,
        ValueFormat::Count);
  }
  void range(std::string label, double published, double computed, double lo,
             double hi, ValueFormat fmt = ValueFormat::Percent) {
    add(std::move(label), published, computed, computed >= lo && computed <= hi,
        fmt);
  }

 private:
  std::vector<ReportRow>& rows_;
};

}  // namespace

std::string rows_to_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const ReportRow& row : rows) {
    check_row_invariant(row);
    json j;
    j["label"] = row.label;
    j["dataValue"] = row.dataValue;
    if (row.modelValue) j["modelValue"] = *row.modelValue;
    if (row.deviation) j["deviation"] = *row.deviation;
    if (row.pass) j["pass"] = *row.pass;
    j["format"] = format_name(row.format);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::vector<ReportRow> rows_from_json(const std::string& text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed report JSON: ") +
                                e.what());
  }
  if (!arr.is_array())
    throw std::invalid_argument("report JSON must be an array");
  std::vector<ReportRow> rows;
  for (const json& j : arr) {
    ReportRow row;
    row.label = j.at("label").get<std::string>();
    row.dataValue = j.at("dataValue").get<double>();
    if (j.contains("modelValue")) row.modelValue = j["modelValue"].get<double>();
    if (j.contains("deviation")) row.deviation = j["deviation"].get<double>();
    if (j.contains("pass")) row.pass = j["pass"].get<bool>();
    row.format = format_from_name(j.value("format", "plain"));
    check_row_invariant(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_rows(const std::vector<ReportRow>& rows) {
  std::size_t width = 5;
  for (const ReportRow& row : rows) width = std::max(width, row.label.size());

  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s %14s %14s %10s  %s\n",
                static_cast<int>(width), "label", "data", "model", "dev",
                "verdict");
  out += buf;
  for (const ReportRow& row : rows) {
    check_row_invariant(row);
    const std::string data = format_value(row.dataValue, row.format);
    const std::string model =
        row.modelValue ? format_value(*row.modelValue, row.format) : "";
    std::string dev;
    if (row.deviation) {
      char devBuf[32];
      std::snprintf(devBuf, sizeof devBuf, "%+.3f%%", 100.0 * *row.deviation);
      dev = devBuf;
    }
    const char* verdict = row.pass ? (*row.pass ? "PASS" : "FAIL") : "";
    std::snprintf(buf, sizeof buf, "%-*s %14s %14s %10s  %s\n",
                  static_cast<int>(width), row.label.c_str(), data.c_str(),
                  model.c_str(), dev.c_str(), verdict);
    out += buf;
  }
  return out;
}

bool all_passed(const std::vector<ReportRow>& rows) {
  for (const ReportRow& row : rows)
    if (row.pass && !*row.pass) return false;
  return true;
}

std::vector<ReportRow> reference_checks(const Dataset& dataset) {
  dataset.validate();
  if (dataset.rounds.empty())
    throw std::invalid_argument("reference checks need at least one round");

  const PaperFixtures& pub = paper_fixtures();
  const ExperimentConfig cfg = reference_config();
  std::vector<ReportRow> rows;
  RowBuilder out(rows);

  const RoundData totals = dataset.accumulated();

  // Model reproduction of the published model row.
  const ModelPrediction model = predict_counts(cfg);
  {
    const std::array<double, 7> computed = {
        model.observed.block(SettingCombo::A1B1).cOO,
        model.observed.block(SettingCombo::A1B2).cOO,
        model.observed.block(SettingCombo::A2B1).cOO,
        model.observed.block(SettingCombo::A2B2).cOO,
        model.observed.block(SettingCombo::A1B2).sA,
        model.observed.block(SettingCombo::A2B1).sB,
        model.j};
    for (std::size_t i = 0; i < 6; ++i)
      out.rel(std::string("table1/model/") + pub.table1Labels[i],
              pub.table1Model[i], computed[i], 0.002);
    out.rel("table1/model/J", pub.table1Model[6], model.j, 0.02);
  }

  // Deviation row, with the published (rounded) model row as model input.
  {
    RoundData publishedModel;
    publishedModel.block(SettingCombo::A1B1).cOO = pub.table1Model[0];
    publishedModel.block(SettingCombo::A1B2).cOO = pub.table1Model[1];
    publishedModel.block(SettingCombo::A2B1).cOO = pub.table1Model[2];
    publishedModel.block(SettingCombo::A2B2).cOO = pub.table1Model[3];
    publishedModel.block(SettingCombo::A1B2).sA = pub.table1Model[4];
    publishedModel.block(SettingCombo::A2B1).sB = pub.table1Model[5];
    const ModelComparison cmp = compare_model(totals, publishedModel);
    for (std::size_t i = 0; i < 7; ++i)
      out.abs("table1/deviation/" + cmp.entries[i].label,
              pub.table1DeviationPercent[i], 100.0 * cmp.entries[i].deviation,
              0.01, ValueFormat::Percent);
  }

  // Per-round and accumulated Eberhard values.
  std::vector<double> js;
  for (std::size_t i = 0; i < dataset.rounds.size(); ++i) {
    js.push_back(eberhard_j(dataset.rounds[i]));
    if (i < pub.j.size())
      out.abs("table3/J/round" + std::to_string(i + 1), pub.j[i], js.back(),
              1e-9);
  }
  out.abs("table3/J/total", pub.jSum, eberhard_j(totals), 1e-9);
  const SeriesStats jStats = series_stats(js);
  out.abs("stats/J/sum", pub.jSum, jStats.sum, 1e-9);
  out.rounded("stats/J/mean", pub.jMean, jStats.mean);
  if (jStats.sampleStdDev)
    out.rounded("stats/J/std", pub.jStdDev, *jStats.sampleStdDev);

  // Table 2 singles deviations and their statistical scale.
  {
    const SinglesDeviationTable delta = singles_deviations(totals);
    out.abs("table2/delta/A(a1)", pub.deltaA1Percent, 100.0 * delta.dA1, 0.01,
            ValueFormat::Percent);
    out.abs("table2/delta/A(a2)", pub.deltaA2Percent, 100.0 * delta.dA2, 0.01,
            ValueFormat::Percent);
    out.abs("table2/delta/B(b1)", pub.deltaB1Percent, 100.0 * delta.dB1, 0.01,
            ValueFormat::Percent);
    out.abs("table2/delta/B(b2)", pub.deltaB2Percent, 100.0 * delta.dB2, 0.01,
            ValueFormat::Percent);
    out.abs("table2/poisson/small", pub.poissonSmallPercent,
            100.0 * poisson_relative_fluctuation(
                        totals.block(SettingCombo::A1B2).sA),
            0.01, ValueFormat::Percent);
    out.abs("table2/poisson/large", pub.poissonLargePercent,
            100.0 * poisson_relative_fluctuation(
                        totals.block(SettingCombo::A2B2).sA),
            0.01, ValueFormat::Percent);
  }

  // Drift normalization per round.
  const NormalizationPath& path = NormalizationPath::standard();
  const BaselinePolicy smallest = BaselinePolicy::smallest_f();
  std::vector<double> jPrimes;
  for (std::size_t i = 0; i < dataset.rounds.size(); ++i) {
    const std::string roundTag = "round" + std::to_string(i + 1);
    const CorrectionFactors f =
        compute_factors(dataset.rounds[i], path, smallest);
    for (SettingCombo combo : kSequence) {
      const std::size_t pos =
          static_cast<std::size_t>(sequence_position(combo));
      if (i < pub.fPercent.size())
        out.abs("table3/f/" + roundTag + "/" + combo_label(combo),
                pub.fPercent[i][pos], 100.0 * f.at(combo), 0.01,
                ValueFormat::Percent);
    }
    jPrimes.push_back(j_prime(dataset.rounds[i], path, smallest));
    if (i < pub.jPrime.size())
      out.abs("table3/Jprime/" + roundTag, pub.jPrime[i], jPrimes.back(), 1.0);
  }
  const SeriesStats pStats = series_stats(jPrimes);
  out.abs("stats/Jprime/sum", pub.jPrimeSum, pStats.sum, 3.0);
  out.abs("stats/Jprime/mean", pub.jPrimeMean, pStats.mean, 1.0);
  if (pStats.sampleStdDev)
    out.abs("stats/Jprime/std", pub.jPrimeStdDev, *pStats.sampleStdDev, 1.0);

  // Variant normalizations.
  {
    const SeriesStats adv = adversarial_series(dataset.rounds, path, smallest);
    out.abs("variants/adversarial/sum", pub.advSum, adv.sum, 1.0);
    out.abs("variants/adversarial/mean", pub.advMean, adv.mean, 1.0);
    if (adv.sampleStdDev)
      out.abs("variants/adversarial/std", pub.advStdDev, *adv.sampleStdDev,
              1.0);

    const BaselinePolicy pinned = BaselinePolicy::fixed(SettingCombo::A1B1);
    std::vector<double> fixedJs;
    for (const RoundData& round : dataset.rounds)
      fixedJs.push_back(j_prime(round, path, pinned));
    const SeriesStats fixedStats = series_stats(fixedJs);
    out.abs("variants/fixed-a1b1/sum", pub.fixedSum, fixedStats.sum, 1.0);
    out.abs("variants/fixed-a1b1/mean", pub.fixedMean, fixedStats.mean, 1.0);
    if (fixedStats.sampleStdDev)
      out.abs("variants/fixed-a1b1/std", pub.fixedStdDev,
              *fixedStats.sampleStdDev, 1.0);
    out.abs("variants/fixed-a1b1/total", pub.fixedTotalCounts,
            normalize_total(dataset.rounds, path, pinned), 2.0);

    out.abs("variants/total/J", pub.jPrimeTotalCounts,
            normalize_total(dataset.rounds, path, smallest), 2.0);
    const CorrectionFactors fTotal = compute_factors(totals, path, smallest);
    for (SettingCombo combo : kSequence)
      out.abs(std::string("variants/total/f/") + combo_label(combo),
              pub.fTotalPercent[static_cast<std::size_t>(
                  sequence_position(combo))],
              100.0 * fTotal.at(combo), 0.01, ValueFormat::Percent);
  }

  // Accidental-coincidence share of the observed coincidences.
  out.range("accidentals/fraction/a1b1", 0.02,
            100.0 * model.accidental_fraction(SettingCombo::A1B1), 0.01, 0.04);
  out.range("accidentals/fraction/a1b2", 0.1,
            100.0 * model.accidental_fraction(SettingCombo::A1B2), 0.05, 0.2);
  out.range("accidentals/fraction/a2b1", 0.1,
            100.0 * model.accidental_fraction(SettingCombo::A2B1), 0.05, 0.2);
  out.range("accidentals/fraction/a2b2", 18.0,
            100.0 * model.accidental_fraction(SettingCombo::A2B2), 17.0, 19.0);

  return rows;
}

std::vector<ReportRow> simulation_checks(int seeds, double secondsPerBlock,
                                         std::uint64_t firstSeed) {
  if (seeds < 1) throw std::invalid_argument("need at least one seed");

  ExperimentConfig cfg = reference_config();
  cfg.t = secondsPerBlock;
  const ModelPrediction model = predict_counts(cfg);

  std::array<double, 4> meanS_A{};
  std::array<double, 4> meanS_B{};
  std::array<double, 4> meanC{};
  const Schedule schedule = Schedule::uniform(1, secondsPerBlock);
  for (int s = 0; s < seeds; ++s) {
    const SimulatedExperiment sim = simulate_experiment(
        cfg, schedule, IntensityProfile{}, SimSeed{firstSeed +
                                                   static_cast<std::uint64_t>(s)});
    for (SettingCombo combo : kSequence) {
      const std::size_t pos =
          static_cast<std::size_t>(sequence_position(combo));
      const CountsBlock& block = sim.rounds.front().block(combo);
      meanS_A[pos] += block.sA / seeds;
      meanS_B[pos] += block.sB / seeds;
      meanC[pos] += block.cOO / seeds;
    }
  }

  // Counting statistics are Poissonian, so the standard error of the mean
  // over `seeds` independent runs is sqrt(value / seeds).
  std::vector<ReportRow> rows;
  RowBuilder out(rows);
  const double invSqrtSeeds = 1.0 / std::sqrt(static_cast<double>(seeds));
  for (SettingCombo combo : kSequence) {
    const std::size_t pos = static_cast<std::size_t>(sequence_position(combo));
    const CountsBlock& expect = model.observed.block(combo);
    const std::string tag = combo_label(combo);
    out.abs("sim/sA/" + tag, expect.sA, meanS_A[pos],
            3.0 * std::sqrt(expect.sA) * invSqrtSeeds);
    out.abs("sim/sB/" + tag, expect.sB, meanS_B[pos],
            3.0 * std::sqrt(expect.sB) * invSqrtSeeds);
    out.abs("sim/cOO/" + tag, expect.cOO, meanC[pos],
            3.0 * std::sqrt(expect.cOO) * invSqrtSeeds);
  }
  // The a2b2 coincidences specifically pin down the accidental estimate: the
  // genuine rate alone sits far more than 3 sigma below the observed value.
  {
    const std::size_t pos =
        static_cast<std::size_t>(sequence_position(SettingCombo::A2B2));
    const double raw = model.raw[pos].cOO;
    const double obs = model.observed.block(SettingCombo::A2B2).cOO;
    out.range("sim/accidentals/a2b2-excess", obs - raw, meanC[pos] - raw,
              (obs - raw) - 3.0 * std::sqrt(obs) * invSqrtSeeds,
              (obs - raw) + 3.0 * std::sqrt(obs) * invSqrtSeeds,
              ValueFormat::Count);
  }
  return rows;
}

std::vector<ReportRow> lhv_demo_checks(std::uint64_t seed) {
  // Flat profile except 10% fewer emissions while a2b2 is selected.
  IntensityProfile profile;
  profile.g[static_cast<std::size_t>(
      sequence_position(SettingCombo::A2B2))] = 0.9;
  const LhvStrategy strategy = LhvStrategy::always_pass(profile);
  const ExperimentConfig cfg = reference_config();
  const Schedule schedule = Schedule::uniform(5, 60.0);

  const std::vector<RoundData> rounds =
      simulate_lhv_experiment(strategy, cfg.r0, schedule, SimSeed{seed});
  const RoundData total = sum_rounds(rounds);
  const double j = eberhard_j(total);
  const double sigma = eberhard_j_sigma(total);

  const NormalizationPath& path = NormalizationPath::standard();
  const double jNorm =
      normalize_total(rounds, path, BaselinePolicy::smallest_f());
  const double sigmaNorm = eberhard_j_sigma(
      normalize_round(total, compute_factors(total, path,
                                             BaselinePolicy::smallest_f())));

  std::vector<ReportRow> rows;
  RowBuilder out(rows);
  out.add("lhv/raw-J-significance", -5.0, j / sigma, j / sigma <= -5.0,
          ValueFormat::Plain);
  out.add("lhv/normalized-J", 0.0, jNorm, std::abs(jNorm) <= 3.0 * sigmaNorm,
          ValueFormat::Count);
  return rows;
}

}  // namespace bell
