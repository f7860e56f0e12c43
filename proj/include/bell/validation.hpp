#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bell/fixtures.hpp"

namespace bell {

enum class ValueFormat { Count, Percent, Plain };

// One line of a report: a value, optionally a model value to compare with, a
// relative deviation and a tolerance verdict. deviation is present exactly
// when both values are.
struct ReportRow {
  std::string label;
  double dataValue = 0.0;
  std::optional<double> modelValue;
  std::optional<double> deviation;  // (model - data) / |data|
  std::optional<bool> pass;
  ValueFormat format = ValueFormat::Count;

  bool operator==(const ReportRow&) const = default;
};

std::string rows_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(const std::string& text);

std::string render_rows(const std::vector<ReportRow>& rows);
bool all_passed(const std::vector<ReportRow>& rows);

// Checks every published reference value against this artifact's pipelines,
// computed from `dataset` (normally the builtin record) and the reference
// parameters. dataValue holds the published number, modelValue the computed
// one; pass applies the per-quantity tolerance.
std::vector<ReportRow> reference_checks(const Dataset& dataset);

// Empirical cross-check of the count model, including the accidental
// estimate: mean simulated counts over `seeds` seeds at `secondsPerBlock`
// per block must stay within 3 standard errors of the analytic values.
std::vector<ReportRow> simulation_checks(int seeds = 10,
                                         double secondsPerBlock = 30.0,
                                         std::uint64_t firstSeed = 1);

// Production-rate conspiracy demonstration: an always-pass local-realist
// source emitting 10% fewer pairs at a2b2 fakes a strong violation in raw J;
// drift normalization restores J' to 0.
std::vector<ReportRow> lhv_demo_checks(std::uint64_t seed = 1);

}  // namespace bell
