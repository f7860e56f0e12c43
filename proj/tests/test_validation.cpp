#include <doctest.h>

#include <cmath>
#include <set>

#include "bell/validation.hpp"

using namespace bell;

TEST_CASE("reference checks all pass on the builtin record") {
  const std::vector<ReportRow> rows =
      reference_checks(builtin_paper_dataset());
  CHECK(rows.size() > 70);
  CHECK(all_passed(rows));

  std::set<std::string> labels;
  for (const ReportRow& row : rows) {
    CHECK(row.pass.has_value());
    CHECK(row.modelValue.has_value());
    CHECK(row.deviation.has_value());
    CHECK(labels.insert(row.label).second);  // labels are unique
  }
  CHECK(labels.count("table1/model/J") == 1);
  CHECK(labels.count("table3/Jprime/round5") == 1);
  CHECK(labels.count("variants/total/J") == 1);
  CHECK(labels.count("accidentals/fraction/a2b2") == 1);
}

TEST_CASE("reference checks notice corrupted data") {
  Dataset ds = builtin_paper_dataset();
  ds.rounds[2].block(SettingCombo::A2B2).cOO += 1000.0;
  ds.totals->block(SettingCombo::A2B2).cOO += 1000.0;
  const std::vector<ReportRow> rows = reference_checks(ds);
  CHECK_FALSE(all_passed(rows));

  bool roundJFailed = false;
  for (const ReportRow& row : rows)
    if (row.label == "table3/J/round3" && row.pass && !*row.pass)
      roundJFailed = true;
  CHECK(roundJFailed);
}

TEST_CASE("report rows round-trip through JSON") {
  std::vector<ReportRow> rows;
  rows.push_back({"with-model", -126715.0, -120191.0, 0.0514799, true,
                  ValueFormat::Count});
  rows.push_back({"bare", 42.5, std::nullopt, std::nullopt, std::nullopt,
                  ValueFormat::Percent});
  rows.push_back({"verdict-only", 1.25, std::nullopt, std::nullopt, false,
                  ValueFormat::Plain});

  const std::vector<ReportRow> back = rows_from_json(rows_to_json(rows));
  CHECK(back == rows);

  const std::vector<ReportRow> real =
      reference_checks(builtin_paper_dataset());
  CHECK(rows_from_json(rows_to_json(real)) == real);
}

TEST_CASE("report row invariant is enforced") {
  ReportRow broken{"bad", 1.0, std::nullopt, 0.5, std::nullopt,
                   ValueFormat::Plain};
  CHECK_THROWS_AS(rows_to_json({broken}), std::invalid_argument);
  CHECK_THROWS_AS(
      rows_from_json(R"([{"label":"x","dataValue":1,"deviation":0.5}])"),
      std::invalid_argument);
  CHECK_THROWS_AS(rows_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(rows_from_json("not json"), std::invalid_argument);
}

TEST_CASE("rendering shows verdicts and formats") {
  std::vector<ReportRow> rows;
  rows.push_back({"f/total/a1b1", 100.43, 100.4306, 0.0000059, true,
                  ValueFormat::Percent});
  rows.push_back({"J/sum", -126715.0, std::nullopt, std::nullopt,
                  std::nullopt, ValueFormat::Count});
  const std::string text = render_rows(rows);
  CHECK(text.find("f/total/a1b1") != std::string::npos);
  CHECK(text.find("100.43%") != std::string::npos);
  CHECK(text.find("-126715") != std::string::npos);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("simulation checks are deterministic in their seeds") {
  const std::vector<ReportRow> a = simulation_checks(2, 2.0, 5);
  const std::vector<ReportRow> b = simulation_checks(2, 2.0, 5);
  CHECK(a == b);
  CHECK(a.size() == 13);
  const std::vector<ReportRow> c = simulation_checks(2, 2.0, 6);
  CHECK(a != c);
}

TEST_CASE("local-realist demonstration rows") {
  const std::vector<ReportRow> rows = lhv_demo_checks(3);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == "lhv/raw-J-significance");
  // The conspiratorial suppression fakes a violation far beyond 5 sigma...
  CHECK(*rows[0].modelValue < -5.0);
  CHECK(*rows[0].pass);
  // ...and normalization wipes it out (to rounding) for an always-pass
  // source: the correction factors are exactly proportional to the tallies.
  CHECK(std::abs(*rows[1].modelValue) < 1e-6);
  CHECK(*rows[1].pass);
}
