#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bell/fixtures.hpp"
#include "bell/inequality.hpp"

using namespace bell;

TEST_CASE("published per-round Eberhard values are exact") {
  const Dataset ds = builtin_paper_dataset();
  const double expected[5] = {-27985, -25032, -24279, -24597, -24822};
  REQUIRE(ds.rounds.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(eberhard_j(ds.rounds[i]) == expected[i]);
  CHECK(eberhard_j(ds.accumulated()) == -126715.0);
  CHECK(eberhard_j(*ds.totals) == -126715.0);
}

TEST_CASE("J is linear in the counts") {
  const RoundData round = builtin_paper_dataset().rounds[0];
  const double j = eberhard_j(round);
  CHECK(eberhard_j(scale_round(round, 2.5)) ==
        doctest::Approx(2.5 * j).epsilon(1e-12));
  CHECK(eberhard_j(scale_round(round, 0.0)) == 0.0);

  // Additivity: the accumulated J equals the sum of the per-round values.
  const Dataset ds = builtin_paper_dataset();
  double sum = 0.0;
  for (const RoundData& r : ds.rounds) sum += eberhard_j(r);
  CHECK(eberhard_j(ds.accumulated()) == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("J sign for simple count patterns") {
  // All counts concentrated in C(a1b1) drive J negative; all in C(a2b2)
  // drive it positive.
  RoundData negative;
  negative.block(SettingCombo::A1B1).cOO = 100;
  negative.block(SettingCombo::A1B1).sA = 100;
  negative.block(SettingCombo::A1B1).sB = 100;
  CHECK(eberhard_j(negative) == -100.0);

  RoundData positive;
  positive.block(SettingCombo::A2B2).cOO = 100;
  positive.block(SettingCombo::A2B2).sA = 100;
  positive.block(SettingCombo::A2B2).sB = 100;
  CHECK(eberhard_j(positive) == 100.0);
}

TEST_CASE("sigma propagates the independent Poisson terms") {
  RoundData round;
  round.block(SettingCombo::A1B2).sA = 500;
  round.block(SettingCombo::A1B2).cOO = 100;
  round.block(SettingCombo::A2B1).sB = 300;
  round.block(SettingCombo::A2B1).cOO = 50;
  round.block(SettingCombo::A2B2).cOO = 25;
  round.block(SettingCombo::A1B1).cOO = 75;
  // var = (500-100) + (300-50) + 25 + 75 = 750
  CHECK(eberhard_j_sigma(round) == doctest::Approx(std::sqrt(750.0)));

  const RoundData total = builtin_paper_dataset().accumulated();
  const double sigma = eberhard_j_sigma(total);
  CHECK(sigma > 0.0);
  // The published violation is far beyond statistical fluctuation.
  CHECK(eberhard_j(total) / sigma < -50.0);
}

TEST_CASE("series statistics match the published round summary") {
  const Dataset ds = builtin_paper_dataset();
  std::vector<double> js;
  for (const RoundData& r : ds.rounds) js.push_back(eberhard_j(r));
  const SeriesStats stats = series_stats(js);
  CHECK(stats.n == 5);
  CHECK(stats.sum == -126715.0);
  CHECK(stats.mean == doctest::Approx(-25343.0).epsilon(1e-12));
  REQUIRE(stats.sampleStdDev.has_value());
  CHECK(*stats.sampleStdDev == doctest::Approx(1503.075015).epsilon(1e-9));
}

TEST_CASE("series statistics edge cases") {
  const std::vector<double> one = {4.0};
  const SeriesStats s = series_stats(one);
  CHECK(s.sum == 4.0);
  CHECK(s.mean == 4.0);
  CHECK_FALSE(s.sampleStdDev.has_value());

  const std::vector<double> quad = {1.0, 2.0, 3.0, 4.0};
  const SeriesStats q = series_stats(quad);
  CHECK(q.sum == 10.0);
  CHECK(*q.sampleStdDev == doctest::Approx(std::sqrt(5.0 / 3.0)));

  CHECK_THROWS_AS(series_stats({}), std::invalid_argument);
}

TEST_CASE("singles deviations reproduce the accumulated drift table") {
  const SinglesDeviationTable d =
      singles_deviations(builtin_paper_dataset().accumulated());
  CHECK(d.dA1 == doctest::Approx(-0.0024577219).epsilon(1e-7));
  CHECK(d.dA2 == doctest::Approx(-0.0011989324).epsilon(1e-7));
  CHECK(d.dB1 == doctest::Approx(-0.0036255479).epsilon(1e-7));
  CHECK(d.dB2 == doctest::Approx(-0.0018346767).epsilon(1e-7));
}

TEST_CASE("poisson fluctuation scale") {
  CHECK(poisson_relative_fluctuation(1522865) ==
        doctest::Approx(0.0008103438).epsilon(1e-7));
  CHECK(poisson_relative_fluctuation(4729369) ==
        doctest::Approx(0.0004598312).epsilon(1e-7));
  CHECK(poisson_relative_fluctuation(100.0) == doctest::Approx(0.1));
  CHECK_THROWS_AS(poisson_relative_fluctuation(0.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_relative_fluctuation(-5.0), std::invalid_argument);
}
