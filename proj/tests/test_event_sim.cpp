#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "bell/event_sim.hpp"
#include "bell/fixtures.hpp"
#include "bell/inequality.hpp"

using namespace bell;

TEST_CASE("generator is deterministic and well distributed") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c(43);
  CHECK(Rng(42).next_u64() != c.next_u64());

  Rng u(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = u.next_unit();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));

  Rng e(11);
  double esum = 0.0;
  for (int i = 0; i < 20000; ++i) esum += e.next_exp(4.0);
  CHECK(esum / 20000 == doctest::Approx(0.25).epsilon(0.05));
  CHECK_THROWS_AS(e.next_exp(0.0), std::invalid_argument);
}

TEST_CASE("block seeds separate blocks and masters") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t m : {1ULL, 2ULL, 99ULL})
    for (std::uint64_t i = 0; i < 20; ++i)
      seeds.insert(block_seed(SimSeed{m}, i));
  CHECK(seeds.size() == 60);
  CHECK(block_seed(SimSeed{5}, 3) == block_seed(SimSeed{5}, 3));
}

TEST_CASE("block id round trip") {
  CHECK(block_id(1, SettingCombo::A1B1) == "r1:a1b1");
  CHECK(block_id(12, SettingCombo::A2B1) == "r12:a2b1");
  const auto [round, combo] = parse_block_id("r3:a2b2");
  CHECK(round == 3);
  CHECK(combo == SettingCombo::A2B2);
  CHECK_THROWS_AS(parse_block_id("x3:a2b2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_block_id("r3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_block_id("r0:a1b1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_block_id("r3:a9b9"), std::invalid_argument);
}

TEST_CASE("coincidence window matching") {
  auto stream = [](std::initializer_list<std::int64_t> times, Party p) {
    EventStream s;
    for (std::int64_t t : times) s.push_back({t, p, 1, SettingCombo::A1B1});
    return s;
  };
  const double tauC = 180e-9;  // half-window 90 ns

  CHECK(count_coincidences(stream({0}, Party::A), stream({50}, Party::B),
                           tauC) == 1);
  CHECK(count_coincidences(stream({0}, Party::A), stream({90}, Party::B),
                           tauC) == 1);  // boundary included
  CHECK(count_coincidences(stream({0}, Party::A), stream({91}, Party::B),
                           tauC) == 0);
  CHECK(count_coincidences(stream({0}, Party::A), stream({-90}, Party::B),
                           tauC) == 1);
  // Each click is consumed at most once.
  CHECK(count_coincidences(stream({0, 10}, Party::A),
                           stream({0, 10}, Party::B), tauC) == 2);
  CHECK(count_coincidences(stream({0}, Party::A), stream({-50, 40}, Party::B),
                           tauC) == 1);
  CHECK(count_coincidences(stream({0, 200, 400}, Party::A),
                           stream({50, 250}, Party::B), tauC) == 2);
  CHECK(count_coincidences({}, stream({0}, Party::B), tauC) == 0);

  CHECK_THROWS_AS(count_coincidences(stream({100, 0}, Party::A),
                                     stream({0}, Party::B), tauC),
                  std::invalid_argument);
  CHECK_THROWS_AS(count_coincidences({}, {}, 0.0), std::invalid_argument);
}

TEST_CASE("block simulation is deterministic and statistically sound") {
  ExperimentConfig cfg = reference_config();
  cfg.t = 5.0;

  const std::uint64_t seed = block_seed(SimSeed{1}, 0);
  const auto [a1, b1] =
      simulate_quantum_block(cfg, SettingCombo::A1B2, 5.0, 1.0, seed);
  const auto [a2, b2] =
      simulate_quantum_block(cfg, SettingCombo::A1B2, 5.0, 1.0, seed);
  CHECK(a1 == a2);
  CHECK(b1 == b2);
  CHECK(std::is_sorted(a1.begin(), a1.end(),
                       [](const EventRecord& l, const EventRecord& r) {
                         return l.timeNs < r.timeNs;
                       }));

  // Expected counts at 5 s: scale the analytic 300 s singles by 1/60.
  const ModelPrediction model = predict_counts(reference_config());
  const double expA =
      model.observed.block(SettingCombo::A1B2).sA * 5.0 / 300.0;
  const double expB =
      model.observed.block(SettingCombo::A1B2).sB * 5.0 / 300.0;
  CHECK(std::abs(static_cast<double>(a1.size()) - expA) <
        5.0 * std::sqrt(expA));
  CHECK(std::abs(static_cast<double>(b1.size()) - expB) <
        5.0 * std::sqrt(expB));

  const double expC =
      model.observed.block(SettingCombo::A1B2).cOO * 5.0 / 300.0;
  const double got =
      static_cast<double>(count_coincidences(a1, b1, cfg.tauC));
  CHECK(std::abs(got - expC) < 5.0 * std::sqrt(expC));
}

TEST_CASE("intensity rescaling commutes with the base rate") {
  // g = 2 at half the pair rate consumes the identical random stream, so the
  // events are bit-for-bit the same.
  ExperimentConfig full = reference_config();
  full.t = 2.0;
  ExperimentConfig half = full;
  half.r0 = full.r0 / 2.0;

  const std::uint64_t seed = block_seed(SimSeed{9}, 5);
  const auto [af, bf] =
      simulate_quantum_block(full, SettingCombo::A2B1, 2.0, 1.0, seed);
  const auto [ah, bh] =
      simulate_quantum_block(half, SettingCombo::A2B1, 2.0, 2.0, seed);
  CHECK(af == ah);
  CHECK(bf == bh);
}

TEST_CASE("dark-count-only streams show the accidental rate") {
  ExperimentConfig cfg = reference_config();
  cfg.r0 = 0.0;
  cfg.zeta = 10000.0;
  cfg.t = 30.0;

  const auto [a, b] = simulate_quantum_block(cfg, SettingCombo::A1B1, 30.0,
                                             1.0, block_seed(SimSeed{3}, 0));
  const double expSingles = cfg.zeta * cfg.t;
  CHECK(std::abs(static_cast<double>(a.size()) - expSingles) <
        5.0 * std::sqrt(expSingles));

  // Independent streams coincide at very nearly sA sB tauC / T.
  const double expAcc = static_cast<double>(a.size()) *
                        static_cast<double>(b.size()) * cfg.tauC / cfg.t;
  const double got = static_cast<double>(count_coincidences(a, b, cfg.tauC));
  CHECK(std::abs(got - expAcc) < 5.0 * std::sqrt(expAcc) + 5.0);
}

TEST_CASE("drift thinning halves the rate for a flat half-drift") {
  ExperimentConfig cfg = reference_config();
  cfg.zeta = 0.0;
  cfg.t = 5.0;
  BlockOptions opts;
  opts.drift = [](double) { return 0.5; };
  opts.driftMax = 1.0;
  const auto [a, b] = simulate_quantum_block(cfg, SettingCombo::A2B2, 5.0,
                                             1.0, block_seed(SimSeed{4}, 1),
                                             opts);
  ExperimentConfig halfCfg = cfg;
  halfCfg.r0 = cfg.r0 / 2.0;
  const auto [ah, bh] = simulate_quantum_block(
      halfCfg, SettingCombo::A2B2, 5.0, 1.0, block_seed(SimSeed{4}, 2));
  const double nA = static_cast<double>(a.size());
  const double nAh = static_cast<double>(ah.size());
  CHECK(std::abs(nA - nAh) < 5.0 * std::sqrt(nA + nAh));

  BlockOptions bad;
  bad.drift = [](double) { return 2.0; };
  bad.driftMax = 1.0;
  CHECK_THROWS_AS(simulate_quantum_block(cfg, SettingCombo::A1B1, 1.0, 1.0, 1,
                                         bad),
                  std::invalid_argument);
}

TEST_CASE("experiment simulation fills every block consistently") {
  ExperimentConfig cfg = reference_config();
  cfg.t = 1.0;
  const Schedule schedule = Schedule::uniform(2, 1.0);
  const SimulatedExperiment sim =
      simulate_experiment(cfg, schedule, {}, SimSeed{21}, true);
  REQUIRE(sim.rounds.size() == 2);
  CHECK_FALSE(sim.events.empty());

  for (std::uint32_t round = 1; round <= 2; ++round) {
    for (SettingCombo combo : kSequence) {
      const auto [a, b] = split_block(sim.events, round, combo);
      const CountsBlock& block = sim.rounds[round - 1].block(combo);
      CHECK(static_cast<double>(a.size()) == block.sA);
      CHECK(static_cast<double>(b.size()) == block.sB);
      CHECK(static_cast<double>(count_coincidences(a, b, cfg.tauC)) ==
            block.cOO);
    }
  }

  const SimulatedExperiment again =
      simulate_experiment(cfg, schedule, {}, SimSeed{21}, true);
  CHECK(again.rounds == sim.rounds);
  CHECK(again.events == sim.events);
  const SimulatedExperiment other =
      simulate_experiment(cfg, schedule, {}, SimSeed{22});
  CHECK(other.rounds != sim.rounds);
}

TEST_CASE("profile multiplier suppresses one combination") {
  ExperimentConfig cfg = reference_config();
  cfg.zeta = 0.0;
  cfg.t = 5.0;
  IntensityProfile profile;
  profile.g[static_cast<std::size_t>(
      sequence_position(SettingCombo::A2B2))] = 0.5;
  const SimulatedExperiment sim = simulate_experiment(
      cfg, Schedule::uniform(1, 5.0), profile, SimSeed{31});
  const double sFull = sim.rounds[0].block(SettingCombo::A2B1).sA;
  const double sHalf = sim.rounds[0].block(SettingCombo::A2B2).sA;
  CHECK(sHalf / sFull == doctest::Approx(0.5).epsilon(0.05));

  IntensityProfile bad;
  bad.g[0] = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::uniform(0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::uniform(2, 0.0), std::invalid_argument);
}

TEST_CASE("always-pass local source tallies equal counts") {
  const LhvStrategy strategy = LhvStrategy::always_pass();
  const std::vector<RoundData> rounds =
      simulate_lhv_experiment(strategy, 50000.0, Schedule::uniform(2, 2.0),
                              SimSeed{8});
  REQUIRE(rounds.size() == 2);
  for (const RoundData& round : rounds) {
    for (SettingCombo combo : kSequence) {
      const CountsBlock& block = round.block(combo);
      CHECK(block.sA == block.cOO);
      CHECK(block.sB == block.cOO);
      CHECK(block.cOO > 0.0);
    }
    // With singles equal to coincidences, J collapses to C22 - C11.
    CHECK(eberhard_j(round) ==
          doctest::Approx(round.block(SettingCombo::A2B2).cOO -
                          round.block(SettingCombo::A1B1).cOO));
  }

  const std::vector<RoundData> again =
      simulate_lhv_experiment(strategy, 50000.0, Schedule::uniform(2, 2.0),
                              SimSeed{8});
  CHECK(again == rounds);
}

TEST_CASE("deterministic outcome tables gate the tallies") {
  // Alice fails at alpha2 regardless of the hidden variable.
  LhvStrategy strategy;
  strategy.tables.emplace_back(1.0, LhvOutcomeTable{{true, false},
                                                    {true, true}});
  const std::vector<RoundData> rounds = simulate_lhv_experiment(
      strategy, 20000.0, Schedule::uniform(1, 1.0), SimSeed{5});
  const RoundData& round = rounds[0];
  CHECK(round.block(SettingCombo::A1B1).sA > 0.0);
  CHECK(round.block(SettingCombo::A2B2).sA == 0.0);
  CHECK(round.block(SettingCombo::A2B2).cOO == 0.0);
  CHECK(round.block(SettingCombo::A2B1).sB > 0.0);

  LhvStrategy bad;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.tables.emplace_back(0.4, LhvOutcomeTable{});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // weights != 1

  // A fair mixture splits the singles between the tables.
  LhvStrategy mix;
  mix.tables.emplace_back(0.5, LhvOutcomeTable{{true, true}, {true, true}});
  mix.tables.emplace_back(0.5, LhvOutcomeTable{{false, false}, {true, true}});
  const std::vector<RoundData> mixed = simulate_lhv_experiment(
      mix, 50000.0, Schedule::uniform(1, 2.0), SimSeed{6});
  const CountsBlock& block = mixed[0].block(SettingCombo::A1B1);
  CHECK(block.sA / block.sB == doctest::Approx(0.5).epsilon(0.05));
}
