#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "bell/model.hpp"

namespace bell {

// xoshiro256** seeded through splitmix64. Self-contained so that event
// streams are bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double next_unit();               // uniform in [0, 1), 53-bit
  double next_exp(double rate);     // exponential waiting time, mean 1/rate

 private:
  std::array<std::uint64_t, 4> state_;
};

// Identifier recorded in dataset metadata so streams can be regenerated.
inline constexpr const char* kRngAlgorithm =
    "xoshiro256** / splitmix64 block substreams, v1";

struct SimSeed {
  std::uint64_t master = 1;
};

// Substream seed for block number `blockIndex` (rounds * 4 + sequence
// position): splitmix64(splitmix64(master) XOR splitmix64(blockIndex + 1)).
std::uint64_t block_seed(SimSeed seed, std::uint64_t blockIndex);

// A single detector click.
struct EventRecord {
  std::int64_t timeNs = 0;  // nanoseconds from block start
  Party party = Party::A;
  std::uint32_t round = 1;  // 1-based, part of the block id
  SettingCombo combo = SettingCombo::A1B1;

  bool operator==(const EventRecord&) const = default;
};

using EventStream = std::vector<EventRecord>;  // sorted by timeNs

std::string block_id(std::uint32_t round, SettingCombo combo);  // "r1:a1b1"
std::pair<std::uint32_t, SettingCombo> parse_block_id(const std::string& id);

// Production-rate profile: a per-combination multiplier plus an optional
// smooth drift d(t) in absolute experiment time, bounded by driftMax.
struct IntensityProfile {
  std::array<double, 4> g = {1.0, 1.0, 1.0, 1.0};  // sequence order
  std::function<double(double)> drift;             // nullptr = constant 1
  double driftMax = 1.0;

  double multiplier(SettingCombo c) const { return g[sequence_position(c)]; }
  void validate() const;
};

// Measurement plan: `rounds` passes over the four combinations in sequence
// order, with a duration per combination.
struct Schedule {
  int rounds = 0;
  std::array<double, 4> durations{};  // seconds, sequence order

  static Schedule uniform(int rounds, double secondsPerBlock);
  void validate() const;
};

struct BlockOptions {
  std::uint32_t round = 1;
  double timeOffset = 0.0;                  // block start in experiment time
  std::function<double(double)> drift;      // d(t) <= driftMax, thinned
  double driftMax = 1.0;
};

// Samples one measurement block from the quantum model: pair emissions as a
// Poisson process at rate g * R0 (times the drift), joint polarizer outcomes
// from the state, independent detection with etaA/etaB, plus dark counts at
// rate zeta per party. Both photons of a pair share the emission timestamp.
std::pair<EventStream, EventStream> simulate_quantum_block(
    const ExperimentConfig& cfg, SettingCombo combo, double duration, double g,
    std::uint64_t seed, const BlockOptions& opts = {});

// Greedy window matching: scanning in time order, each A click is matched to
// the earliest unmatched B click with |tA - tB| <= tauC/2; every click is
// consumed at most once. Streams must be time-sorted.
std::int64_t count_coincidences(const EventStream& a, const EventStream& b,
                                double tauC);

struct SimulatedExperiment {
  std::vector<RoundData> rounds;
  std::vector<EventRecord> events;  // filled only when keepEvents is set
};

SimulatedExperiment simulate_experiment(const ExperimentConfig& cfg,
                                        const Schedule& schedule,
                                        const IntensityProfile& profile,
                                        SimSeed seed, bool keepEvents = false);

// Deterministic local-realist outcome table: pass/fail per party per setting.
struct LhvOutcomeTable {
  std::array<bool, 2> aPass = {true, true};  // alpha1, alpha2
  std::array<bool, 2> bPass = {true, true};  // beta1, beta2
};

// Mixture of outcome tables plus a (possibly setting-dependent) production
// profile. Detection of a "pass" outcome is perfect; losses belong in the
// tables themselves.
struct LhvStrategy {
  std::vector<std::pair<double, LhvOutcomeTable>> tables;
  IntensityProfile profile;

  static LhvStrategy always_pass(IntensityProfile profile = {});
  void validate() const;
};

std::vector<RoundData> simulate_lhv_experiment(const LhvStrategy& strategy,
                                               double baseRate,
                                               const Schedule& schedule,
                                               SimSeed seed);

}  // namespace bell
