#include "bell/event_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bell {
namespace {

constexpr double kNsPerSecond = 1e9;

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// One splitmix64 step; also used as a standalone 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t x) { return splitmix64(x); }

std::int64_t to_ns(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * kNsPerSecond));
}

// Homogeneous Poisson click train on [0, duration), already time-sorted.
EventStream poisson_train(Rng& rng, double rate, double duration, Party party,
                          std::uint32_t round, SettingCombo combo) {
  EventStream out;
  if (rate <= 0.0) return out;
  double t = rng.next_exp(rate);
  while (t < duration) {
    out.push_back({to_ns(t), party, round, combo});
    t += rng.next_exp(rate);
  }
  return out;
}

void merge_by_time(EventStream& into, const EventStream& other) {
  EventStream merged;
  merged.reserve(into.size() + other.size());
  std::merge(into.begin(), into.end(), other.begin(), other.end(),
             std::back_inserter(merged),
             [](const EventRecord& l, const EventRecord& r) {
               return l.timeNs < r.timeNs;
             });
  into = std::move(merged);
}

struct OutcomeProbs {
  double oo, oe, eo;  // ee is the remainder
};

OutcomeProbs joint_outcome_probs(const ExperimentConfig& cfg,
                                 SettingCombo combo) {
  const DensityMatrix rho = build_state(cfg.state);
  const Eigen::Matrix2d pa = polarizer_projector(cfg.alpha(combo));
  const Eigen::Matrix2d pb = polarizer_projector(cfg.beta(combo));
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();

  auto prob = [&rho](const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
    Eigen::Matrix4cd op = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        op.block<2, 2>(2 * i, 2 * j) = a(i, j) * b.cast<std::complex<double>>();
    return (rho * op).trace().real();
  };

  return {prob(pa, pb), prob(pa, id - pb), prob(id - pa, pb)};
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& word : state_) word = splitmix64(seed);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_exp(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential rate must be > 0");
  return -std::log1p(-next_unit()) / rate;
}

std::uint64_t block_seed(SimSeed seed, std::uint64_t blockIndex) {
  // The blockIndex-th output of a splitmix64 stream started at the mixed
  // master. The mixer is bijective, so blocks of one master never collide;
  // XOR-combining the two inputs instead would cancel whenever master and
  // index swap or coincide.
  std::uint64_t state =
      mix(seed.master) + (blockIndex + 1) * 0x9e3779b97f4a7c15ULL;
  return splitmix64(state);
}

std::string block_id(std::uint32_t round, SettingCombo combo) {
  return "r" + std::to_string(round) + ":" + combo_label(combo);
}

std::pair<std::uint32_t, SettingCombo> parse_block_id(const std::string& id) {
  const auto colon = id.find(':');
  if (id.size() < 4 || id[0] != 'r' || colon == std::string::npos)
    throw std::invalid_argument("malformed block id: " + id);
  const std::string roundPart = id.substr(1, colon - 1);
  if (roundPart.empty() ||
      roundPart.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("malformed block id: " + id);
  const unsigned long round = std::stoul(roundPart);
  if (round == 0) throw std::invalid_argument("block round must be >= 1");
  return {static_cast<std::uint32_t>(round),
          combo_from_label(id.substr(colon + 1))};
}

void IntensityProfile::validate() const {
  for (double gi : g)
    if (!(gi > 0.0))
      throw std::invalid_argument("intensity multipliers must be > 0");
  if (!(driftMax > 0.0))
    throw std::invalid_argument("driftMax must be > 0");
}

Schedule Schedule::uniform(int rounds, double secondsPerBlock) {
  Schedule s;
  s.rounds = rounds;
  s.durations.fill(secondsPerBlock);
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (rounds <= 0) throw std::invalid_argument("schedule needs >= 1 round");
  for (double d : durations)
    if (!(d > 0.0))
      throw std::invalid_argument("block durations must be > 0");
}

std::pair<EventStream, EventStream> simulate_quantum_block(
    const ExperimentConfig& cfg, SettingCombo combo, double duration, double g,
    std::uint64_t seed, const BlockOptions& opts) {
  cfg.validate();
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (!(g > 0.0)) throw std::invalid_argument("intensity g must be > 0");
  if (!(opts.driftMax > 0.0))
    throw std::invalid_argument("driftMax must be > 0");

  const OutcomeProbs p = joint_outcome_probs(cfg, combo);
  Rng rng(seed);

  EventStream a;
  EventStream b;
  // Candidate emissions at the drift envelope rate, thinned down to d(t).
  const double envelopeRate =
      g * cfg.r0 * (opts.drift ? opts.driftMax : 1.0);
  if (envelopeRate > 0.0) {
    double t = rng.next_exp(envelopeRate);
    while (t < duration) {
      bool emit = true;
      if (opts.drift) {
        const double d = opts.drift(opts.timeOffset + t);
        if (d < 0.0 || d > opts.driftMax)
          throw std::invalid_argument("drift value outside [0, driftMax]");
        emit = rng.next_unit() < d / opts.driftMax;
      }
      if (emit) {
        const double u = rng.next_unit();
        const bool aPass = u < p.oo + p.oe;
        const bool bPass = u < p.oo || (u >= p.oo + p.oe && u < p.oo + p.oe + p.eo);
        if (aPass && rng.next_unit() < cfg.etaA)
          a.push_back({to_ns(t), Party::A, opts.round, combo});
        if (bPass && rng.next_unit() < cfg.etaB)
          b.push_back({to_ns(t), Party::B, opts.round, combo});
      }
      t += rng.next_exp(envelopeRate);
    }
  }

  merge_by_time(a, poisson_train(rng, cfg.zeta, duration, Party::A,
                                 opts.round, combo));
  merge_by_time(b, poisson_train(rng, cfg.zeta, duration, Party::B,
                                 opts.round, combo));
  return {std::move(a), std::move(b)};
}

std::int64_t count_coincidences(const EventStream& a, const EventStream& b,
                                double tauC) {
  if (!(tauC > 0.0))
    throw std::invalid_argument("coincidence window must be > 0");
  auto sorted = [](const EventStream& s) {
    return std::is_sorted(s.begin(), s.end(),
                          [](const EventRecord& l, const EventRecord& r) {
                            return l.timeNs < r.timeNs;
                          });
  };
  if (!sorted(a) || !sorted(b))
    throw std::invalid_argument("event streams must be time-sorted");

  const std::int64_t half = to_ns(tauC / 2.0);
  std::int64_t count = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const std::int64_t dt = b[j].timeNs - a[i].timeNs;
    if (dt < -half) {
      ++j;
    } else if (dt > half) {
      ++i;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

SimulatedExperiment simulate_experiment(const ExperimentConfig& cfg,
                                        const Schedule& schedule,
                                        const IntensityProfile& profile,
                                        SimSeed seed, bool keepEvents) {
  cfg.validate();
  schedule.validate();
  profile.validate();

  SimulatedExperiment result;
  result.rounds.resize(static_cast<std::size_t>(schedule.rounds));
  double offset = 0.0;
  for (int r = 0; r < schedule.rounds; ++r) {
    for (int pos = 0; pos < 4; ++pos) {
      const SettingCombo combo = kSequence[static_cast<std::size_t>(pos)];
      const double duration = schedule.durations[static_cast<std::size_t>(pos)];
      BlockOptions opts;
      opts.round = static_cast<std::uint32_t>(r + 1);
      opts.timeOffset = offset;
      opts.drift = profile.drift;
      opts.driftMax = profile.driftMax;
      const std::uint64_t bseed =
          block_seed(seed, static_cast<std::uint64_t>(r) * 4 +
                               static_cast<std::uint64_t>(pos));
      auto [streamA, streamB] = simulate_quantum_block(
          cfg, combo, duration, profile.multiplier(combo), bseed, opts);

      CountsBlock& block = result.rounds[static_cast<std::size_t>(r)]
                               .block(combo);
      block.sA = static_cast<double>(streamA.size());
      block.sB = static_cast<double>(streamB.size());
      block.cOO =
          static_cast<double>(count_coincidences(streamA, streamB, cfg.tauC));

      if (keepEvents) {
        merge_by_time(streamA, streamB);
        result.events.insert(result.events.end(), streamA.begin(),
                             streamA.end());
      }
      offset += duration;
    }
  }
  return result;
}

LhvStrategy LhvStrategy::always_pass(IntensityProfile profile) {
  LhvStrategy s;
  s.tables.emplace_back(1.0, LhvOutcomeTable{});
  s.profile = std::move(profile);
  return s;
}

void LhvStrategy::validate() const {
  if (tables.empty())
    throw std::invalid_argument("LHV strategy needs at least one table");
  double total = 0.0;
  for (const auto& [weight, table] : tables) {
    if (!(weight > 0.0))
      throw std::invalid_argument("LHV table weights must be > 0");
    total += weight;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("LHV table weights must sum to 1");
  profile.validate();
}

std::vector<RoundData> simulate_lhv_experiment(const LhvStrategy& strategy,
                                               double baseRate,
                                               const Schedule& schedule,
                                               SimSeed seed) {
  strategy.validate();
  schedule.validate();
  if (!(baseRate > 0.0)) throw std::invalid_argument("baseRate must be > 0");

  std::vector<RoundData> rounds(static_cast<std::size_t>(schedule.rounds));
  double offset = 0.0;
  for (int r = 0; r < schedule.rounds; ++r) {
    for (int pos = 0; pos < 4; ++pos) {
      const SettingCombo combo = kSequence[static_cast<std::size_t>(pos)];
      const double duration = schedule.durations[static_cast<std::size_t>(pos)];
      Rng rng(block_seed(seed, static_cast<std::uint64_t>(r) * 4 +
                                   static_cast<std::uint64_t>(pos)));
      const auto& profile = strategy.profile;
      const double envelopeRate = baseRate * profile.multiplier(combo) *
                                  (profile.drift ? profile.driftMax : 1.0);
      double sA = 0.0;
      double sB = 0.0;
      double cOO = 0.0;
      double t = rng.next_exp(envelopeRate);
      while (t < duration) {
        bool emit = true;
        if (profile.drift) {
          const double d = profile.drift(offset + t);
          if (d < 0.0 || d > profile.driftMax)
            throw std::invalid_argument("drift value outside [0, driftMax]");
          emit = rng.next_unit() < d / profile.driftMax;
        }
        if (emit) {
          // Draw a deterministic outcome table from the mixture.
          double u = rng.next_unit();
          const LhvOutcomeTable* table = &strategy.tables.back().second;
          for (const auto& [weight, candidate] : strategy.tables) {
            if (u < weight) {
              table = &candidate;
              break;
            }
            u -= weight;
          }
          const bool aPass = table->aPass[static_cast<std::size_t>(
              alpha_index(combo) - 1)];
          const bool bPass = table->bPass[static_cast<std::size_t>(
              beta_index(combo) - 1)];
          if (aPass) sA += 1.0;
          if (bPass) sB += 1.0;
          if (aPass && bPass) cOO += 1.0;
        }
        t += rng.next_exp(envelopeRate);
      }
      CountsBlock& block = rounds[static_cast<std::size_t>(r)].block(combo);
      block.sA = sA;
      block.sB = sB;
      block.cOO = cOO;
      offset += duration;
    }
  }
  return rounds;
}

}  // namespace bell
