#include "bell/drift_norm.hpp"

#include <algorithm>
#include <stdexcept>

namespace bell {

namespace {

double channel_singles(const CountsBlock& b, Party channel) {
  return channel == Party::A ? b.sA : b.sB;
}

int shared_setting(SettingCombo a, SettingCombo b, Party channel) {
  if (channel == Party::A) {
    if (alpha_index(a) != alpha_index(b)) return 0;
    return alpha_index(a);
  }
  if (beta_index(a) != beta_index(b)) return 0;
  return beta_index(a);
}

}  // namespace

NormalizationPath::NormalizationPath(std::vector<PathLink> links)
    : root_(SettingCombo::A1B1), links_(std::move(links)) {
  if (links_.size() != 3)
    throw std::invalid_argument(
        "a normalization path needs exactly three links");
  root_ = links_.front().from;
  std::array<bool, 4> reached{};
  reached[sequence_position(root_)] = true;
  for (const PathLink& l : links_) {
    if (!reached[sequence_position(l.from)])
      throw std::invalid_argument("path link starts from unreached combination " +
                                  combo_label(l.from));
    if (reached[sequence_position(l.to)])
      throw std::invalid_argument("path link revisits combination " +
                                  combo_label(l.to));
    if (shared_setting(l.from, l.to, l.channel) == 0)
      throw std::invalid_argument(
          "path link " + combo_label(l.from) + " -> " + combo_label(l.to) +
          " does not share the " +
          std::string(l.channel == Party::A ? "alpha" : "beta") + " setting");
    reached[sequence_position(l.to)] = true;
  }
}

const NormalizationPath& NormalizationPath::standard() {
  static const NormalizationPath path({
      {SettingCombo::A1B1, SettingCombo::A1B2, Party::A},
      {SettingCombo::A1B2, SettingCombo::A2B2, Party::B},
      {SettingCombo::A2B2, SettingCombo::A2B1, Party::A},
  });
  return path;
}

CorrectionFactors compute_factors(const RoundData& round,
                                  const NormalizationPath& path,
                                  const BaselinePolicy& policy) {
  CorrectionFactors factors;
  factors.at(path.root()) = 1.0;
  for (const PathLink& l : path.links()) {
    double sFrom = channel_singles(round.block(l.from), l.channel);
    double sTo = channel_singles(round.block(l.to), l.channel);
    if (sFrom <= 0.0 || sTo <= 0.0)
      throw std::invalid_argument("zero singles on normalization link " +
                                  combo_label(l.from) + " -> " +
                                  combo_label(l.to));
    factors.at(l.to) = factors.at(l.from) * sTo / sFrom;
  }

  double base = 1.0;
  if (policy.kind == BaselinePolicy::Kind::SmallestF) {
    // ties resolve to the earliest combination in sequence order
    base = *std::min_element(factors.f.begin(), factors.f.end());
  } else {
    base = factors.at(policy.combo);
  }
  for (double& v : factors.f) v /= base;
  return factors;
}

RoundData normalize_round(const RoundData& round, const CorrectionFactors& f) {
  RoundData out = round;
  for (SettingCombo c : kSequence) {
    CountsBlock& b = out.block(c);
    double factor = f.at(c);
    if (!(factor > 0.0))
      throw std::invalid_argument("correction factors must be positive");
    b.sA /= factor;
    b.sB /= factor;
    b.cOO /= factor;
  }
  return out;
}

double j_prime(const RoundData& round, const NormalizationPath& path,
               const BaselinePolicy& policy) {
  return eberhard_j(normalize_round(round, compute_factors(round, path, policy)));
}

SeriesStats adversarial_series(std::span<const RoundData> rounds,
                               const NormalizationPath& path,
                               const BaselinePolicy& policy) {
  std::vector<double> values;
  values.reserve(rounds.size());
  for (const RoundData& r : rounds)
    values.push_back(std::max(eberhard_j(r), j_prime(r, path, policy)));
  return series_stats(values);
}

double normalize_total(std::span<const RoundData> rounds,
                       const NormalizationPath& path,
                       const BaselinePolicy& policy) {
  if (rounds.empty())
    throw std::invalid_argument("normalize_total needs at least one round");
  return j_prime(sum_rounds(rounds), path, policy);
}

}  // namespace bell
