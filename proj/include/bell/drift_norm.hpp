#pragma once

#include <span>
#include <vector>

#include "bell/inequality.hpp"

namespace bell {

// One relative-intensity link: f(to) = f(from) * S(to)/S(from), comparing the
// channel party's singles at the setting shared by both combinations.
struct PathLink {
  SettingCombo from;
  SettingCombo to;
  Party channel;
};

// Chain of links covering all four combinations. Each link must start from an
// already-reached combination and compare a genuinely shared setting.
class NormalizationPath {
 public:
  explicit NormalizationPath(std::vector<PathLink> links);

  // The sequence-order default: a1b1 -> a1b2 via A's alpha1 singles,
  // a1b2 -> a2b2 via B's beta2 singles, a2b2 -> a2b1 via A's alpha2 singles.
  static const NormalizationPath& standard();

  SettingCombo root() const { return root_; }
  std::span<const PathLink> links() const { return links_; }

 private:
  SettingCombo root_;
  std::vector<PathLink> links_;
};

// Per-combination production-intensity factors, sequence order. Under the
// smallest-f baseline the minimum is exactly 1 and all others are >= 1.
struct CorrectionFactors {
  std::array<double, 4> f = {1.0, 1.0, 1.0, 1.0};

  double at(SettingCombo c) const { return f[sequence_position(c)]; }
  double& at(SettingCombo c) { return f[sequence_position(c)]; }
};

struct BaselinePolicy {
  enum class Kind { SmallestF, FixedCombo };

  Kind kind = Kind::SmallestF;
  SettingCombo combo = SettingCombo::A1B1;  // used by FixedCombo only

  static BaselinePolicy smallest_f() { return {}; }
  static BaselinePolicy fixed(SettingCombo c) {
    return {Kind::FixedCombo, c};
  }
};

CorrectionFactors compute_factors(const RoundData& round,
                                  const NormalizationPath& path,
                                  const BaselinePolicy& policy);

// Divides every count in block (i,j) by f_ij. Outputs stay real-valued.
RoundData normalize_round(const RoundData& round, const CorrectionFactors& f);

// Eberhard value of the drift-normalized round.
double j_prime(const RoundData& round, const NormalizationPath& path,
               const BaselinePolicy& policy);

// Per-round max(J, J'): the value kept by a local realist who only
// normalizes when it helps.
SeriesStats adversarial_series(std::span<const RoundData> rounds,
                               const NormalizationPath& path,
                               const BaselinePolicy& policy);

// Accumulates all rounds into one total and normalizes that directly.
double normalize_total(std::span<const RoundData> rounds,
                       const NormalizationPath& path,
                       const BaselinePolicy& policy);

}  // namespace bell
