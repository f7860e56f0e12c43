#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace bell {

enum class Party { A, B };

char party_char(Party p);
Party party_from_char(char c);

// The four polarizer setting combinations, indexed in the experimental
// switching order (every step changes exactly one setting).
enum class SettingCombo : int { A1B1 = 0, A1B2 = 1, A2B2 = 2, A2B1 = 3 };

inline constexpr std::array<SettingCombo, 4> kSequence = {
    SettingCombo::A1B1, SettingCombo::A1B2, SettingCombo::A2B2,
    SettingCombo::A2B1};

int alpha_index(SettingCombo c);  // 1 or 2
int beta_index(SettingCombo c);   // 1 or 2
int sequence_position(SettingCombo c);
std::string combo_label(SettingCombo c);  // "a1b1", "a1b2", "a2b2", "a2b1"
SettingCombo combo_from_label(std::string_view label);
SettingCombo combo_from_indices(int alphaIdx, int betaIdx);

// Observed ordinary-outcome counts for one setting combination: singles per
// party and coincidences, accumulated over one measurement block.
struct CountsBlock {
  int alphaIndex = 1;
  int betaIndex = 1;
  double sA = 0.0;
  double sB = 0.0;
  double cOO = 0.0;

  SettingCombo combo() const { return combo_from_indices(alphaIndex, betaIndex); }
  bool operator==(const CountsBlock&) const = default;
};

// Same shape before background and accidental corrections (the tilde values).
struct RawCountsBlock {
  int alphaIndex = 1;
  int betaIndex = 1;
  double sA = 0.0;
  double sB = 0.0;
  double cOO = 0.0;

  SettingCombo combo() const { return combo_from_indices(alphaIndex, betaIndex); }
  bool operator==(const RawCountsBlock&) const = default;
};

// One measurement round: all four setting combinations exactly once, stored
// in sequence order. Counts are kept as reals; integer data stays exact.
struct RoundData {
  std::array<CountsBlock, 4> blocks{};

  RoundData();
  explicit RoundData(std::span<const CountsBlock> unordered);

  const CountsBlock& block(SettingCombo c) const;
  CountsBlock& block(SettingCombo c);

  bool operator==(const RoundData&) const = default;
};

// Element-wise accumulation over rounds. Empty input yields a zero round.
RoundData sum_rounds(std::span<const RoundData> rounds);

RoundData scale_round(const RoundData& round, double factor);

}  // namespace bell
