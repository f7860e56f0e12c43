#include "bell/counts.hpp"

#include <stdexcept>

namespace bell {

char party_char(Party p) { return p == Party::A ? 'A' : 'B'; }

Party party_from_char(char c) {
  if (c == 'A') return Party::A;
  if (c == 'B') return Party::B;
  throw std::invalid_argument(std::string("unknown party '") + c + "'");
}

int alpha_index(SettingCombo c) {
  return (c == SettingCombo::A1B1 || c == SettingCombo::A1B2) ? 1 : 2;
}

int beta_index(SettingCombo c) {
  return (c == SettingCombo::A1B1 || c == SettingCombo::A2B1) ? 1 : 2;
}

int sequence_position(SettingCombo c) { return static_cast<int>(c); }

std::string combo_label(SettingCombo c) {
  switch (c) {
    case SettingCombo::A1B1: return "a1b1";
    case SettingCombo::A1B2: return "a1b2";
    case SettingCombo::A2B2: return "a2b2";
    case SettingCombo::A2B1: return "a2b1";
  }
  throw std::invalid_argument("invalid setting combination");
}

SettingCombo combo_from_label(std::string_view label) {
  if (label == "a1b1") return SettingCombo::A1B1;
  if (label == "a1b2") return SettingCombo::A1B2;
  if (label == "a2b2") return SettingCombo::A2B2;
  if (label == "a2b1") return SettingCombo::A2B1;
  throw std::invalid_argument("unknown setting combination label '" +
                              std::string(label) + "'");
}

SettingCombo combo_from_indices(int alphaIdx, int betaIdx) {
  if ((alphaIdx != 1 && alphaIdx != 2) || (betaIdx != 1 && betaIdx != 2))
    throw std::invalid_argument("setting indices must be 1 or 2");
  if (alphaIdx == 1) return betaIdx == 1 ? SettingCombo::A1B1 : SettingCombo::A1B2;
  return betaIdx == 1 ? SettingCombo::A2B1 : SettingCombo::A2B2;
}

RoundData::RoundData() {
  for (SettingCombo c : kSequence) {
    CountsBlock& b = blocks[sequence_position(c)];
    b.alphaIndex = alpha_index(c);
    b.betaIndex = beta_index(c);
  }
}

RoundData::RoundData(std::span<const CountsBlock> unordered) : RoundData() {
  if (unordered.size() != 4)
    throw std::invalid_argument("a round needs exactly four counts blocks");
  std::array<bool, 4> seen{};
  for (const CountsBlock& b : unordered) {
    int pos = sequence_position(b.combo());
    if (seen[pos])
      throw std::invalid_argument("duplicate setting combination " +
                                  combo_label(b.combo()) + " in round");
    seen[pos] = true;
    blocks[pos] = b;
  }
}

const CountsBlock& RoundData::block(SettingCombo c) const {
  return blocks[sequence_position(c)];
}

CountsBlock& RoundData::block(SettingCombo c) {
  return blocks[sequence_position(c)];
}

RoundData sum_rounds(std::span<const RoundData> rounds) {
  RoundData total;
  for (const RoundData& r : rounds) {
    for (SettingCombo c : kSequence) {
      CountsBlock& t = total.block(c);
      const CountsBlock& b = r.block(c);
      t.sA += b.sA;
      t.sB += b.sB;
      t.cOO += b.cOO;
    }
  }
  return total;
}

RoundData scale_round(const RoundData& round, double factor) {
  RoundData out = round;
  for (CountsBlock& b : out.blocks) {
    b.sA *= factor;
    b.sB *= factor;
    b.cOO *= factor;
  }
  return out;
}

}  // namespace bell
