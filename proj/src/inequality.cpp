#include "bell/inequality.hpp"

#include <cmath>
#include <stdexcept>

namespace bell {

namespace {

void require_complete(const RoundData& round) {
  for (SettingCombo c : kSequence) {
    const CountsBlock& b = round.block(c);
    if (b.alphaIndex != alpha_index(c) || b.betaIndex != beta_index(c))
      throw std::invalid_argument("round is missing the " + combo_label(c) +
                                  " block");
  }
}

}  // namespace

double eberhard_j(const RoundData& round) {
  require_complete(round);
  const CountsBlock& b11 = round.block(SettingCombo::A1B1);
  const CountsBlock& b12 = round.block(SettingCombo::A1B2);
  const CountsBlock& b22 = round.block(SettingCombo::A2B2);
  const CountsBlock& b21 = round.block(SettingCombo::A2B1);
  return (b12.sA - b12.cOO) + (b21.sB - b21.cOO) + b22.cOO - b11.cOO;
}

double eberhard_j_sigma(const RoundData& round) {
  require_complete(round);
  const CountsBlock& b11 = round.block(SettingCombo::A1B1);
  const CountsBlock& b12 = round.block(SettingCombo::A1B2);
  const CountsBlock& b22 = round.block(SettingCombo::A2B2);
  const CountsBlock& b21 = round.block(SettingCombo::A2B1);
  double var = (b12.sA - b12.cOO) + (b21.sB - b21.cOO) + b22.cOO + b11.cOO;
  return std::sqrt(std::max(var, 0.0));
}

SeriesStats series_stats(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("series_stats needs at least one value");
  SeriesStats st;
  st.n = static_cast<int>(values.size());
  for (double v : values) st.sum += v;
  st.mean = st.sum / st.n;
  if (st.n >= 2) {
    double ss = 0.0;
    for (double v : values) {
      double d = v - st.mean;
      ss += d * d;
    }
    st.sampleStdDev = std::sqrt(ss / (st.n - 1));
  }
  return st;
}

SinglesDeviationTable singles_deviations(const RoundData& totals) {
  const CountsBlock& b11 = totals.block(SettingCombo::A1B1);
  const CountsBlock& b12 = totals.block(SettingCombo::A1B2);
  const CountsBlock& b22 = totals.block(SettingCombo::A2B2);
  const CountsBlock& b21 = totals.block(SettingCombo::A2B1);
  if (b11.sA <= 0 || b21.sA <= 0 || b11.sB <= 0 || b12.sB <= 0)
    throw std::invalid_argument(
        "singles deviations need positive earlier-occurrence singles");
  SinglesDeviationTable t;
  t.dA1 = (b12.sA - b11.sA) / b11.sA;
  t.dA2 = (b22.sA - b21.sA) / b21.sA;
  t.dB1 = (b21.sB - b11.sB) / b11.sB;
  t.dB2 = (b22.sB - b12.sB) / b12.sB;
  return t;
}

double poisson_relative_fluctuation(double count) {
  if (count <= 0)
    throw std::invalid_argument("fluctuation scale needs a positive count");
  return 1.0 / std::sqrt(count);
}

}  // namespace bell
