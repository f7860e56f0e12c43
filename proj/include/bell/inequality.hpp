#pragma once

#include <optional>
#include <span>

#include "bell/counts.hpp"

namespace bell {

// Eberhard value of one round:
//   J = [S_A(a1) - C(a1,b2)] + [S_B(b1) - C(a2,b1)] + C(a2,b2) - C(a1,b1)
// with the A-singles term taken from the a1b2 block and the B-singles term
// from the a2b1 block. Local realism requires J >= 0.
double eberhard_j(const RoundData& round);

// Poisson-propagation standard deviation of eberhard_j. The non-coincident
// remainders S - C and the two lone coincidence terms are independent counts.
double eberhard_j_sigma(const RoundData& round);

struct SeriesStats {
  double sum = 0.0;
  double mean = 0.0;
  std::optional<double> sampleStdDev;  // n-1 denominator, needs n >= 2
  int n = 0;
};

SeriesStats series_stats(std::span<const double> values);

// Relative drift of each local setting's singles between its two setting
// combinations, later occurrence relative to earlier in the order
// a1b1, a1b2, a2b1, a2b2. Values are fractions, not percent.
struct SinglesDeviationTable {
  double dA1 = 0.0;  // A singles at alpha1: a1b2 vs a1b1
  double dA2 = 0.0;  // A singles at alpha2: a2b2 vs a2b1
  double dB1 = 0.0;  // B singles at beta1:  a2b1 vs a1b1
  double dB2 = 0.0;  // B singles at beta2:  a2b2 vs a1b2
};

SinglesDeviationTable singles_deviations(const RoundData& totals);

// Relative statistical fluctuation scale of a count, 1/sqrt(count).
double poisson_relative_fluctuation(double count);

}  // namespace bell
