#pragma once

#include "bell/data_io.hpp"

namespace bell {

// Parameters of the reference experiment (Sagnac source, 300 s per setting
// combination accumulated over 5 one-minute rounds).
ExperimentConfig reference_config();

// The reference experiment's complete count record: 5 rounds of four 60 s
// blocks in sequence order, plus accumulated totals.
Dataset builtin_paper_dataset();

// Published reference values the artifact is checked against. Table 1 columns
// are ordered C(a1b1), C(a1b2), C(a2b1), C(a2b2), S_A(a1), S_B(b1), J; f
// percentages follow the measurement sequence a1b1, a1b2, a2b2, a2b1.
struct PaperFixtures {
  std::array<const char*, 7> table1Labels;
  std::array<double, 7> table1Data;
  std::array<double, 7> table1Model;
  std::array<double, 7> table1DeviationPercent;

  double deltaA1Percent, deltaA2Percent, deltaB1Percent, deltaB2Percent;
  double poissonSmallPercent;  // fluctuation scale of the smaller singles
  double poissonLargePercent;  // ... and of the larger singles

  std::array<double, 5> j;
  std::array<double, 5> jPrime;
  std::array<std::array<double, 4>, 5> fPercent;
  std::array<double, 4> fTotalPercent;
  double jSum, jMean, jStdDev;
  double jPrimeSum, jPrimeMean, jPrimeStdDev;
  double jPrimeTotalCounts;  // normalization applied to the summed counts
  double advSum, advMean, advStdDev;  // per-round max(J, J')
  double fixedSum, fixedMean, fixedStdDev;  // baseline pinned to a1b1
  double fixedTotalCounts;
};

const PaperFixtures& paper_fixtures();

}  // namespace bell
