#include "bell/fixtures.hpp"

namespace bell {
namespace {

RoundData make_round(const std::array<std::array<double, 3>, 4>& counts) {
  std::array<CountsBlock, 4> blocks;
  for (std::size_t pos = 0; pos < 4; ++pos) {
    const SettingCombo combo = kSequence[pos];
    blocks[pos] = {alpha_index(combo), beta_index(combo), counts[pos][0],
                   counts[pos][1], counts[pos][2]};
  }
  RoundData round;
  round.blocks = blocks;
  return round;
}

}  // namespace

ExperimentConfig reference_config() {
  ExperimentConfig cfg;
  cfg.state = {0.297, 0.965};
  cfg.etaA = 0.7377;
  cfg.etaB = 0.7859;
  cfg.r0 = 80700.0;
  cfg.t = 300.0;
  cfg.zeta = 10.0;
  cfg.tauC = 180e-9;
  cfg.alpha1 = MeasurementAngle{85.6};
  cfg.alpha2 = MeasurementAngle{118.0};
  cfg.beta1 = MeasurementAngle{-5.4};
  cfg.beta2 = MeasurementAngle{25.9};
  return cfg;
}

Dataset builtin_paper_dataset() {
  Dataset ds;
  ds.metadata.source = "reference-experiment";
  ds.metadata.durationSeconds = 60.0;
  ds.metadata.sequence = kSequence;
  ds.metadata.settings = SettingAngles::from_config(reference_config());

  // Blocks per round in sequence order a1b1, a1b2, a2b2, a2b1: {sA, sB, cOO}.
  ds.rounds = {
      make_round({{{308131, 341484, 215282},
                   {302394, 897934, 228605},
                   {940904, 896442, 14501},
                   {945152, 337158, 238151}}}),
      make_round({{{303988, 338929, 212953},
                   {304593, 900646, 231168},
                   {943776, 900898, 13861},
                   {946507, 339996, 239361}}}),
      make_round({{{305770, 341446, 214545},
                   {306556, 909078, 231487},
                   {954277, 907159, 13538},
                   {956094, 341548, 239889}}}),
      make_round({{{307790, 342499, 214853},
                   {307340, 910570, 231871},
                   {949608, 905976, 14237},
                   {943247, 336659, 236109}}}),
      make_round({{{300938, 335523, 211673},
                   {301982, 897554, 229464},
                   {940804, 897022, 13612},
                   {944046, 338357, 237636}}}),
  };
  ds.totals = make_round({{{1526617, 1699881, 1069306},
                           {1522865, 4515782, 1152595},
                           {4729369, 4507497, 69749},
                           {4735046, 1693718, 1191146}}});
  ds.validate();
  return ds;
}

const PaperFixtures& paper_fixtures() {
  static const PaperFixtures fixtures = [] {
    PaperFixtures f{};
    f.table1Labels = {"C(a1b1)", "C(a1b2)", "C(a2b1)", "C(a2b2)",
                      "S_A(a1)", "S_B(b1)", "J"};
    f.table1Data = {1069306, 1152595, 1191146, 69749, 1522865, 1693718,
                    -126715};
    f.table1Model = {1068886, 1152743, 1192489, 68694, 1538766, 1686467,
                     -120191};
    f.table1DeviationPercent = {-0.04, 0.01, 0.11, -1.51, 1.04, -0.43, 5.15};

    f.deltaA1Percent = -0.25;
    f.deltaA2Percent = -0.12;
    f.deltaB1Percent = -0.36;
    f.deltaB2Percent = -0.18;
    f.poissonSmallPercent = 0.08;
    f.poissonLargePercent = 0.05;

    f.j = {-27985, -25032, -24279, -24597, -24822};
    f.jPrime = {-24193, -25727, -24717, -22750, -25745};
    f.fPercent = {{{102.07, 100.17, 100.00, 100.45},
                   {100.00, 100.20, 100.23, 100.52},
                   {100.00, 100.26, 100.05, 100.24},
                   {101.33, 101.18, 100.67, 100.00},
                   {100.00, 100.35, 100.29, 100.63}}};
    f.fTotalPercent = {100.43, 100.18, 100.00, 100.12};
    f.jSum = -126715;
    f.jMean = -25343;
    f.jStdDev = 1503;
    f.jPrimeSum = -123132;
    f.jPrimeMean = -24626;
    f.jPrimeStdDev = 1243;
    f.jPrimeTotalCounts = -123412;
    f.advSum = -121076;
    f.advMean = -24215;
    f.advStdDev = 893;
    f.fixedSum = -123935;
    f.fixedMean = -24787;
    f.fixedStdDev = 1098;
    f.fixedTotalCounts = -123943;
    return f;
  }();
  return fixtures;
}

}  // namespace bell
