#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "bell/counts.hpp"

namespace bell {

// Polarizer angle measured from the H axis, in degrees. Projectors are
// 180-degree periodic, so no range normalization is applied.
struct MeasurementAngle {
  double degrees = 0.0;

  double radians() const;
  bool operator==(const MeasurementAngle&) const = default;
};

// Source state parameters: |HV> + r |VH> with the HV/VH coherence damped
// by the real factor V.
struct StateParams {
  double r = 1.0;  // amplitude ratio, 0 < r <= 1
  double V = 1.0;  // coherence damping, 0 <= V <= 1

  void validate() const;  // throws std::invalid_argument
  bool operator==(const StateParams&) const = default;
};

// Two-qubit density operator in the product basis |HH>, |HV>, |VH>, |VV>.
using DensityMatrix = Eigen::Matrix4cd;

bool is_valid_density_matrix(const DensityMatrix& rho, double tol = 1e-12);

// Full physical description of one run: state, arm efficiencies, pair rate,
// block duration, dark rate, coincidence window and the four angles.
struct ExperimentConfig {
  StateParams state;
  double etaA = 1.0;  // Alice arm efficiency, 0..1
  double etaB = 1.0;  // Bob arm efficiency, 0..1
  double r0 = 0.0;    // produced pairs per second
  double t = 1.0;     // measurement time per setting combination, seconds
  double zeta = 0.0;  // dark events per second and party
  double tauC = 0.0;  // coincidence window width, seconds
  MeasurementAngle alpha1, alpha2, beta1, beta2;

  double pair_count() const { return r0 * t; }  // N = R0 T

  MeasurementAngle alpha(int index) const;  // index 1 or 2
  MeasurementAngle beta(int index) const;
  MeasurementAngle alpha(SettingCombo c) const { return alpha(alpha_index(c)); }
  MeasurementAngle beta(SettingCombo c) const { return beta(beta_index(c)); }

  void validate() const;  // throws std::invalid_argument
  bool operator==(const ExperimentConfig&) const = default;
};

DensityMatrix build_state(const StateParams& p);

// Rank-1 projector onto cos(a)|H> + sin(a)|V>.
Eigen::Matrix2d polarizer_projector(MeasurementAngle a);

// Expected ordinary singles within time t before dark-count correction:
// eta * R0 * T * Tr[rho (P x I)] (identity on the other party).
double predict_raw_singles(const ExperimentConfig& cfg, Party party,
                           MeasurementAngle a);

// Expected ordinary coincidences before accidentals:
// etaA * etaB * R0 * T * Tr[rho (P_A x P_B)].
double predict_raw_coincidence(const ExperimentConfig& cfg, MeasurementAngle a,
                               MeasurementAngle b);

// Background correction: raw singles plus the dark counts zeta * T.
double correct_singles(double raw, const ExperimentConfig& cfg);

// Accidental coincidences expected between clicks that do not form a real
// coincidence: sA sB (tauC/T) (1 - cRaw/sA)(1 - cRaw/sB), with sA, sB the
// background-corrected singles and cRaw the uncorrected coincidences.
double accidentals(double sA, double sB, double cRaw,
                   const ExperimentConfig& cfg);

double observed_coincidence(double cRaw, double acc);

// Full prediction pipeline for all four setting combinations.
struct ModelPrediction {
  std::array<RawCountsBlock, 4> raw{};   // sequence order
  std::array<double, 4> accidental{};    // sequence order
  RoundData observed;                    // corrected singles, observed C_oo
  double j = 0.0;                        // Eberhard value of `observed`

  double accidental_fraction(SettingCombo c) const;  // acc / observed C_oo
};

ModelPrediction predict_counts(const ExperimentConfig& cfg);

// Data/model comparison over the seven reported quantities: the four
// coincidences, S_A(a1), S_B(b1) and J. Deviations are (model - data)/|data|.
struct ModelComparison {
  struct Entry {
    std::string label;
    double data = 0.0;
    double model = 0.0;
    double deviation = 0.0;  // fraction, not percent
  };
  std::array<Entry, 7> entries;
};

ModelComparison compare_model(const RoundData& data, const RoundData& model);

}  // namespace bell
