#include "bell/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bell/inequality.hpp"

namespace bell {

namespace {

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

double trace_with(const DensityMatrix& rho, const Eigen::Matrix4cd& op) {
  return (rho * op).trace().real();
}

}  // namespace

double MeasurementAngle::radians() const {
  return degrees * std::numbers::pi / 180.0;
}

void StateParams::validate() const {
  if (!(r > 0.0) || !(r <= 1.0))
    throw std::invalid_argument("state parameter r must be in (0, 1]");
  if (!(V >= 0.0) || !(V <= 1.0))
    throw std::invalid_argument("state parameter V must be in [0, 1]");
}

MeasurementAngle ExperimentConfig::alpha(int index) const {
  if (index == 1) return alpha1;
  if (index == 2) return alpha2;
  throw std::invalid_argument("alpha index must be 1 or 2");
}

MeasurementAngle ExperimentConfig::beta(int index) const {
  if (index == 1) return beta1;
  if (index == 2) return beta2;
  throw std::invalid_argument("beta index must be 1 or 2");
}

void ExperimentConfig::validate() const {
  state.validate();
  if (!(etaA >= 0.0) || !(etaA <= 1.0))
    throw std::invalid_argument("efficiency etaA must be in [0, 1]");
  if (!(etaB >= 0.0) || !(etaB <= 1.0))
    throw std::invalid_argument("efficiency etaB must be in [0, 1]");
  if (!(r0 >= 0.0)) throw std::invalid_argument("pair rate r0 must be >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("measurement time t must be > 0");
  if (!(zeta >= 0.0)) throw std::invalid_argument("dark rate zeta must be >= 0");
  if (!(tauC >= 0.0))
    throw std::invalid_argument("coincidence window tauC must be >= 0");
  for (const MeasurementAngle* a : {&alpha1, &alpha2, &beta1, &beta2})
    if (!std::isfinite(a->degrees))
      throw std::invalid_argument("measurement angles must be finite");
}

bool is_valid_density_matrix(const DensityMatrix& rho, double tol) {
  if (!(rho - rho.adjoint()).isZero(tol)) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol) return false;
  if (std::abs(rho.trace().imag()) > tol) return false;
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho);
  return es.eigenvalues().minCoeff() >= -tol;
}

DensityMatrix build_state(const StateParams& p) {
  p.validate();
  DensityMatrix rho = DensityMatrix::Zero();
  double norm = 1.0 / (1.0 + p.r * p.r);
  rho(1, 1) = norm;              // |HV><HV|
  rho(2, 2) = norm * p.r * p.r;  // |VH><VH|
  rho(1, 2) = rho(2, 1) = norm * p.V * p.r;
  return rho;
}

Eigen::Matrix2d polarizer_projector(MeasurementAngle a) {
  double c = std::cos(a.radians());
  double s = std::sin(a.radians());
  Eigen::Matrix2d p;
  p << c * c, c * s, c * s, s * s;
  return p;
}

double predict_raw_singles(const ExperimentConfig& cfg, Party party,
                           MeasurementAngle a) {
  cfg.validate();
  DensityMatrix rho = build_state(cfg.state);
  Eigen::Matrix2cd proj = polarizer_projector(a).cast<std::complex<double>>();
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  double eta = party == Party::A ? cfg.etaA : cfg.etaB;
  Eigen::Matrix4cd op =
      party == Party::A ? kron2(proj, id) : kron2(id, proj);
  return eta * cfg.r0 * cfg.t * trace_with(rho, op);
}

double predict_raw_coincidence(const ExperimentConfig& cfg, MeasurementAngle a,
                               MeasurementAngle b) {
  cfg.validate();
  DensityMatrix rho = build_state(cfg.state);
  Eigen::Matrix2cd pa = polarizer_projector(a).cast<std::complex<double>>();
  Eigen::Matrix2cd pb = polarizer_projector(b).cast<std::complex<double>>();
  return cfg.etaA * cfg.etaB * cfg.r0 * cfg.t * trace_with(rho, kron2(pa, pb));
}

double correct_singles(double raw, const ExperimentConfig& cfg) {
  return raw + cfg.zeta * cfg.t;
}

double accidentals(double sA, double sB, double cRaw,
                   const ExperimentConfig& cfg) {
  if (cRaw < 0.0)
    throw std::invalid_argument("raw coincidences must be >= 0");
  if (cRaw > sA || cRaw > sB)
    throw std::invalid_argument(
        "raw coincidences cannot exceed either singles count");
  if (sA <= 0.0 || sB <= 0.0) return 0.0;  // no clicks, no accidentals
  return sA * sB * (cfg.tauC / cfg.t) * (1.0 - cRaw / sA) * (1.0 - cRaw / sB);
}

double observed_coincidence(double cRaw, double acc) { return cRaw + acc; }

double ModelPrediction::accidental_fraction(SettingCombo c) const {
  int pos = sequence_position(c);
  double obs = observed.block(c).cOO;
  if (obs <= 0.0) return 0.0;
  return accidental[pos] / obs;
}

ModelPrediction predict_counts(const ExperimentConfig& cfg) {
  cfg.validate();
  ModelPrediction out;
  for (SettingCombo c : kSequence) {
    int pos = sequence_position(c);
    MeasurementAngle a = cfg.alpha(c);
    MeasurementAngle b = cfg.beta(c);

    RawCountsBlock& raw = out.raw[pos];
    raw.alphaIndex = alpha_index(c);
    raw.betaIndex = beta_index(c);
    raw.sA = predict_raw_singles(cfg, Party::A, a);
    raw.sB = predict_raw_singles(cfg, Party::B, b);
    raw.cOO = predict_raw_coincidence(cfg, a, b);

    CountsBlock& obs = out.observed.block(c);
    obs.sA = correct_singles(raw.sA, cfg);
    obs.sB = correct_singles(raw.sB, cfg);
    out.accidental[pos] = accidentals(obs.sA, obs.sB, raw.cOO, cfg);
    obs.cOO = observed_coincidence(raw.cOO, out.accidental[pos]);
  }
  out.j = eberhard_j(out.observed);
  return out;
}

ModelComparison compare_model(const RoundData& data, const RoundData& model) {
  auto dev = [](double d, double m) {
    if (d == 0.0)
      throw std::invalid_argument("deviation undefined for zero data value");
    return (m - d) / std::abs(d);
  };
  ModelComparison cmp;
  const std::array<SettingCombo, 4> columns = {
      SettingCombo::A1B1, SettingCombo::A1B2, SettingCombo::A2B1,
      SettingCombo::A2B2};
  for (int i = 0; i < 4; ++i) {
    double d = data.block(columns[i]).cOO;
    double m = model.block(columns[i]).cOO;
    cmp.entries[i] = {"C(" + combo_label(columns[i]) + ")", d, m, dev(d, m)};
  }
  {
    double d = data.block(SettingCombo::A1B2).sA;
    double m = model.block(SettingCombo::A1B2).sA;
    cmp.entries[4] = {"S_A(a1)", d, m, dev(d, m)};
  }
  {
    double d = data.block(SettingCombo::A2B1).sB;
    double m = model.block(SettingCombo::A2B1).sB;
    cmp.entries[5] = {"S_B(b1)", d, m, dev(d, m)};
  }
  {
    double d = eberhard_j(data);
    double m = eberhard_j(model);
    cmp.entries[6] = {"J", d, m, dev(d, m)};
  }
  return cmp;
}

}  // namespace bell
