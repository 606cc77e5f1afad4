#include "pmr/tuning.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pmr/error.hpp"

namespace pmr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double deg(double radians) { return radians * 180.0 / kPi; }
constexpr double rad(double degrees) { return degrees * kPi / 180.0; }

using Row = std::array<std::string_view, 8>;

// [N-1][class]
const Row kFirstModeTable[5][3] = {
    {{"0.397", "0.0975", "0.360", "0.0487", "0.508", "0.195", "0.254", "0.0624"},
     {"0.985", "0.347", "0.490", "0.174", "1.00", "0.695", "0.502", "0.177"},
     {"0.866", "1.00", "0.810", "0.500", "0.329", "2.00", "0.165", "0.190"}},
    {{"0.398", "0.0836", "0.490", "0.0418", "0.406", "0.167", "0.203", "0.0426"},
     {"0.988", "0.313", "0.810", "0.156", "0.375", "0.626", "0.188", "0.0594"},
     {"0.875", "0.970", "0.810", "0.485", "0.332", "1.94", "0.166", "0.184"}},
    {{"0.398", "0.0697", "0.490", "0.0349", "0.406", "0.139", "0.203", "0.0356"},
     {"0.990", "0.278", "0.810", "0.139", "0.376", "0.557", "0.188", "0.0529"},
     {"0.883", "0.939", "0.810", "0.469", "0.336", "1.88", "0.168", "0.178"}},
    {{"0.399", "0.0558", "0.810", "0.0279", "0.152", "0.112", "0.0758", "0.0106"},
     {"0.993", "0.244", "0.810", "0.122", "0.377", "0.487", "0.189", "0.0463"},
     {"0.891", "0.908", "0.810", "0.454", "0.339", "1.82", "0.169", "0.173"}},
    {{"0.399", "0.0419", "0.810", "0.0209", "0.152", "0.0837", "0.0759", "0.00796"},
     {"0.995", "0.209", "0.810", "0.105", "0.378", "0.418", "0.189", "0.0397"},
     {"0.899", "0.877", "0.810", "0.438", "0.342", "1.75", "0.171", "0.167"}},
};

const Row kHigherModeTable = {"1.00", "0.0349", "0.810", "0.0175",
                              "0.380", "0.0698", "0.190", "0.00663"};

int class_index(PlantClass c) { return static_cast<int>(c); }

void check_count(int count) {
  if (count < 1 || count > 5)
    throw Error(ErrorKind::invalid_argument, "mode count N must lie in 1..5");
}

}  // namespace

std::string_view to_string(HarmonicKind k) { return k == HarmonicKind::odd ? "odd" : "consecutive"; }

HarmonicKind parse_harmonic_kind(std::string_view text) {
  if (text == "consecutive" || text == "i") return HarmonicKind::consecutive;
  if (text == "odd" || text == "ii") return HarmonicKind::odd;
  throw Error(ErrorKind::parse_error, "unknown harmonic set '" + std::string(text) + "'");
}

HarmonicSet::HarmonicSet(HarmonicKind kind, int count) : kind_(kind), count_(count) {
  check_count(count);
}

std::vector<int> HarmonicSet::modes() const {
  std::vector<int> out;
  for (int i = 1; i <= count_; ++i) out.push_back(kind_ == HarmonicKind::consecutive ? i : 2 * i - 1);
  return out;
}

std::complex<double> PolarPoint::value() const { return std::polar(magnitude, rad(phase_deg)); }

double lead_phase_deg() { return deg(std::atan(2.5) - std::atan(0.4)); }

double nominal_first_mode_phase_deg(PlantClass c, int count) {
  check_count(count);
  switch (c) {
    case PlantClass::A: return -(188.0 - count);
    case PlantClass::B: return -(131.0 - count);
    case PlantClass::C: return -(91.0 - count);
  }
  return 0.0;
}

double first_mode_eta(PlantClass c, int count) {
  check_count(count);
  switch (c) {
    case PlantClass::A: return count == 1 ? 0.6 : (count <= 3 ? 0.7 : 0.9);
    case PlantClass::B: return count == 1 ? 0.7 : 0.9;
    case PlantClass::C: return 0.9;
  }
  return 0.9;
}

double first_mode_magnitude(PlantClass c) { return c == PlantClass::A ? 0.4 : 1.0; }

PolarPoint total_target(PlantClass c) {
  switch (c) {
    case PlantClass::A: return {0.4, -140.6};
    case PlantClass::B: return {1.0, -130.0};
    case PlantClass::C: return {1.0, -90.0};
  }
  return {};
}

TuningTargets decompose_targets(PlantClass c, const HarmonicSet& harmonics) {
  TuningTargets t;
  t.plant_class = c;
  t.p_total = total_target(c);
  double remaining = t.p_total.phase_deg;
  if (c == PlantClass::A) {
    t.p_lead = PolarPoint{1.0, lead_phase_deg()};
    remaining -= t.p_lead->phase_deg;
  }
  remaining -= kHigherModePhaseDeg * (harmonics.count() - 1);
  for (int n : harmonics.modes()) {
    if (n == 1)
      t.modes.push_back({1, {first_mode_magnitude(c), remaining}, first_mode_eta(c, harmonics.count())});
    else
      t.modes.push_back({n, {1.0, kHigherModePhaseDeg}, kHigherModeEta});
  }
  return t;
}

std::array<double, 8> TuningCoefficients::values() const {
  return {alpha1, alpha2, alpha3, beta1, beta2, beta3, zeta1, zeta2};
}

TuningCoefficients derive_coefficients(double rho_deg, double nu_deg, double m_rho, double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw Error(ErrorKind::invalid_argument, "eta must lie in (0, 1]");
  const double phi = rad(rho_deg - nu_deg);
  const double c = std::cos(phi), s = std::sin(phi), e2 = eta * eta;
  TuningCoefficients k;
  k.alpha1 = m_rho * c;
  k.alpha2 = -2.0 * m_rho * s;
  k.alpha3 = e2;
  k.beta1 = -m_rho * s;
  k.beta2 = -2.0 * m_rho * (e2 - 1.0) * c;
  k.beta3 = -4.0 * m_rho * s;
  k.zeta1 = m_rho * c * (1.0 - e2);
  k.zeta2 = 2.0 * m_rho * s * (e2 - 1.0);
  return k;
}

const std::array<std::string_view, 8>& printed_first_mode_table(PlantClass c, int count) {
  check_count(count);
  return kFirstModeTable[count - 1][class_index(c)];
}

const std::array<std::string_view, 8>& printed_higher_mode_table() { return kHigherModeTable; }

TuningCoefficients coefficients_from_text(const std::array<std::string_view, 8>& cells) {
  std::array<double, 8> v{};
  for (std::size_t i = 0; i < 8; ++i) v[i] = std::stod(std::string(cells[i]));
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

ModeGains compute_mode_gains(const TuningCoefficients& k, double omega_nu, double m_nu, int n,
                             double omega_r, double xi) {
  if (!(omega_nu > 0.0) || !(m_nu > 0.0) || !(omega_r > 0.0) || n < 1)
    throw Error(ErrorKind::invalid_argument, "omega_nu, m_nu, omega_r and n must be positive");
  if (!(xi >= 0.0)) throw Error(ErrorKind::invalid_argument, "damping xi must be non-negative");
  const double w = omega_nu, wn = n * omega_r;
  if (!(wn < w))
    throw Error(ErrorKind::invalid_argument, "mode frequency n*omega_r must stay below omega_nu");
  const double den = w * w - k.alpha3 * wn * wn;
  if (std::abs(den) <= 1e-12 * w * w)
    throw Error(ErrorKind::degenerate_tuning, "omega_nu^2 = alpha3 (n omega_r)^2");

  const double md = m_nu * den;
  ModeGains g;
  g.kp = k.alpha1 * (w * w - wn * wn) / md - k.alpha2 * wn * w * xi / md;
  g.kr1 = k.beta1 * (w * w - wn * wn) / (m_nu * w) +
          (k.beta2 * wn * wn * wn * xi + k.beta3 * wn * wn * w * xi * xi) / md;
  g.kr2 = k.zeta1 * wn * wn * (wn * wn - w * w) / md + k.zeta2 * wn * wn * wn * w * xi / md;
  return g;
}

TransferFunction PhaseLead::transfer_function() const {
  return TransferFunction({k_a, k_a * z_a}, {1.0, p_a});
}

std::optional<PhaseLead> build_phase_lead(const FrequencyPoint& point) {
  if (point.plant_class != PlantClass::A) return std::nullopt;
  return PhaseLead{2.5, 0.4 * point.omega_nu, 2.5 * point.omega_nu};
}

TransferFunction ResonantMode::transfer_function() const {
  const double w2 = omega_rn * omega_rn, damp = 2.0 * xi * omega_rn;
  return TransferFunction({kp, kr1 + damp * kp, kp * w2 + kr2}, {1.0, damp, w2});
}

std::vector<TransferFunction> PmrController::blocks() const {
  std::vector<TransferFunction> out;
  if (lead) out.push_back(lead->transfer_function());
  for (const auto& m : modes) out.push_back(m.transfer_function());
  return out;
}

TransferFunction PmrController::transfer_function() const {
  TransferFunction tf = TransferFunction::unity();
  for (const auto& b : blocks()) tf = series(tf, b);
  return tf;
}

StateSpaceModel PmrController::state_space() const {
  StateSpaceModel ss = to_state_space(TransferFunction::unity());
  for (const auto& b : blocks()) ss = series(ss, to_state_space(b));
  return ss;
}

std::string_view to_string(CoefficientSource s) {
  return s == CoefficientSource::printed ? "printed" : "derived";
}

CoefficientSource parse_coefficient_source(std::string_view text) {
  if (text == "derived") return CoefficientSource::derived;
  if (text == "printed") return CoefficientSource::printed;
  throw Error(ErrorKind::parse_error, "unknown coefficient source '" + std::string(text) + "'");
}

double omega_r_for_ratio(const FrequencyPoint& point, const HarmonicSet& harmonics, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error(ErrorKind::invalid_argument, "ratio max(n omega_r)/omega_nu must lie in (0, 1)");
  return ratio * point.omega_nu / harmonics.max_mode();
}

PmrController tune(const TuningSpec& spec) {
  const FrequencyPoint& pt = spec.point;
  if (!(pt.omega_nu > 0.0) || !(pt.m_nu > 0.0))
    throw Error(ErrorKind::invalid_argument, "frequency point needs positive omega_nu and m_nu");
  if (!(spec.omega_r > 0.0)) throw Error(ErrorKind::invalid_argument, "omega_r must be positive");
  if (!(spec.harmonics.max_mode() * spec.omega_r < pt.omega_nu))
    throw Error(ErrorKind::invalid_argument, "max(n omega_r) must stay below omega_nu");
  const auto count = static_cast<std::size_t>(spec.harmonics.count());
  if (spec.xi.size() > 1 && spec.xi.size() != count)
    throw Error(ErrorKind::invalid_argument, "xi needs 0, 1 or N entries");
  if (spec.first_mode_eta && !(*spec.first_mode_eta > 0.0 && *spec.first_mode_eta <= 1.0))
    throw Error(ErrorKind::invalid_argument, "eta must lie in (0, 1]");

  const TuningTargets targets = decompose_targets(pt.plant_class, spec.harmonics);
  PmrController c;
  c.plant_class = pt.plant_class;
  c.omega_nu = pt.omega_nu;
  c.omega_r = spec.omega_r;
  c.harmonics = spec.harmonics;
  c.lead = build_phase_lead(pt);

  for (std::size_t i = 0; i < targets.modes.size(); ++i) {
    const ModeTarget& mt = targets.modes[i];
    const double xi = spec.xi.empty() ? 0.0 : spec.xi[spec.xi.size() == 1 ? 0 : i];
    const bool first = mt.n == 1;
    const double eta = first && spec.first_mode_eta ? *spec.first_mode_eta : mt.eta;

    TuningCoefficients k;
    if (spec.source == CoefficientSource::printed && !(first && spec.first_mode_eta)) {
      k = coefficients_from_text(first ? printed_first_mode_table(pt.plant_class, spec.harmonics.count())
                                       : printed_higher_mode_table());
    } else if (first) {
      const double rho = spec.source == CoefficientSource::printed
                             ? nominal_first_mode_phase_deg(pt.plant_class, spec.harmonics.count())
                             : mt.p.phase_deg;
      k = derive_coefficients(rho, pt.nu_deg, mt.p.magnitude, eta);
    } else {
      k = derive_coefficients(mt.p.phase_deg, 0.0, 1.0, eta);
    }

    const ModeGains g = compute_mode_gains(k, pt.omega_nu, first ? pt.m_nu : 1.0, mt.n, spec.omega_r, xi);
    c.modes.push_back({mt.n, mt.n * spec.omega_r, xi, eta, g.kp, g.kr1, g.kr2});
  }
  return c;
}

}  // namespace pmr
