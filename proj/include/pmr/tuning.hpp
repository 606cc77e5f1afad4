#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "pmr/ident.hpp"
#include "pmr/lti.hpp"

namespace pmr {

enum class HarmonicKind { consecutive, odd };

std::string_view to_string(HarmonicKind k);
HarmonicKind parse_harmonic_kind(std::string_view text);

/// Resonant modes 1..N (consecutive) or 1, 3, .., 2N-1 (odd), N in 1..5.
class HarmonicSet {
 public:
  HarmonicSet(HarmonicKind kind, int count);

  HarmonicKind kind() const noexcept { return kind_; }
  int count() const noexcept { return count_; }
  std::vector<int> modes() const;
  int max_mode() const noexcept { return kind_ == HarmonicKind::consecutive ? count_ : 2 * count_ - 1; }

 private:
  HarmonicKind kind_;
  int count_;
};

/// A complex location given by magnitude and phase in degrees.
struct PolarPoint {
  double magnitude = 1.0;
  double phase_deg = 0.0;

  std::complex<double> value() const;
};

struct ModeTarget {
  int n = 1;
  PolarPoint p;
  double eta = 0.9;
};

/// Decomposition of the tuning location over the lead block and the modes.
struct TuningTargets {
  PlantClass plant_class = PlantClass::A;
  PolarPoint p_total;
  std::optional<PolarPoint> p_lead;
  std::vector<ModeTarget> modes;
};

/// Phase of the lead block 2.5 (s + 0.4 w)/(s + 2.5 w) at s = jw:
/// atan(2.5) - atan(0.4), about 46.397 degrees.
double lead_phase_deg();

/// Nominal first-mode phase: -(188-N), -(131-N) or -(91-N) degrees.
double nominal_first_mode_phase_deg(PlantClass c, int count);
double first_mode_eta(PlantClass c, int count);
double first_mode_magnitude(PlantClass c);
PolarPoint total_target(PlantClass c);

inline constexpr double kHigherModePhaseDeg = -1.0;
inline constexpr double kHigherModeEta = 0.9;

/// The first mode absorbs whatever phase the lead block and higher modes do
/// not supply, so the product closes on p_total exactly.
TuningTargets decompose_targets(PlantClass c, const HarmonicSet& harmonics);

struct TuningCoefficients {
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
  double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
  double zeta1 = 0.0, zeta2 = 0.0;

  std::array<double, 8> values() const;
};

inline constexpr std::array<std::string_view, 8> kCoefficientNames = {
    "alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "zeta1", "zeta2"};

TuningCoefficients derive_coefficients(double rho_deg, double nu_deg, double m_rho, double eta);

/// Printed three-digit tables, kept verbatim.
const std::array<std::string_view, 8>& printed_first_mode_table(PlantClass c, int count);
const std::array<std::string_view, 8>& printed_higher_mode_table();
TuningCoefficients coefficients_from_text(const std::array<std::string_view, 8>& cells);

struct ModeGains {
  double kp = 0.0, kr1 = 0.0, kr2 = 0.0;
};

/// Gains of one PR block placing it at the coefficient-encoded location at
/// omega_nu, for a plant magnitude m_nu (1 for modes above the first).
ModeGains compute_mode_gains(const TuningCoefficients& k, double omega_nu, double m_nu, int n,
                             double omega_r, double xi);

struct PhaseLead {
  double k_a = 2.5, z_a = 0.0, p_a = 0.0;

  TransferFunction transfer_function() const;
};

/// Present for class A points only.
std::optional<PhaseLead> build_phase_lead(const FrequencyPoint& point);

struct ResonantMode {
  int n = 1;
  double omega_rn = 0.0;
  double xi = 0.0;
  double eta = 0.9;
  double kp = 0.0, kr1 = 0.0, kr2 = 0.0;

  /// Kp + (Kr1 s + Kr2)/(s^2 + 2 xi w s + w^2) over a common denominator.
  TransferFunction transfer_function() const;
};

struct PmrController {
  PlantClass plant_class = PlantClass::A;
  double omega_nu = 0.0;
  double omega_r = 0.0;
  HarmonicSet harmonics{HarmonicKind::consecutive, 1};
  std::optional<PhaseLead> lead;
  std::vector<ResonantMode> modes;

  /// Series blocks: lead (if any) then one PR block per mode.
  std::vector<TransferFunction> blocks() const;
  TransferFunction transfer_function() const;
  /// Cascade of per-block realizations; order = 2 N (+1 with lead).
  StateSpaceModel state_space() const;
};

enum class CoefficientSource { derived, printed };

std::string_view to_string(CoefficientSource s);
CoefficientSource parse_coefficient_source(std::string_view text);

struct TuningSpec {
  FrequencyPoint point;
  double omega_r = 0.0;
  HarmonicSet harmonics{HarmonicKind::consecutive, 1};
  /// Per-mode damping; empty means 0 for every mode, one value is broadcast.
  std::vector<double> xi;
  CoefficientSource source = CoefficientSource::derived;
  /// Replaces the table value of eta_1.
  std::optional<double> first_mode_eta;
};

/// omega_r such that max(n omega_r) = ratio * omega_nu.
double omega_r_for_ratio(const FrequencyPoint& point, const HarmonicSet& harmonics, double ratio);

PmrController tune(const TuningSpec& spec);

}  // namespace pmr
