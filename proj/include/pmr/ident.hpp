#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pmr/lti.hpp"

namespace pmr {

enum class PlantClass { A, B, C };

std::string_view to_string(PlantClass c);
PlantClass parse_plant_class(std::string_view text);

/// Phase of the identified point for each class: -180, -120, -60 degrees.
double class_phase_deg(PlantClass c);
PlantClass class_from_phase(double nu_deg);

enum class PointSource { analytic, rap };

std::string_view to_string(PointSource s);
PointSource parse_point_source(std::string_view text);

/// One identified point G(j omega_nu) = m_nu at angle nu_deg.
struct FrequencyPoint {
  PlantClass plant_class = PlantClass::A;
  double nu_deg = -180.0;
  double omega_nu = 0.0;
  double m_nu = 0.0;
  PointSource source = PointSource::analytic;

  /// K_u = 1/M_u, meaningful for class A points.
  double ultimate_gain() const { return 1.0 / m_nu; }
};

/// Validated constructor; nu follows from the class.
FrequencyPoint make_point(PlantClass c, double omega_nu, double m_nu,
                          PointSource source = PointSource::analytic);

/// Analytic identification from a model: the lowest frequency where the
/// phase reaches -180, else -120, else -60 degrees.
FrequencyPoint classify(const TransferFunction& plant);

/// Finite approximation of 1/s^m, m = -gamma/90, with a flat phase over
/// [omega_min, omega_max]. The integer part of m is realized by pure
/// integrators and the fractional part by `pairs` recursive pole/zero pairs.
struct FoiApprox {
  double gamma_deg = 0.0;
  double m = 0.0;
  double omega_min = 0.01;
  double omega_max = 100.0;
  int pairs = 0;
  int integrators = 0;
  double gain = 1.0;
  std::vector<double> zeros;  // corner frequencies, rad/s
  std::vector<double> poles;
  double max_phase_error_deg = 0.0;

  /// Factored form: a gain block, one block per pole/zero pair, one per
  /// integrator.
  std::vector<TransferFunction> sections() const;
  TransferFunction transfer_function() const;
  double magnitude(double omega) const;
};

/// Placement band is the declared band widened by this factor on each side,
/// which keeps the edge ripple inside the flatness tolerance.
inline constexpr double kFoiBandExtension = 30.0;
inline constexpr double kFoiFlatnessDeg = 2.0;

FoiApprox build_foi(double gamma_deg, double omega_min = 0.01, double omega_max = 100.0,
                    int pairs = 8);

struct RapConfig {
  double gamma_deg = 0.0;
  double relay_gain = 1.0;
  double sim_duration = 300.0;
  double step = 1e-3;
  double omega_min = 0.01;
  double omega_max = 100.0;
  int foi_pairs = 8;
  int window_cycles = 10;
  double period_tolerance = 0.01;
  int min_samples_per_period = 200;
};

struct RapResult {
  double a_nu = 0.0;
  double omega_nu = 0.0;
  double f_mag = 1.0;
  double period_dispersion = 0.0;
  int cycles = 0;
  FrequencyPoint point;
};

/// Simulates the relay loop u = d sign(e), e = -y, y = G F u and measures
/// the limit cycle at the plant output.
RapResult run_rap(const TransferFunction& plant, const RapConfig& config);

/// M_nu = pi A / (4 d |F(j omega)|), nu = -180 - gamma.
FrequencyPoint estimate_point(const RapResult& result, const RapConfig& config,
                              const FoiApprox& foi);

struct RapAttempt {
  double gamma_deg = 0.0;
  bool success = false;
  std::string message;
};

struct RapAutoResult {
  FrequencyPoint point;
  RapResult result;
  RapConfig config;
  std::vector<RapAttempt> attempts;
};

inline constexpr double kRapGammaSchedule[] = {0.0, -60.0, -120.0};

/// Runs the gamma schedule 0, -60, -120 and returns the first success.
/// `base` supplies everything except gamma and the relay gain.
RapAutoResult rap_auto(const TransferFunction& plant, double relay_gain,
                       const RapConfig& base = {});

}  // namespace pmr
