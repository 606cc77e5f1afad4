#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pmr/lti.hpp"
#include "pmr/tuning.hpp"

namespace pmr {

enum class ReferenceKind { sine, sawtooth_trunc, square_trunc };

std::string_view to_string(ReferenceKind k);
ReferenceKind parse_reference_kind(std::string_view text);

/// Truncated Fourier series r(t) = A sum_n w_n sin(n omega_r t).
/// Sawtooth weights are (2/pi)(-1)^(n+1)/n, square weights (4/pi)/n on odd n.
class ReferenceSignal {
 public:
  ReferenceSignal(ReferenceKind kind, double omega_r, HarmonicSet harmonics, double amplitude = 1.0);

  double operator()(double t) const;
  /// max |r(t)| over one period.
  double peak() const noexcept { return peak_; }
  double period() const;

  ReferenceKind kind() const noexcept { return kind_; }
  double omega_r() const noexcept { return omega_r_; }
  const HarmonicSet& harmonics() const noexcept { return harmonics_; }
  double amplitude() const noexcept { return amplitude_; }
  const std::vector<std::pair<int, double>>& terms() const noexcept { return terms_; }

 private:
  ReferenceKind kind_;
  double omega_r_;
  HarmonicSet harmonics_;
  double amplitude_;
  std::vector<std::pair<int, double>> terms_;
  double peak_ = 0.0;
};

ReferenceSignal make_reference(ReferenceKind kind, double omega_r, const HarmonicSet& harmonics,
                               double amplitude = 1.0);

/// Sine for one mode, sawtooth for consecutive sets, square for odd sets.
ReferenceKind default_reference_kind(const HarmonicSet& harmonics);

struct SimulationOptions {
  double duration = 100.0;
  double step = 1e-3;
  /// Upper bound on recorded samples per signal; metrics use every step.
  std::size_t max_recorded = 20001;
  double settle_band = 0.02;
  /// Periods of clean tracking required after t_s for `settled`.
  double settled_periods = 3.0;
};

struct SimulationResult {
  std::vector<double> time, r, y, u, e;
  double t_s = 0.0;
  double n_s = 0.0;
  double m_o = 0.0;  // percent
  double r_max = 0.0;
  double y_max = 0.0;
  double omega_r = 0.0;
  double duration = 0.0;
  double step = 0.0;
  bool settled = false;
};

/// e = r - y, u = C e, y = G u. Throws Error(closed_loop_unstable) on blow-up.
SimulationResult simulate_closed_loop(const TransferFunction& plant, const StateSpaceModel& controller,
                                      const ReferenceSignal& ref, const SimulationOptions& options);
SimulationResult simulate_closed_loop(const TransferFunction& plant, const PmrController& controller,
                                      const ReferenceSignal& ref, const SimulationOptions& options);

struct GainCrossing {
  double omega = 0.0;
  double phase_deg = 0.0;
  double phase_margin_deg = 0.0;
};

struct PhaseCrossing {
  double omega = 0.0;
  double magnitude = 0.0;
};

struct MarginReport {
  static constexpr double inf = std::numeric_limits<double>::infinity();
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  /// min 1/|L| over -180 crossings with |L| < 1.
  double gain_margin = inf;
  double gain_margin_omega = nan;
  /// max 1/|L| over -180 crossings with |L| > 1 (gain reduction margin).
  double lower_gain_margin = nan;
  /// Smallest distance of the loop phase to -180 over all unit-gain crossings.
  double phase_margin = inf;
  double phase_margin_omega = nan;
  /// Unit-gain crossing closest to the reference frequency.
  double local_phase_margin = inf;
  double local_crossover_omega = nan;
  double local_crossover_phase_deg = nan;
  std::vector<GainCrossing> gain_crossings;
  std::vector<PhaseCrossing> phase_crossings;
};

struct MarginOptions {
  double omega_min = 0.0;  // 0 picks a range from the loop's roots
  double omega_max = 0.0;
  int points_per_decade = 400;
  double reference_omega = 0.0;
};

MarginReport margins(const TransferFunction& plant, const std::vector<TransferFunction>& controller,
                     const MarginOptions& options = {});
MarginReport margins(const TransferFunction& plant, const PmrController& controller,
                     MarginOptions options = {});

struct LocusSample {
  double omega = 0.0;
  std::complex<double> value;
  double phase_deg = 0.0;
  bool marked = false;
  bool skipped = false;
  std::string note;
};

/// Loop response L = C G on a grid; samples at axis poles are kept but
/// flagged as skipped. `mark_omega` > 0 is inserted and flagged.
std::vector<LocusSample> nyquist_data(const TransferFunction& plant,
                                      const std::vector<TransferFunction>& controller,
                                      std::span<const double> omegas, double mark_omega = 0.0);

std::vector<LocusSample> response_data(const std::vector<TransferFunction>& blocks,
                                       std::span<const double> omegas);

enum class Verdict { stable, unstable, inconclusive };

std::string_view to_string(Verdict v);

struct StabilityReport {
  Verdict verdict = Verdict::inconclusive;
  std::string method;
  double max_real_part = MarginReport::nan;  // eigenvalue method
  double envelope_ratio = MarginReport::nan;  // simulation method: last / peak
  double horizon = 0.0;
};

struct StabilityOptions {
  double horizon = 0.0;  // 0 picks 20 slowest loop periods
  double step = 0.0;     // 0 picks from the delay and the fastest root
};

/// Eigenvalues of the closed loop for delay-free plants, a free-response
/// envelope test otherwise.
StabilityReport stability_check(const TransferFunction& plant, const StateSpaceModel& controller,
                                const StabilityOptions& options = {});
StabilityReport stability_check(const TransferFunction& plant, const PmrController& controller,
                                const StabilityOptions& options = {});

}  // namespace pmr
