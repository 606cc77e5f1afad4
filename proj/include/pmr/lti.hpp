#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmr/polynomial.hpp"

namespace pmr {

/// SISO rational transfer function num(s)/den(s) with an input dead time.
///
/// Leading zeros are stripped on construction. The denominator may not be the
/// zero polynomial and the delay may not be negative; improper ratios are
/// representable but rejected by to_state_space().
class TransferFunction {
 public:
  TransferFunction(Polynomial numerator, Polynomial denominator, double delay = 0.0);

  static TransferFunction unity() { return {{1.0}, {1.0}}; }
  static TransferFunction gain(double k) { return {{k}, {1.0}}; }

  /// Parses `num=[1]; den=[1,2,1]; delay=1.0`. Keys may appear in any order and
  /// be separated by ';' or newlines; `delay` is optional and `#` starts a
  /// comment.
  static TransferFunction parse(std::string_view text);

  const Polynomial& numerator() const noexcept { return num_; }
  const Polynomial& denominator() const noexcept { return den_; }
  double delay() const noexcept { return delay_; }

  int order() const noexcept { return poly::degree(den_); }
  int relative_degree() const noexcept { return poly::degree(den_) - poly::degree(num_); }
  bool is_proper() const noexcept { return relative_degree() >= 0 || poly::is_zero(num_); }
  bool is_strictly_proper() const noexcept { return relative_degree() > 0 || poly::is_zero(num_); }

  /// Inverse of parse(), at full double precision.
  std::string to_string() const;

  std::vector<std::complex<double>> zeros() const { return poly::roots(num_); }
  std::vector<std::complex<double>> poles() const { return poly::roots(den_); }

 private:
  Polynomial num_;
  Polynomial den_;
  double delay_;
};

/// Cascade a then b: numerators and denominators convolve, delays add.
TransferFunction series(const TransferFunction& a, const TransferFunction& b);

/// One sample of a frequency response. `phase_deg` is unwrapped: it is
/// continuous in omega between imaginary-axis poles and starts from the
/// low-frequency asymptote (0 for a positive DC gain, -90 per pole at the
/// origin).
struct ComplexResponse {
  double omega = 0.0;
  std::complex<double> value;
  double phase_deg = 0.0;

  double magnitude() const { return std::abs(value); }
};

/// Evaluates the response of a series chain of blocks. Roots are factored
/// once per block, which keeps the unwrapped phase exact for long chains
/// (multi-resonant loops) where the expanded polynomial would be badly
/// conditioned.
class FrequencyResponse {
 public:
  explicit FrequencyResponse(const TransferFunction& tf);
  explicit FrequencyResponse(std::vector<TransferFunction> blocks);

  /// Throws Error(pole_at_frequency) when a denominator vanishes at j*omega.
  ComplexResponse operator()(double omega) const;
  std::complex<double> value(double omega) const;

  std::vector<ComplexResponse> sweep(std::span<const double> omegas) const;

  /// Positive frequencies of poles lying on the imaginary axis (|Re| below a
  /// relative tolerance), sorted and de-duplicated.
  std::vector<double> axis_pole_frequencies() const;

  const std::vector<TransferFunction>& blocks() const noexcept { return blocks_; }

 private:
  struct Factored {
    std::vector<std::complex<double>> zeros;
    std::vector<std::complex<double>> poles;
    double gain_phase = 0.0;  // radians, 0 or -pi
  };

  std::vector<TransferFunction> blocks_;
  std::vector<Factored> factored_;
};

ComplexResponse freq_response(const TransferFunction& tf, double omega);

/// n log-spaced points covering [lo, hi] inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t n);

/// Single-input single-output realization x' = Ax + Bu(t - delay), y = Cx + Du.
struct StateSpaceModel {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
  double d = 0.0;
  double input_delay = 0.0;

  int order() const noexcept { return static_cast<int>(a.rows()); }
};

/// Controllable canonical realization. Throws Error(improper_system) when the
/// numerator degree exceeds the denominator degree.
StateSpaceModel to_state_space(const TransferFunction& tf);

/// Cascade realization u -> first -> second -> y. Delays add.
StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second);

/// C (jwI - A)^-1 B + D, dead time excluded.
std::complex<double> freq_response(const StateSpaceModel& ss, double omega);

struct SampledOutput {
  std::vector<double> y;
  bool diverged = false;
  double divergence_time = 0.0;
};

/// Fixed-step RK4 response to a sampled input (sample k at t = k*step, linear
/// interpolation between samples). The dead time is realized as a shift of
/// round(delay/step) samples; it must be at least one step when nonzero.
/// A non-finite or exploding state stops the run and sets `diverged`.
SampledOutput simulate(const StateSpaceModel& ss, std::span<const double> input, double step);

}  // namespace pmr
