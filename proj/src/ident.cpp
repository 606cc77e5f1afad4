#include "pmr/ident.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pmr/error.hpp"
#include "pmr/integrator.hpp"

namespace pmr {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void validate_plant(const TransferFunction& g) {
  if (poly::is_zero(g.numerator()))
    throw Error(ErrorKind::invalid_argument, "plant transfer function is identically zero");
  if (!g.is_strictly_proper())
    throw Error(ErrorKind::invalid_argument, "plant must be strictly proper");

  Polynomial den = g.denominator();
  int at_origin = 0;
  while (den.size() > 1 && den.back() == 0.0) {
    den.pop_back();
    ++at_origin;
  }
  if (at_origin > 1)
    throw Error(ErrorKind::invalid_argument, "plant has more than one pole at the origin");
  for (const auto& p : poly::roots(den))
    if (p.real() >= 0.0)
      throw Error(ErrorKind::invalid_argument, "plant must be BIBO-stable or type 1");
}

double phase_of(const FrequencyResponse& fr, double omega) { return fr(omega).phase_deg; }

}  // namespace

std::string_view to_string(PlantClass c) {
  switch (c) {
    case PlantClass::A: return "A";
    case PlantClass::B: return "B";
    case PlantClass::C: return "C";
  }
  return "?";
}

PlantClass parse_plant_class(std::string_view text) {
  if (text == "A" || text == "a") return PlantClass::A;
  if (text == "B" || text == "b") return PlantClass::B;
  if (text == "C" || text == "c") return PlantClass::C;
  throw Error(ErrorKind::parse_error, "unknown plant class '" + std::string(text) + "'");
}

double class_phase_deg(PlantClass c) {
  switch (c) {
    case PlantClass::A: return -180.0;
    case PlantClass::B: return -120.0;
    case PlantClass::C: return -60.0;
  }
  return 0.0;
}

PlantClass class_from_phase(double nu_deg) {
  for (PlantClass c : {PlantClass::A, PlantClass::B, PlantClass::C})
    if (std::abs(nu_deg - class_phase_deg(c)) < 1e-9) return c;
  throw Error(ErrorKind::invalid_argument, "phase " + fmt(nu_deg) + " deg matches no plant class");
}

std::string_view to_string(PointSource s) { return s == PointSource::rap ? "rap" : "analytic"; }

PointSource parse_point_source(std::string_view text) {
  if (text == "analytic") return PointSource::analytic;
  if (text == "rap") return PointSource::rap;
  throw Error(ErrorKind::parse_error, "unknown point source '" + std::string(text) + "'");
}

FrequencyPoint make_point(PlantClass c, double omega_nu, double m_nu, PointSource source) {
  if (!(omega_nu > 0.0) || !std::isfinite(omega_nu))
    throw Error(ErrorKind::invalid_argument, "omega_nu must be positive");
  if (!(m_nu > 0.0) || !std::isfinite(m_nu))
    throw Error(ErrorKind::invalid_argument, "m_nu must be positive");
  return {c, class_phase_deg(c), omega_nu, m_nu, source};
}

FrequencyPoint classify(const TransferFunction& plant) {
  validate_plant(plant);
  const FrequencyResponse fr(plant);

  const std::vector<double> grid = log_space(1e-6, 1e6, 12 * 200 + 1);
  std::vector<double> phase(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) phase[i] = phase_of(fr, grid[i]);

  for (PlantClass c : {PlantClass::A, PlantClass::B, PlantClass::C}) {
    const double nu = class_phase_deg(c);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double f0 = phase[i] - nu, f1 = phase[i + 1] - nu;
      if (f0 == 0.0) return make_point(c, grid[i], fr(grid[i]).magnitude());
      if (f1 == 0.0) return make_point(c, grid[i + 1], fr(grid[i + 1]).magnitude());
      if ((f0 > 0.0) == (f1 > 0.0)) continue;
      double lo = grid[i], hi = grid[i + 1];
      const bool falling = f0 > 0.0;
      for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-15; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double fm = phase_of(fr, mid) - nu;
        if ((fm > 0.0) == falling)
          lo = mid;
        else
          hi = mid;
      }
      const double lo_err = std::abs(phase_of(fr, lo) - nu);
      const double hi_err = std::abs(phase_of(fr, hi) - nu);
      const double w = lo_err <= hi_err ? lo : hi;
      return make_point(c, w, fr(w).magnitude());
    }
  }
  throw Error(ErrorKind::unclassifiable_plant,
              "phase never reaches -180, -120 or -60 degrees");
}

// ---------------------------------------------------------------------------

std::vector<TransferFunction> FoiApprox::sections() const {
  std::vector<TransferFunction> out;
  out.push_back(TransferFunction::gain(gain));
  for (std::size_t k = 0; k < zeros.size(); ++k)
    out.emplace_back(Polynomial{1.0 / zeros[k], 1.0}, Polynomial{1.0 / poles[k], 1.0});
  for (int i = 0; i < integrators; ++i) out.emplace_back(Polynomial{1.0}, Polynomial{1.0, 0.0});
  return out;
}

TransferFunction FoiApprox::transfer_function() const {
  TransferFunction tf = TransferFunction::unity();
  for (const auto& s : sections()) tf = series(tf, s);
  return tf;
}

double FoiApprox::magnitude(double omega) const {
  double mag = gain * std::pow(omega, -integrators);
  for (std::size_t k = 0; k < zeros.size(); ++k)
    mag *= std::hypot(1.0, omega / zeros[k]) / std::hypot(1.0, omega / poles[k]);
  return mag;
}

FoiApprox build_foi(double gamma_deg, double omega_min, double omega_max, int pairs) {
  if (!(gamma_deg > -180.0 && gamma_deg <= 0.0))
    throw Error(ErrorKind::invalid_argument, "gamma must lie in (-180, 0] degrees");
  if (!(omega_min > 0.0) || !(omega_max >= 100.0 * omega_min))
    throw Error(ErrorKind::invalid_argument, "FOI band must span at least two decades");

  FoiApprox f;
  f.gamma_deg = gamma_deg;
  f.m = -gamma_deg / 90.0;
  f.omega_min = omega_min;
  f.omega_max = omega_max;
  if (f.m == 0.0) return f;

  f.integrators = static_cast<int>(std::floor(f.m + 1e-12));
  double frac = f.m - f.integrators;
  if (frac < 1e-12) frac = 0.0;
  if (frac > 0.0) {
    if (pairs < 1) throw Error(ErrorKind::invalid_argument, "FOI needs at least one pole/zero pair");
    f.pairs = pairs;
    const double lo = omega_min / kFoiBandExtension;
    const double ratio = omega_max * kFoiBandExtension / lo;
    for (int k = 1; k <= pairs; ++k) {
      f.zeros.push_back(lo * std::pow(ratio, (2.0 * k - 1.0 + frac) / (2.0 * pairs)));
      f.poles.push_back(lo * std::pow(ratio, (2.0 * k - 1.0 - frac) / (2.0 * pairs)));
    }
  }
  const double center = std::sqrt(omega_min * omega_max);
  f.gain = std::pow(center, -f.m) / f.magnitude(center);

  const auto decades = std::log10(omega_max / omega_min);
  for (double w : log_space(omega_min, omega_max, static_cast<std::size_t>(200 * decades) + 1)) {
    double phase = -90.0 * f.integrators;
    for (std::size_t k = 0; k < f.zeros.size(); ++k)
      phase += (std::atan(w / f.zeros[k]) - std::atan(w / f.poles[k])) * 180.0 / kPi;
    f.max_phase_error_deg = std::max(f.max_phase_error_deg, std::abs(phase - gamma_deg));
  }
  if (f.max_phase_error_deg > kFoiFlatnessDeg)
    throw Error(ErrorKind::foi_flatness, "FOI phase deviates " + fmt(f.max_phase_error_deg) +
                                             " deg from gamma inside the band");
  return f;
}

// ---------------------------------------------------------------------------

RapResult run_rap(const TransferFunction& plant, const RapConfig& config) {
  validate_plant(plant);
  class_from_phase(-180.0 - config.gamma_deg);
  if (!(config.relay_gain > 0.0))
    throw Error(ErrorKind::invalid_argument, "relay gain must be positive");
  if (!(config.step > 0.0) || !(config.sim_duration > 0.0))
    throw Error(ErrorKind::invalid_argument, "step and duration must be positive");
  if (plant.delay() > 0.0 && config.step > plant.delay())
    throw Error(ErrorKind::invalid_argument, "step must not exceed the dead time");
  if (config.window_cycles < 2)
    throw Error(ErrorKind::invalid_argument, "window must cover at least two cycles");

  const FoiApprox foi = build_foi(config.gamma_deg, config.omega_min, config.omega_max,
                                  config.foi_pairs);

  // The dead time commutes with the linear blocks, so it is applied to the
  // relay output; with a sampled relay that input is an exact hold.
  StateSpaceModel chain = to_state_space(TransferFunction::unity());
  for (const auto& s : foi.sections()) chain = series(chain, to_state_space(s));
  StateSpaceModel g = to_state_space(plant);
  const auto delay_steps = static_cast<std::size_t>(std::llround(g.input_delay / config.step));
  g.input_delay = 0.0;
  chain = series(chain, g);

  const auto steps = static_cast<std::size_t>(std::llround(config.sim_duration / config.step));
  Rk4Propagator prop(chain.a, chain.b, config.step);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(chain.order());
  Eigen::VectorXd w(1);
  std::vector<double> ring(delay_steps + 1, 0.0);
  std::vector<double> y(steps + 1);
  const double d = config.relay_gain;
  double u = d;
  for (std::size_t k = 0; k <= steps; ++k) {
    y[k] = chain.c.dot(x);
    if (!std::isfinite(y[k]) || std::abs(y[k]) > 1e6 * d)
      throw Error(ErrorKind::unstable_relay_loop,
                  "relay loop output diverged at t=" + fmt(static_cast<double>(k) * config.step));
    if (k == steps) break;
    const double e = -y[k];
    if (e > 0.0)
      u = d;
    else if (e < 0.0)
      u = -d;
    ring[k % ring.size()] = u;
    w(0) = k >= delay_steps ? ring[(k - delay_steps) % ring.size()] : 0.0;
    prop.step_constant(x, w);
  }

  const std::size_t start = steps / 2;
  double mean = 0.0;
  for (std::size_t k = start; k <= steps; ++k) mean += y[k];
  mean /= static_cast<double>(steps - start + 1);

  std::vector<double> times;
  std::vector<std::size_t> index;
  for (std::size_t k = start; k < steps; ++k) {
    const double a = y[k] - mean, b = y[k + 1] - mean;
    if (a < 0.0 && b >= 0.0) {
      times.push_back((static_cast<double>(k) + a / (a - b)) * config.step);
      index.push_back(k);
    }
  }
  const auto window = static_cast<std::size_t>(config.window_cycles);
  if (times.size() < window + 1)
    throw Error(ErrorKind::no_limit_cycle,
                "no sustained oscillation at gamma=" + fmt(config.gamma_deg) + " deg (" +
                    std::to_string(times.size() > 0 ? times.size() - 1 : 0) + " cycles observed)");

  const std::size_t first = times.size() - window - 1;
  double period = (times.back() - times[first]) / static_cast<double>(window);
  double dispersion = 0.0, amplitude = 0.0;
  for (std::size_t i = first; i + 1 < times.size(); ++i) {
    dispersion = std::max(dispersion, std::abs(times[i + 1] - times[i] - period) / period);
    const auto lo = y.begin() + static_cast<std::ptrdiff_t>(index[i]);
    const auto hi = y.begin() + static_cast<std::ptrdiff_t>(index[i + 1]) + 1;
    const auto [mn, mx] = std::minmax_element(lo, hi);
    amplitude += (*mx - *mn) / 2.0;
  }
  amplitude /= static_cast<double>(window);

  if (period / config.step < config.min_samples_per_period)
    throw Error(ErrorKind::no_limit_cycle,
                "oscillation at gamma=" + fmt(config.gamma_deg) +
                    " deg is sampling-rate chatter, not a limit cycle");
  if (dispersion >= config.period_tolerance)
    throw Error(ErrorKind::no_limit_cycle, "period dispersion " + fmt(100.0 * dispersion) +
                                               "% at gamma=" + fmt(config.gamma_deg) + " deg");
  const double omega = 2.0 * kPi / period;
  if (omega < config.omega_min || omega > config.omega_max)
    throw Error(ErrorKind::no_limit_cycle,
                "oscillation frequency " + fmt(omega) + " rad/s lies outside the FOI band");
  if (!(amplitude > 0.0))
    throw Error(ErrorKind::no_limit_cycle, "zero oscillation amplitude");

  RapResult r;
  r.a_nu = amplitude;
  r.omega_nu = omega;
  r.f_mag = foi.magnitude(omega);
  r.period_dispersion = dispersion;
  r.cycles = static_cast<int>(times.size()) - 1;
  r.point = estimate_point(r, config, foi);
  return r;
}

FrequencyPoint estimate_point(const RapResult& result, const RapConfig& config,
                              const FoiApprox& foi) {
  FrequencyPoint p;
  p.nu_deg = -180.0 - config.gamma_deg;
  p.plant_class = class_from_phase(p.nu_deg);
  p.omega_nu = result.omega_nu;
  p.m_nu = kPi * result.a_nu / (4.0 * config.relay_gain * foi.magnitude(result.omega_nu));
  p.source = PointSource::rap;
  return p;
}

RapAutoResult rap_auto(const TransferFunction& plant, double relay_gain, const RapConfig& base) {
  RapAutoResult out;
  std::string failures;
  for (double gamma : kRapGammaSchedule) {
    RapConfig cfg = base;
    cfg.gamma_deg = gamma;
    cfg.relay_gain = relay_gain;
    try {
      out.result = run_rap(plant, cfg);
      out.point = out.result.point;
      out.config = cfg;
      out.attempts.push_back({gamma, true, "limit cycle detected"});
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_limit_cycle && e.kind() != ErrorKind::unstable_relay_loop)
        throw;
      out.attempts.push_back({gamma, false, e.what()});
      failures += std::string(failures.empty() ? "" : "; ") + e.what();
    }
  }
  throw Error(ErrorKind::unclassifiable_plant, "RAP failed at every gamma: " + failures);
}

}  // namespace pmr
