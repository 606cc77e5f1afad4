#include "pmr/analysis.hpp"

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

// Closed loop e = r - y, u = C e, y = G u(t - tau) with state z = [xc; xg].
// Without dead time the loop is one autonomous system driven by r; with
// dead time the delayed control enters as a second input read from a
// history of grid values.
struct LoopModel {
  StateSpaceModel ctrl;
  StateSpaceModel plant;
  std::size_t delay_steps = 0;
  Eigen::MatrixXd a, b;

  int nc() const { return ctrl.order(); }
  int ng() const { return plant.order(); }
};

LoopModel build_loop(const TransferFunction& plant, const StateSpaceModel& controller, double step) {
  if (!plant.is_strictly_proper())
    throw Error(ErrorKind::invalid_argument, "plant must be strictly proper");
  if (controller.input_delay != 0.0)
    throw Error(ErrorKind::invalid_argument, "controller may not carry dead time");
  if (!(step > 0.0)) throw Error(ErrorKind::invalid_argument, "step must be positive");

  LoopModel m;
  m.ctrl = controller;
  m.plant = to_state_space(plant);
  const double tau = m.plant.input_delay;
  m.plant.input_delay = 0.0;
  if (tau > 0.0) {
    if (step > tau * (1.0 + 1e-12))
      throw Error(ErrorKind::invalid_argument, "step must not exceed the dead time");
    m.delay_steps = static_cast<std::size_t>(std::llround(tau / step));
  }

  const int nc = m.nc(), ng = m.ng(), n = nc + ng;
  const auto& c = m.ctrl;
  const auto& g = m.plant;
  m.a = Eigen::MatrixXd::Zero(n, n);
  m.a.topLeftCorner(nc, nc) = c.a;
  m.a.topRightCorner(nc, ng) = -c.b * g.c;
  m.a.bottomRightCorner(ng, ng) = g.a;
  if (m.delay_steps == 0) {
    m.a.bottomLeftCorner(ng, nc) = g.b * c.c;
    m.a.bottomRightCorner(ng, ng) -= c.d * g.b * g.c;
    m.b.resize(n, 1);
    m.b.topRows(nc) = c.b;
    m.b.bottomRows(ng) = g.b * c.d;
  } else {
    m.b = Eigen::MatrixXd::Zero(n, 2);
    m.b.block(0, 0, nc, 1) = c.b;
    m.b.block(nc, 1, ng, 1) = g.b;
  }
  return m;
}

struct LoopSample {
  std::size_t k;
  double t, r, y, u, e;
};

// Steps the loop and hands every grid sample to `observe`, which returns
// false to stop. Returns false when the state stops being finite.
template <class Reference, class Observer>
bool run_loop(const LoopModel& m, double step, std::size_t steps, const Reference& ref,
              Eigen::VectorXd z, Observer&& observe) {
  Rk4Propagator prop(m.a, m.b, step);
  const int nc = m.nc(), ng = m.ng();
  const std::size_t d = m.delay_steps;
  std::vector<double> ring(d + 1, 0.0);
  Eigen::VectorXd w0(m.b.cols()), wm(m.b.cols()), w1(m.b.cols());

  double r_now = ref(0.0);
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * step;
    const double y = ng ? m.plant.c.dot(z.tail(ng)) : 0.0;
    const double e = r_now - y;
    const double u = (nc ? m.ctrl.c.dot(z.head(nc)) : 0.0) + m.ctrl.d * e;
    if (!std::isfinite(y) || !std::isfinite(u)) return false;
    if (!observe(LoopSample{k, t, r_now, y, u, e}, z)) return true;
    if (k == steps) return true;

    const double r_mid = ref(t + 0.5 * step);
    const double r_next = ref(t + step);
    if (d == 0) {
      w0(0) = r_now;
      wm(0) = r_mid;
      w1(0) = r_next;
    } else {
      ring[k % ring.size()] = u;
      const double ud0 = k >= d ? ring[(k - d) % ring.size()] : 0.0;
      const double ud1 = k + 1 >= d ? ring[(k + 1 - d) % ring.size()] : 0.0;
      w0 << r_now, ud0;
      wm << r_mid, 0.5 * (ud0 + ud1);
      w1 << r_next, ud1;
    }
    prop.step(z, w0, wm, w1);
    r_now = r_next;
  }
}

double wrap180(double deg) { return std::remainder(deg, 360.0); }

std::vector<TransferFunction> loop_blocks(const TransferFunction& plant,
                                          const std::vector<TransferFunction>& controller) {
  std::vector<TransferFunction> blocks = controller;
  blocks.push_back(plant);
  return blocks;
}

template <class F>
double bisect_log(double lo, double hi, F&& f) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-14; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::sine: return "sine";
    case ReferenceKind::sawtooth_trunc: return "sawtooth";
    case ReferenceKind::square_trunc: return "square";
  }
  return "?";
}

ReferenceKind parse_reference_kind(std::string_view text) {
  if (text == "sine") return ReferenceKind::sine;
  if (text == "sawtooth" || text == "sawtooth_trunc") return ReferenceKind::sawtooth_trunc;
  if (text == "square" || text == "square_trunc") return ReferenceKind::square_trunc;
  throw Error(ErrorKind::parse_error, "unknown reference kind '" + std::string(text) + "'");
}

ReferenceSignal::ReferenceSignal(ReferenceKind kind, double omega_r, HarmonicSet harmonics,
                                 double amplitude)
    : kind_(kind), omega_r_(omega_r), harmonics_(harmonics), amplitude_(amplitude) {
  if (!(omega_r > 0.0)) throw Error(ErrorKind::invalid_argument, "omega_r must be positive");
  if (!(amplitude > 0.0)) throw Error(ErrorKind::invalid_argument, "amplitude must be positive");
  switch (kind) {
    case ReferenceKind::sine:
      if (harmonics.count() != 1)
        throw Error(ErrorKind::invalid_argument, "a sine reference has exactly one mode");
      terms_.push_back({1, 1.0});
      break;
    case ReferenceKind::sawtooth_trunc:
      if (harmonics.kind() != HarmonicKind::consecutive && harmonics.count() > 1)
        throw Error(ErrorKind::invalid_argument, "a sawtooth reference needs consecutive modes");
      for (int n : harmonics.modes())
        terms_.push_back({n, (2.0 / kPi) * (n % 2 ? 1.0 : -1.0) / n});
      break;
    case ReferenceKind::square_trunc:
      if (harmonics.kind() != HarmonicKind::odd && harmonics.count() > 1)
        throw Error(ErrorKind::invalid_argument, "a square reference needs odd modes");
      for (int n : harmonics.modes()) terms_.push_back({n, (4.0 / kPi) / n});
      break;
  }

  // Dense scan of one period, then golden-section refinement of the best
  // sample's neighbourhood.
  const int samples = 4096 * harmonics.max_mode();
  const double dt = period() / samples;
  auto abs_r = [this](double t) { return std::abs((*this)(t)); };
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double v = abs_r(i * dt);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = (best - 1) * dt, b = (best + 1) * dt;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (abs_r(c) > abs_r(d))
      b = d;
    else
      a = c;
  }
  peak_ = std::max(best_val, abs_r(0.5 * (a + b)));
}

double ReferenceSignal::operator()(double t) const {
  double r = 0.0;
  for (const auto& [n, w] : terms_) r += w * std::sin(n * omega_r_ * t);
  return amplitude_ * r;
}

double ReferenceSignal::period() const { return 2.0 * kPi / omega_r_; }

ReferenceSignal make_reference(ReferenceKind kind, double omega_r, const HarmonicSet& harmonics,
                               double amplitude) {
  return ReferenceSignal(kind, omega_r, harmonics, amplitude);
}

ReferenceKind default_reference_kind(const HarmonicSet& harmonics) {
  if (harmonics.count() == 1) return ReferenceKind::sine;
  return harmonics.kind() == HarmonicKind::consecutive ? ReferenceKind::sawtooth_trunc
                                                       : ReferenceKind::square_trunc;
}

// ---------------------------------------------------------------------------

SimulationResult simulate_closed_loop(const TransferFunction& plant, const StateSpaceModel& controller,
                                      const ReferenceSignal& ref, const SimulationOptions& options) {
  if (!(options.duration > 0.0)) throw Error(ErrorKind::invalid_argument, "duration must be positive");
  const LoopModel m = build_loop(plant, controller, options.step);
  const auto steps = static_cast<std::size_t>(std::llround(options.duration / options.step));
  const std::size_t stride =
      std::max<std::size_t>(1, (steps + options.max_recorded) / std::max<std::size_t>(options.max_recorded, 1));

  SimulationResult res;
  res.r_max = ref.peak();
  res.omega_r = ref.omega_r();
  res.step = options.step;
  res.duration = static_cast<double>(steps) * options.step;
  const double band = options.settle_band * res.r_max;
  const double blow_up = 1e8 * res.r_max;
  std::size_t last_violation = 0;
  bool violated = false;
  double blow_up_time = -1.0;

  const bool finite = run_loop(m, options.step, steps, ref, Eigen::VectorXd::Zero(m.nc() + m.ng()),
                               [&](const LoopSample& s, const Eigen::VectorXd&) {
                                 if (std::abs(s.y) > blow_up) {
                                   blow_up_time = s.t;
                                   return false;
                                 }
                                 if (std::abs(s.e) > band) {
                                   last_violation = s.k;
                                   violated = true;
                                 }
                                 res.y_max = std::max(res.y_max, std::abs(s.y));
                                 if (s.k % stride == 0 || s.k == steps) {
                                   res.time.push_back(s.t);
                                   res.r.push_back(s.r);
                                   res.y.push_back(s.y);
                                   res.u.push_back(s.u);
                                   res.e.push_back(s.e);
                                 }
                                 return true;
                               });
  if (!finite || blow_up_time >= 0.0) {
    const double t = blow_up_time >= 0.0 ? blow_up_time : res.time.empty() ? 0.0 : res.time.back();
    throw Error(ErrorKind::closed_loop_unstable, "closed loop diverged near t=" + fmt(t));
  }

  res.t_s = violated ? static_cast<double>(last_violation + 1) * options.step : 0.0;
  res.n_s = res.omega_r * res.t_s / (2.0 * kPi);
  res.m_o = std::max((res.y_max - res.r_max) / res.r_max, 0.0) * 100.0;
  res.settled = res.duration - res.t_s >= options.settled_periods * ref.period();
  return res;
}

SimulationResult simulate_closed_loop(const TransferFunction& plant, const PmrController& controller,
                                      const ReferenceSignal& ref, const SimulationOptions& options) {
  return simulate_closed_loop(plant, controller.state_space(), ref, options);
}

// ---------------------------------------------------------------------------

MarginReport margins(const TransferFunction& plant, const std::vector<TransferFunction>& controller,
                     const MarginOptions& options) {
  const auto blocks = loop_blocks(plant, controller);
  const FrequencyResponse fr(blocks);

  double lo = options.omega_min, hi = options.omega_max;
  if (!(lo > 0.0) || !(hi > lo)) {
    double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
    auto note = [&](double w) {
      if (w > 1e-12 && std::isfinite(w)) {
        fmin = std::min(fmin, w);
        fmax = std::max(fmax, w);
      }
    };
    for (const auto& b : blocks) {
      for (const auto& z : b.zeros()) note(std::abs(z));
      for (const auto& p : b.poles()) note(std::abs(p));
      if (b.delay() > 0.0) note(1.0 / b.delay());
    }
    note(options.reference_omega);
    if (fmax == 0.0) fmin = fmax = 1.0;
    lo = fmin * 1e-3;
    hi = fmax * 1e3;
  }

  std::vector<double> edges{lo};
  for (double p : fr.axis_pole_frequencies())
    if (p > lo && p < hi) edges.push_back(p);
  edges.push_back(hi);

  MarginReport rep;
  auto log_mag = [&](double w) { return std::log(std::abs(fr.value(w))); };
  auto imag = [&](double w) { return fr.value(w).imag(); };

  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = s == 0 ? edges[s] : edges[s] * (1.0 + 1e-9);
    const double b = s + 2 == edges.size() ? edges[s + 1] : edges[s + 1] * (1.0 - 1e-9);
    if (!(b > a)) continue;
    const auto count = static_cast<std::size_t>(
        std::max(32.0, options.points_per_decade * std::log10(b / a)));
    const auto grid = log_space(a, b, count);
    std::vector<std::complex<double>> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = fr.value(grid[i]);

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double m0 = std::abs(v[i]) - 1.0, m1 = std::abs(v[i + 1]) - 1.0;
      if ((m0 > 0.0) != (m1 > 0.0)) {
        const double w = bisect_log(grid[i], grid[i + 1], log_mag);
        const double ph = fr(w).phase_deg;
        rep.gain_crossings.push_back({w, ph, std::abs(wrap180(ph + 180.0))});
      }
      const double i0 = v[i].imag(), i1 = v[i + 1].imag();
      if ((i0 > 0.0) != (i1 > 0.0) && (v[i].real() < 0.0 || v[i + 1].real() < 0.0)) {
        const double w = bisect_log(grid[i], grid[i + 1], imag);
        const auto val = fr.value(w);
        if (val.real() < 0.0) rep.phase_crossings.push_back({w, std::abs(val)});
      }
    }
  }

  for (const auto& c : rep.gain_crossings) {
    if (c.phase_margin_deg < rep.phase_margin) {
      rep.phase_margin = c.phase_margin_deg;
      rep.phase_margin_omega = c.omega;
    }
  }
  if (options.reference_omega > 0.0 && !rep.gain_crossings.empty()) {
    const auto it = std::min_element(rep.gain_crossings.begin(), rep.gain_crossings.end(),
                                     [&](const GainCrossing& x, const GainCrossing& y) {
                                       return std::abs(std::log(x.omega / options.reference_omega)) <
                                              std::abs(std::log(y.omega / options.reference_omega));
                                     });
    rep.local_phase_margin = it->phase_margin_deg;
    rep.local_crossover_omega = it->omega;
    rep.local_crossover_phase_deg = it->phase_deg;
  }
  for (const auto& c : rep.phase_crossings) {
    const double gm = 1.0 / c.magnitude;
    if (c.magnitude < 1.0 && gm < rep.gain_margin) {
      rep.gain_margin = gm;
      rep.gain_margin_omega = c.omega;
    }
    if (c.magnitude > 1.0 && (std::isnan(rep.lower_gain_margin) || gm > rep.lower_gain_margin))
      rep.lower_gain_margin = gm;
  }
  return rep;
}

MarginReport margins(const TransferFunction& plant, const PmrController& controller,
                     MarginOptions options) {
  if (!(options.reference_omega > 0.0)) options.reference_omega = controller.omega_nu;
  return margins(plant, controller.blocks(), options);
}

std::vector<LocusSample> response_data(const std::vector<TransferFunction>& blocks,
                                       std::span<const double> omegas) {
  const FrequencyResponse fr(blocks);
  std::vector<LocusSample> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    LocusSample s;
    s.omega = w;
    try {
      const auto r = fr(w);
      s.value = r.value;
      s.phase_deg = r.phase_deg;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::pole_at_frequency) throw;
      s.skipped = true;
      s.note = "pole on the imaginary axis";
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LocusSample> nyquist_data(const TransferFunction& plant,
                                      const std::vector<TransferFunction>& controller,
                                      std::span<const double> omegas, double mark_omega) {
  std::vector<double> grid(omegas.begin(), omegas.end());
  if (mark_omega > 0.0) grid.push_back(mark_omega);
  std::sort(grid.begin(), grid.end());
  auto out = response_data(loop_blocks(plant, controller), grid);
  if (mark_omega > 0.0)
    for (auto& s : out)
      if (s.omega == mark_omega) {
        s.marked = true;
        break;
      }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

StabilityReport stability_check(const TransferFunction& plant, const StateSpaceModel& controller,
                                const StabilityOptions& options) {
  StabilityReport rep;
  if (plant.delay() == 0.0) {
    const LoopModel m = build_loop(plant, controller, 1.0);
    rep.method = "eigenvalues";
    rep.max_real_part = -std::numeric_limits<double>::infinity();
    if (m.a.rows() > 0) {
      const Eigen::VectorXcd ev = m.a.eigenvalues();
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        rep.max_real_part = std::max(rep.max_real_part, ev(i).real());
    }
    rep.verdict = rep.max_real_part < -1e-9 ? Verdict::stable : Verdict::unstable;
    return rep;
  }

  // Free response of the loop from a nonzero initial state, judged by the
  // envelope of the state norm over ten windows.
  rep.method = "simulation";
  const double tau = plant.delay();
  const StateSpaceModel g = to_state_space(plant);
  double slow = std::numeric_limits<double>::infinity(), fast = 1.0 / tau;
  auto note = [&](const Eigen::MatrixXd& a) {
    if (a.rows() == 0) return;
    const Eigen::VectorXcd ev = a.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double w = std::abs(ev(i));
      if (w > 1e-12) {
        slow = std::min(slow, w);
        fast = std::max(fast, w);
      }
    }
  };
  note(controller.a);
  note(g.a);
  if (!std::isfinite(slow)) slow = 1.0 / tau;

  double step = options.step > 0.0 ? options.step : std::min(tau / 20.0, 0.05 / fast);
  step = tau / std::ceil(tau / step);
  const LoopModel m = build_loop(plant, controller, step);
  const Eigen::VectorXd z0 = Eigen::VectorXd::Ones(m.nc() + m.ng());
  if (z0.size() == 0) {
    rep.verdict = Verdict::stable;
    rep.envelope_ratio = 0.0;
    return rep;
  }

  // An automatic horizon starts at 20 periods of the slowest root and is
  // doubled while the envelope neither grows nor dies out.
  rep.horizon = options.horizon > 0.0 ? options.horizon
                                      : std::max(20.0 * 2.0 * kPi / slow, 200.0 * tau);
  const int attempts = options.horizon > 0.0 ? 1 : 6;
  constexpr std::size_t kWindows = 10;
  const double limit = 1e12 * z0.norm();
  for (int attempt = 0; attempt < attempts; ++attempt, rep.horizon *= 2.0) {
    const auto steps = static_cast<std::size_t>(std::ceil(rep.horizon / step));
    std::vector<double> env(kWindows, 0.0);
    bool blew_up = false;
    const bool finite = run_loop(m, step, steps, [](double) { return 0.0; }, z0,
                                 [&](const LoopSample& s, const Eigen::VectorXd& z) {
                                   const double size = z.norm() + std::abs(s.u);
                                   if (size > limit) {
                                     blew_up = true;
                                     return false;
                                   }
                                   const std::size_t w = std::min(kWindows - 1, s.k * kWindows / (steps + 1));
                                   env[w] = std::max(env[w], size);
                                   return true;
                                 });
    if (!finite || blew_up) {
      rep.verdict = Verdict::unstable;
      rep.envelope_ratio = std::numeric_limits<double>::infinity();
      return rep;
    }
    const double peak = *std::max_element(env.begin(), env.end());
    rep.envelope_ratio = env.back() / peak;
    const bool growing = env[kWindows - 1] > env[kWindows - 2] &&
                         env[kWindows - 2] > env[kWindows - 3] && env.back() > env.front();
    if (growing) {
      rep.verdict = Verdict::unstable;
      return rep;
    }
    if (rep.envelope_ratio < 1e-3) {
      rep.verdict = Verdict::stable;
      return rep;
    }
  }
  rep.horizon /= 2.0;
  rep.verdict = Verdict::inconclusive;
  return rep;
}

StabilityReport stability_check(const TransferFunction& plant, const PmrController& controller,
                                const StabilityOptions& options) {
  return stability_check(plant, controller.state_space(), options);
}

}  // namespace pmr
