#include "pmr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include "pmr/error.hpp"

namespace pmr {

double parse_decimal(std::string_view text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw Error(ErrorKind::parse_error, "not a decimal literal: " + std::string(text));
  return v;
}

double last_digit_unit(std::string_view text) {
  parse_decimal(text);
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return 1.0;
  return std::pow(10.0, -static_cast<double>(text.size() - dot - 1));
}

std::string_view to_string(ExamplePlant p) {
  switch (p) {
    case ExamplePlant::ga: return "ga";
    case ExamplePlant::gb: return "gb";
    case ExamplePlant::gc: return "gc";
  }
  return "?";
}

ExamplePlant parse_example_plant(std::string_view text) {
  if (text == "ga" || text == "Ga") return ExamplePlant::ga;
  if (text == "gb" || text == "Gb") return ExamplePlant::gb;
  if (text == "gc" || text == "Gc") return ExamplePlant::gc;
  throw Error(ErrorKind::invalid_argument, "unknown plant id: " + std::string(text));
}

TransferFunction example_plant(ExamplePlant p) {
  switch (p) {
    case ExamplePlant::ga: return {{1.0}, {1.0, 2.0, 1.0}, 1.0};
    case ExamplePlant::gb: return {{1.0}, {1.0, 2.0, 1.0}};
    case ExamplePlant::gc: return {{1.0}, {1.0, 1.0}};
  }
  throw Error(ErrorKind::invalid_argument, "unknown plant");
}

PlantClass example_class(ExamplePlant p) {
  switch (p) {
    case ExamplePlant::ga: return PlantClass::A;
    case ExamplePlant::gb: return PlantClass::B;
    case ExamplePlant::gc: return PlantClass::C;
  }
  return PlantClass::A;
}

double example_relay_gain(ExamplePlant p) {
  switch (p) {
    case ExamplePlant::ga: return 1.3;
    case ExamplePlant::gb: return 2.4;
    case ExamplePlant::gc: return 1.6;
  }
  return 1.0;
}

FrequencyPoint pinned_point(ExamplePlant p) {
  switch (p) {
    case ExamplePlant::ga: return make_point(PlantClass::A, 1.3168, 0.3917, PointSource::rap);
    case ExamplePlant::gb: return make_point(PlantClass::B, 1.6937, 0.25487, PointSource::rap);
    case ExamplePlant::gc: return make_point(PlantClass::C, 1.676, 0.50062, PointSource::rap);
  }
  throw Error(ErrorKind::invalid_argument, "unknown plant");
}

const std::vector<RapRow>& printed_rap_table() {
  static const std::vector<RapRow> rows = {
      {ExamplePlant::ga, 0.0, 1.3, "0.648", "1", "0.392", "1.32"},
      {ExamplePlant::gb, -60.0, 2.4, "0.589", "0.757", "0.255", "1.69"},
      {ExamplePlant::gc, -120.0, 1.6, "0.532", "0.501", "0.501", "1.68"},
  };
  return rows;
}

std::string Scenario::id() const {
  std::ostringstream os;
  os << to_string(plant) << " N=" << count << " (" << (kind == HarmonicKind::consecutive ? "i" : "ii")
     << ") ratio " << max_ratio;
  return os.str();
}

namespace {

using G = PrintedGains;
constexpr auto I = HarmonicKind::consecutive;
constexpr auto II = HarmonicKind::odd;
constexpr auto Ga = ExamplePlant::ga;
constexpr auto Gb = ExamplePlant::gb;
constexpr auto Gc = ExamplePlant::gc;

std::vector<Scenario> build_scenarios() {
  std::vector<Scenario> s;
  auto add = [&](ExamplePlant p, HarmonicKind k, int n, double ratio, std::string_view rt,
                 std::vector<G> g, std::string_view ts, std::string_view ns, std::string_view mo,
                 std::optional<double> eta = std::nullopt) {
    s.push_back({p, k, n, ratio, rt, std::move(g), ts, ns, mo, eta});
  };

  // G_a
  for (auto k : {I, II}) {
    add(Ga, k, 1, 0.1, "0.100", {{1, "1.01", "0.162", "-0.0112"}}, "126", "2.6", "0.5");
    add(Ga, k, 1, 0.9, "0.900", {{1, "0.272", "0.0311", "-0.244"}}, "115", "22", "4.4");
  }
  add(Ga, I, 3, 0.1, "0.0333",
      {{1, "1.02", "0.117", "-0.000997"}, {2, "0.999", "0.0229", "-0.00146"}, {3, "0.998", "0.0228", "-0.00328"}},
      "455", "3.2", "0.0");
  add(Ga, I, 3, 0.9, "0.300",
      {{1, "0.968", "0.107", "-0.0769"}, {2, "0.903", "0.0147", "-0.107"}, {3, "0.552", "0.00437", "-0.147"}},
      "321", "20", "1.3");
  add(Ga, I, 5, 0.1, "0.0200",
      {{1, "1.02", "0.0702", "-0.000134"}, {2, "1.00", "0.0230", "-0.000526"}, {3, "0.999", "0.0229", "-0.00118"},
       {4, "0.999", "0.0229", "-0.00210"}, {5, "0.998", "0.0228", "-0.00328"}},
      "1008", "4.2", "0.13");
  add(Ga, I, 5, 0.9, "0.180",
      {{1, "1.01", "0.0680", "-0.0108"}, {2, "0.972", "0.0200", "-0.0415"}, {3, "0.927", "0.0163", "-0.0890"},
       {4, "0.830", "0.0111", "-0.142"}, {5, "0.552", "0.00437", "-0.147"}},
      "1457", "55", "2.2");
  add(Ga, II, 3, 0.1, "0.0200",
      {{1, "1.02", "0.117", "-0.000359"}, {3, "0.999", "0.0229", "-0.00118"}, {5, "0.998", "0.0228", "-0.00328"}},
      "464", "1.9", "0.0");
  add(Ga, II, 3, 0.9, "0.180",
      {{1, "1.00", "0.113", "-0.0286"}, {3, "0.927", "0.0163", "-0.0890"}, {5, "0.555", "0.00437", "-0.148"}},
      "428", "16", "5.7");
  add(Ga, II, 5, 0.1, "0.0111",
      {{1, "1.02", "0.0702", "-0.0000414"}, {3, "1.00", "0.0230", "-0.000365"}, {5, "0.999", "0.0230", "-0.00199"},
       {7, "0.999", "0.0229", "-0.00199"}, {9, "0.998", "0.0228", "-0.00328"}},
      "957", "2.2", "1.3");
  add(Ga, II, 5, 0.9, "0.100",
      {{1, "1.02", "0.0695", "-0.00335"}, {3, "0.982", "0.0210", "-0.0291"}, {5, "0.940", "0.0173", "-0.136"},
       {7, "0.846", "0.0117", "-0.136"}, {9, "0.552", "0.00437", "-0.147"}},
      "1566", "33", "3.7");

  // G_b
  for (auto k : {I, II}) {
    add(Gb, k, 1, 0.1, "0.100", {{1, "3.85", "1.14", "-0.0562"}}, "27", "0.74", "1.9");
    add(Gb, k, 1, 0.9, "0.900", {{1, "1.22", "0.220", "-1.44"}}, "27", "6.5", "1.6");
  }
  add(Gb, I, 3, 0.1, "0.0333",
      {{1, "3.89", "0.923", "-0.00235"}, {2, "0.999", "0.0295", "-0.00242"}, {3, "0.998", "0.0293", "-0.00544"}},
      "96", "0.87", "0.070");
  add(Gb, I, 3, 0.9, "0.300",
      {{1, "3.81", "0.841", "-0.187"}, {2, "0.903", "0.0190", "-0.177"}, {3, "0.552", "0.00563", "-0.244"}},
      "46", "3.7", "0");
  add(Gb, I, 5, 0.1, "0.0200",
      {{1, "3.91", "0.697", "-0.000850"}, {2, "1.00", "0.0296", "-0.000871"}, {3, "0.999", "0.0295", "-0.00196"},
       {4, "0.999", "0.0294", "-0.00348"}, {5, "0.998", "0.0293", "-0.00544"}},
      "150", "0.81", "0.39");
  add(Gb, I, 5, 0.9, "0.180",
      {{1, "3.88", "0.675", "-0.0685"}, {2, "0.972", "0.0258", "-0.0686"}, {3, "0.927", "0.0210", "-0.147"},
       {4, "0.830", "0.0143", "-0.234"}, {5, "0.552", "0.00563", "-0.244"}},
      "117", "5.7", "0.046");
  add(Gb, II, 3, 0.1, "0.0200",
      {{1, "3.89", "0.923", "-0.000846"}, {3, "0.999", "0.0295", "-0.00196"}, {5, "0.998", "0.0293", "-0.00544"}},
      "218", "1.2", "3.3");
  add(Gb, II, 3, 0.9, "0.180",
      {{1, "3.86", "0.894", "-0.0681"}, {3, "0.927", "0.0210", "-0.147"}, {5, "0.552", "0.00563", "-0.244"}},
      "50", "2.4", "0.022");
  add(Gb, II, 5, 0.1, "0.0111",
      {{1, "3.91", "0.698", "-0.000263"}, {3, "1.00", "0.0296", "-0.000605"}, {5, "0.999", "0.0295", "-0.00329"},
       {7, "0.999", "0.0294", "-0.00329"}, {9, "0.998", "0.0293", "-0.00544"}},
      "519", "1.6", "4.2");
  add(Gb, II, 5, 0.9, "0.100",
      {{1, "3.90", "0.691", "-0.0212"}, {3, "0.982", "0.0270", "-0.0481"}, {5, "0.940", "0.0222", "-0.226"},
       {7, "0.846", "0.0151", "-0.226"}, {9, "0.552", "0.00563", "-0.244"}},
      "129", "3.5", "0.32");

  // G_c; the N=1 columns match eta_1 = 0.1 rather than the table's 0.9.
  for (auto k : {I, II}) {
    add(Gc, k, 1, 0.1, "0.100", {{1, "1.71", "1.66", "-0.0479"}}, "94", "2.5", "6.3", 0.1);
    add(Gc, k, 1, 0.9, "0.900", {{1, "0.332", "0.319", "-0.751"}}, "24", "5.8", "0", 0.1);
  }
  add(Gc, I, 3, 0.1, "0.0333",
      {{1, "1.76", "1.57", "-0.00105"}, {2, "0.999", "0.0292", "-0.00237"}, {3, "0.998", "0.0290", "-0.00532"}},
      "101", "0.90", "1.2");
  add(Gc, I, 3, 0.9, "0.300",
      {{1, "1.73", "1.43", "-0.0832"}, {2, "0.903", "0.0188", "-0.173"}, {3, "0.552", "0.00557", "-0.239"}},
      "49", "4.0", "0.018");
  add(Gc, I, 5, 0.1, "0.0200",
      {{1, "1.80", "1.47", "-0.000384"}, {2, "1.00", "0.0293", "-0.000853"}, {3, "0.999", "0.0292", "-0.00192"},
       {4, "0.999", "0.0291", "-0.00341"}, {5, "0.998", "0.0290", "-0.00532"}},
      "168", "0.9", "1.3");
  add(Gc, I, 5, 0.9, "0.180",
      {{1, "1.78", "1.42", "-0.0309"}, {2, "0.972", "0.0255", "-0.0672"}, {3, "0.927", "0.0208", "-0.144"},
       {4, "0.830", "0.0141", "-0.230"}, {5, "0.552", "0.00557", "-0.239"}},
      "113", "5.4", "0");
  add(Gc, II, 3, 0.1, "0.0200",
      {{1, "1.76", "1.57", "-0.000377"}, {3, "0.999", "0.0292", "-0.00192"}, {5, "0.998", "0.0290", "-0.00532"}},
      "340", "1.8", "3.0");
  add(Gc, II, 3, 0.9, "0.180",
      {{1, "1.75", "1.52", "-0.0303"}, {3, "0.927", "0.0208", "-0.144"}, {5, "0.552", "0.00557", "-0.239"}},
      "55", "2.6", "0.054");
  add(Gc, II, 5, 0.1, "0.0111",
      {{1, "1.80", "1.47", "-0.000118"}, {3, "1.00", "0.0293", "-0.000592"}, {5, "0.999", "0.0292", "-0.00322"},
       {7, "0.999", "0.0291", "-0.00322"}, {9, "0.998", "0.0290", "-0.00532"}},
      "736", "2.2", "2.9");
  add(Gc, II, 5, 0.9, "0.100",
      {{1, "1.79", "1.45", "-0.00957"}, {3, "0.982", "0.0267", "-0.0471"}, {5, "0.940", "0.0220", "-0.221"},
       {7, "0.846", "0.0150", "-0.221"}, {9, "0.552", "0.00557", "-0.239"}},
      "116", "3.1", "0.014");
  return s;
}

DiffCell make_cell(std::string item, std::string quantity, std::string_view expected, double computed) {
  DiffCell c;
  c.item = std::move(item);
  c.quantity = std::move(quantity);
  c.expected_text = std::string(expected);
  c.expected = parse_decimal(expected);
  c.computed = computed;
  c.abs_error = std::abs(computed - c.expected);
  c.rel_error = c.expected != 0.0 ? c.abs_error / std::abs(c.expected) : c.abs_error;
  return c;
}

// Slack for binary representation of the printed decimal.
constexpr double kRoundingSlack = 1e-9;

}  // namespace

const std::vector<Scenario>& paper_scenarios() {
  static const std::vector<Scenario> s = build_scenarios();
  return s;
}

DiffCell last_digit_cell(std::string item, std::string quantity, std::string_view expected, double computed) {
  DiffCell c = make_cell(std::move(item), std::move(quantity), expected, computed);
  c.tolerance = last_digit_unit(expected);
  c.tolerance_kind = "last_digit";
  c.pass = std::isfinite(computed) && c.abs_error <= c.tolerance * (1.0 + kRoundingSlack);
  return c;
}

DiffCell relative_cell(std::string item, std::string quantity, std::string_view expected, double computed,
                       double tolerance) {
  DiffCell c = make_cell(std::move(item), std::move(quantity), expected, computed);
  c.tolerance = tolerance;
  c.tolerance_kind = "relative";
  c.pass = std::isfinite(computed) && c.abs_error <= tolerance * std::abs(c.expected) * (1.0 + kRoundingSlack);
  return c;
}

DiffCell absolute_cell(std::string item, std::string quantity, std::string_view expected, double computed,
                       double tolerance) {
  DiffCell c = make_cell(std::move(item), std::move(quantity), expected, computed);
  c.tolerance = tolerance;
  c.tolerance_kind = "absolute";
  c.pass = std::isfinite(computed) && c.abs_error <= tolerance * (1.0 + kRoundingSlack);
  return c;
}

std::size_t DiffReport::passed() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const DiffCell& c) { return c.pass; }));
}

void DiffReport::append(const DiffReport& other) {
  cells.insert(cells.end(), other.cells.begin(), other.cells.end());
}

DiffReport reproduce_coefficient_tables() {
  DiffReport r;
  r.title = "Coefficient tables";
  for (PlantClass c : {PlantClass::A, PlantClass::B, PlantClass::C}) {
    for (int n = 1; n <= 5; ++n) {
      const auto k = derive_coefficients(nominal_first_mode_phase_deg(c, n), class_phase_deg(c),
                                         first_mode_magnitude(c), first_mode_eta(c, n))
                         .values();
      const auto& printed = printed_first_mode_table(c, n);
      const std::string item = "C_pr1 class " + std::string(to_string(c)) + " N=" + std::to_string(n);
      for (std::size_t i = 0; i < k.size(); ++i)
        r.cells.push_back(last_digit_cell(item, std::string(kCoefficientNames[i]), printed[i], k[i]));
    }
  }
  const auto k = derive_coefficients(kHigherModePhaseDeg, 0.0, 1.0, kHigherModeEta).values();
  const auto& printed = printed_higher_mode_table();
  for (std::size_t i = 0; i < k.size(); ++i)
    r.cells.push_back(last_digit_cell("C_prn", std::string(kCoefficientNames[i]), printed[i], k[i]));
  return r;
}

std::string_view to_string(BenchMode m) { return m == BenchMode::pinned ? "pinned" : "end_to_end"; }

BenchMode parse_bench_mode(std::string_view text) {
  if (text == "pinned") return BenchMode::pinned;
  if (text == "end_to_end" || text == "end-to-end") return BenchMode::end_to_end;
  throw Error(ErrorKind::invalid_argument, "unknown bench mode: " + std::string(text));
}

FrequencyPoint bench_point(ExamplePlant p, BenchMode mode) {
  if (mode == BenchMode::pinned) return pinned_point(p);
  return rap_auto(example_plant(p), example_relay_gain(p)).point;
}

ScenarioRun run_scenario(const Scenario& s, const FrequencyPoint& point, const BenchOptions& options) {
  const HarmonicSet hs = s.harmonics();
  TuningSpec spec;
  spec.point = point;
  spec.harmonics = hs;
  spec.omega_r = omega_r_for_ratio(point, hs, s.max_ratio);
  spec.source = options.mode == BenchMode::pinned ? CoefficientSource::printed : CoefficientSource::derived;
  spec.first_mode_eta = s.first_mode_eta;

  ScenarioRun run{point, tune(spec), std::nullopt};
  if (!options.simulate) return run;

  const TransferFunction plant = example_plant(s.plant);
  const ReferenceSignal ref = make_reference(default_reference_kind(hs), spec.omega_r, hs);
  SimulationOptions so;
  so.step = options.step;
  so.duration = std::max(200.0, 10.0 * ref.period());
  for (int attempt = 0;; ++attempt) {
    SimulationResult sim = simulate_closed_loop(plant, run.controller, ref, so);
    if (sim.settled || attempt == 5) {
      run.simulation = std::move(sim);
      break;
    }
    so.duration *= 2.0;
  }
  return run;
}

DiffReport reproduce_example(const Scenario& s, const BenchOptions& options) {
  DiffReport r;
  r.title = s.id() + " [" + std::string(to_string(options.mode)) + "]";
  const std::string item = s.id();
  const bool pinned = options.mode == BenchMode::pinned;

  const FrequencyPoint point = bench_point(s.plant, options.mode);
  const ScenarioRun run = run_scenario(s, point, options);

  const RapRow& row = printed_rap_table()[static_cast<std::size_t>(s.plant)];
  if (pinned) {
    r.cells.push_back(last_digit_cell(item, "omega_nu", row.omega_nu, point.omega_nu));
    r.cells.push_back(last_digit_cell(item, "M_nu", row.m_nu, point.m_nu));
  } else {
    r.cells.push_back(relative_cell(item, "omega_nu", row.omega_nu, point.omega_nu, kRapOmegaTolerance));
    r.cells.push_back(relative_cell(item, "M_nu", row.m_nu, point.m_nu, kRapMagnitudeTolerance));
  }

  auto gain_cell = [&](std::string name, std::string_view expected, double computed) {
    r.cells.push_back(pinned ? last_digit_cell(item, std::move(name), expected, computed)
                             : relative_cell(item, std::move(name), expected, computed, kEndToEndGainTolerance));
  };

  if (run.controller.lead) {
    gain_cell("k_a", kLeadKa, run.controller.lead->k_a);
    gain_cell("z_a", kLeadZa, run.controller.lead->z_a);
    gain_cell("p_a", kLeadPa, run.controller.lead->p_a);
  }
  r.cells.push_back(last_digit_cell(item, "omega_r/omega_nu", s.ratio_text, run.controller.omega_r / point.omega_nu));

  for (const PrintedGains& g : s.gains) {
    const auto it = std::find_if(run.controller.modes.begin(), run.controller.modes.end(),
                                 [&](const ResonantMode& m) { return m.n == g.n; });
    const std::string n = std::to_string(g.n);
    if (it == run.controller.modes.end())
      throw Error(ErrorKind::invalid_argument, "scenario lists mode " + n + " the controller lacks");
    gain_cell("K_p" + n, g.kp, it->kp);
    gain_cell("K_r1" + n, g.kr1, it->kr1);
    gain_cell("K_r2" + n, g.kr2, it->kr2);
  }

  if (run.simulation) {
    const SimulationResult& sim = *run.simulation;
    r.cells.push_back(relative_cell(item, "t_s", s.t_s, sim.t_s, kSettlingTolerance));
    DiffCell ns = make_cell(item, "n_s", s.n_s, sim.n_s);
    ns.tolerance = std::max(kSettlingTolerance * ns.expected, last_digit_unit(s.n_s));
    ns.tolerance_kind = "absolute";
    ns.pass = std::isfinite(sim.n_s) && ns.abs_error <= ns.tolerance * (1.0 + kRoundingSlack);
    r.cells.push_back(ns);
    r.cells.push_back(absolute_cell(item, "M_o", s.m_o, sim.m_o, kOvershootTolerancePp));
  }
  return r;
}

DiffReport reproduce_rap_table(const RapConfig& base) {
  DiffReport r;
  r.title = "RAP experiment";
  for (const RapRow& row : printed_rap_table()) {
    const std::string item = "RAP " + std::string(to_string(row.plant));
    const RapAutoResult res = rap_auto(example_plant(row.plant), row.d, base);
    r.cells.push_back(absolute_cell(item, "gamma_deg", std::to_string(static_cast<int>(row.gamma_deg)),
                                    res.config.gamma_deg, 0.0));
    r.cells.push_back(relative_cell(item, "omega_nu", row.omega_nu, res.point.omega_nu, kRapOmegaTolerance));
    r.cells.push_back(relative_cell(item, "M_nu", row.m_nu, res.point.m_nu, kRapMagnitudeTolerance));
    // Amplitude and filter gain depend on the filter realization; reported
    // with a looser bound.
    r.cells.push_back(relative_cell(item, "A_nu", row.a_nu, res.result.a_nu, 0.10));
    r.cells.push_back(relative_cell(item, "|F(j omega_nu)|", row.f_mag, res.result.f_mag, 0.10));
  }
  return r;
}

std::size_t BenchReport::passed() const {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.passed();
  return n;
}

std::size_t BenchReport::failed() const {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.failed();
  return n;
}

BenchReport reproduce_all(const BenchOptions& options) {
  BenchReport report;
  report.sections.push_back(reproduce_coefficient_tables());
  report.sections.push_back(reproduce_rap_table());

  const auto& scenarios = paper_scenarios();
  std::vector<DiffReport> results(scenarios.size());
  std::vector<std::string> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        results[i] = reproduce_example(scenarios[i], options);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(scenarios.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (!errors[i].empty()) {
      DiffReport failed;
      failed.title = scenarios[i].id();
      DiffCell c;
      c.item = scenarios[i].id();
      c.quantity = "error: " + errors[i];
      c.expected = c.computed = c.abs_error = c.rel_error = std::nan("");
      c.tolerance_kind = "none";
      failed.cells.push_back(c);
      report.sections.push_back(std::move(failed));
    } else {
      report.sections.push_back(std::move(results[i]));
    }
  }
  return report;
}

std::string to_markdown(const BenchReport& r, bool failures_only) {
  std::ostringstream os;
  os << "# Reproduction report\n\n"
     << "Cells: " << r.passed() + r.failed() << ", passed: " << r.passed() << ", failed: " << r.failed()
     << "\n";
  for (const auto& s : r.sections) {
    os << "\n## " << s.title << "\n\n"
       << s.passed() << "/" << s.cells.size() << " cells pass\n";
    bool header = false;
    for (const auto& c : s.cells) {
      if (failures_only && c.pass) continue;
      if (!header) {
        os << "\n| item | quantity | expected | computed | abs err | tolerance | pass |\n"
           << "|---|---|---|---|---|---|---|\n";
        header = true;
      }
      os << "| " << c.item << " | " << c.quantity << " | " << c.expected_text << " | "
         << format_number(c.computed) << " | " << format_number(c.abs_error) << " | "
         << format_number(c.tolerance) << " (" << c.tolerance_kind << ") | " << (c.pass ? "yes" : "NO")
         << " |\n";
    }
  }
  return os.str();
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const DiffReport& r) {
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"item", c.item},
                     {"quantity", c.quantity},
                     {"expected_text", c.expected_text},
                     {"expected", number_or_null(c.expected)},
                     {"computed", number_or_null(c.computed)},
                     {"abs_error", number_or_null(c.abs_error)},
                     {"rel_error", number_or_null(c.rel_error)},
                     {"tolerance", number_or_null(c.tolerance)},
                     {"tolerance_kind", c.tolerance_kind},
                     {"pass", c.pass}});
  }
  return {{"title", r.title}, {"passed", r.passed()}, {"failed", r.failed()}, {"cells", std::move(cells)}};
}

Json to_json(const BenchReport& r) {
  Json sections = Json::array();
  for (const auto& s : r.sections) sections.push_back(to_json(s));
  return {{"passed", r.passed()}, {"failed", r.failed()}, {"sections", std::move(sections)}};
}

}  // namespace pmr
