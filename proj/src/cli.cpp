#include "pmr/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include "pmr/analysis.hpp"
#include "pmr/bench.hpp"
#include "pmr/error.hpp"
#include "pmr/serialization.hpp"

namespace pmr {
namespace {

namespace fs = std::filesystem;

struct PlantArgs {
  std::string id, file, tf;
};

struct Context {
  std::string output_dir;
  std::ostream* out = nullptr;
};

CLI::Option_group* add_plant_options(CLI::App* sub, PlantArgs& a, std::string_view group = "plant") {
  auto* g = sub->add_option_group(std::string(group));
  g->add_option("--plant", a.id, "Built-in plant: ga, gb or gc");
  g->add_option("--plant-file", a.file, "File holding 'num=[..]; den=[..]; delay=..'")
      ->check(CLI::ExistingFile);
  g->add_option("--tf", a.tf, "Inline plant, e.g. \"num=[1]; den=[1,2,1]; delay=1\"");
  g->require_option(1);
  return g;
}

TransferFunction resolve_plant(const PlantArgs& a) {
  if (!a.id.empty()) return example_plant(parse_example_plant(a.id));
  if (!a.file.empty()) return TransferFunction::parse(read_text_file(a.file));
  return TransferFunction::parse(a.tf);
}

fs::path resolve_path(const Context& ctx, const std::string& path) {
  fs::path p(path);
  if (!ctx.output_dir.empty() && p.is_relative()) p = fs::path(ctx.output_dir) / p;
  return p;
}

std::ofstream open_output(const Context& ctx, const std::string& path) {
  const fs::path p = resolve_path(ctx, path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw Error(ErrorKind::invalid_argument, "cannot write " + p.string());
  return os;
}

void emit_text(const Context& ctx, const std::string& path, const std::string& text) {
  if (path.empty()) {
    *ctx.out << text;
    return;
  }
  auto os = open_output(ctx, path);
  os << text;
}

void emit_json(const Context& ctx, const std::string& path, const Json& j) {
  emit_text(ctx, path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  PlantArgs plant;
  std::string out;
};

void cmd_classify(const Context& ctx, const ClassifyArgs& a) {
  emit_json(ctx, a.out, to_json(classify(resolve_plant(a.plant))));
}

struct IdentifyArgs {
  PlantArgs plant;
  double d = 0.0;
  std::optional<double> gamma;
  double duration = RapConfig{}.sim_duration;
  double step = RapConfig{}.step;
  double omega_min = RapConfig{}.omega_min;
  double omega_max = RapConfig{}.omega_max;
  int foi_pairs = RapConfig{}.foi_pairs;
  std::string out;
};

void cmd_identify(const Context& ctx, const IdentifyArgs& a) {
  const TransferFunction plant = resolve_plant(a.plant);
  double d = a.d;
  if (!(d > 0.0)) d = a.plant.id.empty() ? 1.0 : example_relay_gain(parse_example_plant(a.plant.id));

  RapConfig cfg;
  cfg.sim_duration = a.duration;
  cfg.step = a.step;
  cfg.omega_min = a.omega_min;
  cfg.omega_max = a.omega_max;
  cfg.foi_pairs = a.foi_pairs;

  RapAutoResult res;
  if (a.gamma) {
    cfg.gamma_deg = *a.gamma;
    cfg.relay_gain = d;
    res.result = run_rap(plant, cfg);
    res.point = res.result.point;
    res.config = cfg;
    res.attempts.push_back({cfg.gamma_deg, true, "limit cycle detected"});
  } else {
    res = rap_auto(plant, d, cfg);
  }
  emit_json(ctx, a.out, to_json(res));
}

struct TuneArgs {
  PlantArgs plant;
  std::string point;
  int modes = 1;
  std::string harmonics = "i";
  std::optional<double> wr_ratio;
  std::optional<double> omega_r;
  std::vector<double> xi;
  std::string coefficients = "derived";
  std::optional<double> eta1;
  std::string out;
};

void cmd_tune(const Context& ctx, const TuneArgs& a) {
  TuningSpec spec;
  spec.point = a.point.empty() ? classify(resolve_plant(a.plant)) : point_from_json(read_json_file(a.point));
  spec.harmonics = HarmonicSet(parse_harmonic_kind(a.harmonics), a.modes);
  spec.omega_r = a.omega_r ? *a.omega_r : omega_r_for_ratio(spec.point, spec.harmonics, a.wr_ratio.value_or(0.1));
  spec.xi = a.xi;
  spec.source = parse_coefficient_source(a.coefficients);
  spec.first_mode_eta = a.eta1;
  emit_json(ctx, a.out, to_json(tune(spec)));
}

struct SimulateArgs {
  PlantArgs plant;
  std::string controller;
  std::string reference;
  double amplitude = 1.0;
  double duration = 0.0;
  double step = SimulationOptions{}.step;
  std::size_t max_recorded = SimulationOptions{}.max_recorded;
  std::string out;
  std::string csv;
};

void cmd_simulate(const Context& ctx, const SimulateArgs& a) {
  const TransferFunction plant = resolve_plant(a.plant);
  const PmrController c = controller_from_json(read_json_file(a.controller));
  const ReferenceKind kind =
      a.reference.empty() ? default_reference_kind(c.harmonics) : parse_reference_kind(a.reference);
  const ReferenceSignal ref = make_reference(kind, c.omega_r, c.harmonics, a.amplitude);

  SimulationOptions so;
  so.step = a.step;
  so.max_recorded = a.max_recorded;
  const bool automatic = !(a.duration > 0.0);
  so.duration = automatic ? std::max(200.0, 10.0 * ref.period()) : a.duration;
  SimulationResult r = simulate_closed_loop(plant, c, ref, so);
  // Automatic horizon: double until three clean periods follow t_s.
  for (int i = 0; automatic && !r.settled && i < 5; ++i) {
    so.duration *= 2.0;
    r = simulate_closed_loop(plant, c, ref, so);
  }

  Json j = to_json(r);
  j["reference"] = {{"kind", std::string(to_string(kind))}, {"amplitude", a.amplitude}, {"peak", ref.peak()}};
  emit_json(ctx, a.out, j);
  if (!a.csv.empty()) {
    auto os = open_output(ctx, a.csv);
    write_time_series_csv(os, r);
  }
}

struct MarginsArgs {
  PlantArgs plant;
  std::string controller;
  double omega_min = 0.0;
  double omega_max = 0.0;
  int points_per_decade = MarginOptions{}.points_per_decade;
  double reference_omega = 0.0;
  bool no_stability = false;
  std::string out;
  std::string bode;
  std::string nyquist;
};

void cmd_margins(const Context& ctx, const MarginsArgs& a) {
  const TransferFunction plant = resolve_plant(a.plant);
  const PmrController c = controller_from_json(read_json_file(a.controller));

  MarginOptions mo;
  mo.omega_min = a.omega_min;
  mo.omega_max = a.omega_max;
  mo.points_per_decade = a.points_per_decade;
  mo.reference_omega = a.reference_omega;
  Json j;
  j["margins"] = to_json(margins(plant, c, mo));
  if (!a.no_stability) j["stability"] = to_json(stability_check(plant, c));
  emit_json(ctx, a.out, j);

  if (a.bode.empty() && a.nyquist.empty()) return;
  const double lo = a.omega_min > 0.0 ? a.omega_min : 1e-3 * c.omega_r;
  const double hi = a.omega_max > 0.0 ? a.omega_max : 1e2 * c.omega_nu;
  const auto decades = std::max(1.0, std::log10(hi / lo));
  const auto omegas = log_space(lo, hi, static_cast<std::size_t>(decades * a.points_per_decade) + 1);
  const auto blocks = c.blocks();
  if (!a.bode.empty()) {
    std::vector<TransferFunction> loop = blocks;
    loop.push_back(plant);
    auto os = open_output(ctx, a.bode);
    write_bode_csv(os, omegas,
                   {{"plant", response_data({plant}, omegas)},
                    {"controller", response_data(blocks, omegas)},
                    {"loop", response_data(loop, omegas)}});
  }
  if (!a.nyquist.empty()) {
    auto os = open_output(ctx, a.nyquist);
    write_nyquist_csv(os, nyquist_data(plant, blocks, omegas, c.omega_nu));
  }
}

struct ReproduceArgs {
  std::string mode = "pinned";
  bool no_sim = false;
  unsigned threads = 0;
  double step = BenchOptions{}.step;
  std::string markdown;
  std::string json;
  bool failures_only = false;
  bool strict = false;
};

int cmd_reproduce(const Context& ctx, const ReproduceArgs& a) {
  BenchOptions o;
  o.mode = parse_bench_mode(a.mode);
  o.simulate = !a.no_sim;
  o.threads = a.threads;
  o.step = a.step;
  const BenchReport r = reproduce_all(o);
  const std::string md = to_markdown(r, a.failures_only);
  if (!a.markdown.empty() || a.json.empty()) emit_text(ctx, a.markdown, md);
  if (!a.json.empty()) emit_json(ctx, a.json, to_json(r));
  return a.strict && r.failed() > 0 ? kExitComputation : kExitOk;
}

void report_error(std::ostream& err, std::string_view kind, std::string_view message) {
  Json j = {{"error", std::string(kind)}, {"message", std::string(message)}};
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-free auto-tuning of proportional-multi-resonant controllers", "pmrtune"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file; [section] names match subcommands");
  Context ctx;
  ctx.out = &out;
  app.add_option("--output-dir", ctx.output_dir, "Base directory for relative output paths")
      ->envname("PMR_OUTPUT_DIR");

  auto step_option = [](CLI::App* sub, double& step, const std::string& help) {
    sub->add_option("--step", step, help)->envname("PMR_STEP")->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("classify", "Analytic class and frequency point of a model");
  add_plant_options(classify_cmd, ca.plant);
  classify_cmd->add_option("-o,--out", ca.out, "Output JSON (default: stdout)");

  IdentifyArgs ia;
  auto* identify_cmd = app.add_subcommand("identify", "Relay-with-adjustable-phase experiment");
  add_plant_options(identify_cmd, ia.plant);
  identify_cmd->add_option("-d,--relay-gain", ia.d, "Relay amplitude (default: published value or 1)");
  identify_cmd->add_option("--gamma", ia.gamma, "Run a single experiment at this filter phase (deg)");
  identify_cmd->add_option("--duration", ia.duration, "Simulated time per attempt")
      ->check(CLI::PositiveNumber)->capture_default_str();
  step_option(identify_cmd, ia.step, "Integration step");
  identify_cmd->add_option("--omega-min", ia.omega_min, "Lower edge of the filter band")->capture_default_str();
  identify_cmd->add_option("--omega-max", ia.omega_max, "Upper edge of the filter band")->capture_default_str();
  identify_cmd->add_option("--foi-pairs", ia.foi_pairs, "Pole/zero pairs of the filter")
      ->check(CLI::Range(1, 64))->capture_default_str();
  identify_cmd->add_option("-o,--out", ia.out, "Output JSON (default: stdout)");

  TuneArgs ta;
  auto* tune_cmd = app.add_subcommand("tune", "Compute PMR controller gains from a frequency point");
  auto* tune_src = tune_cmd->add_option_group("source");
  tune_src->add_option("--point", ta.point, "Point JSON from classify or identify")->check(CLI::ExistingFile);
  tune_src->add_option("--plant", ta.plant.id, "Built-in plant, classified analytically");
  tune_src->add_option("--plant-file", ta.plant.file, "Plant file, classified analytically")
      ->check(CLI::ExistingFile);
  tune_src->add_option("--tf", ta.plant.tf, "Inline plant, classified analytically");
  tune_src->require_option(1);
  tune_cmd->add_option("-N,--modes", ta.modes, "Number of resonant modes")->check(CLI::Range(1, 5))
      ->capture_default_str();
  tune_cmd->add_option("--harmonics", ta.harmonics, "i (consecutive) or ii (odd)")
      ->check(CLI::IsMember({"i", "ii", "consecutive", "odd"}))->capture_default_str();
  auto* ratio_opt = tune_cmd->add_option("--wr-ratio", ta.wr_ratio, "max(n omega_r)/omega_nu (default 0.1)");
  tune_cmd->add_option("--omega-r", ta.omega_r, "Fundamental frequency, rad/s")->excludes(ratio_opt);
  tune_cmd->add_option("--xi", ta.xi, "Damping per mode (one value is broadcast)")->delimiter(',');
  tune_cmd->add_option("--coefficients", ta.coefficients, "derived or printed")
      ->check(CLI::IsMember({"derived", "printed"}))->capture_default_str();
  tune_cmd->add_option("--eta1", ta.eta1, "Override eta of the first mode");
  tune_cmd->add_option("-o,--out", ta.out, "Output JSON (default: stdout)");

  SimulateArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "Closed-loop reference tracking");
  add_plant_options(simulate_cmd, sa.plant);
  simulate_cmd->add_option("-c,--controller", sa.controller, "Controller JSON from tune")
      ->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--reference", sa.reference, "sine, sawtooth or square (default from harmonics)")
      ->check(CLI::IsMember({"sine", "sawtooth", "square"}));
  simulate_cmd->add_option("--amplitude", sa.amplitude, "Reference scale")->capture_default_str();
  simulate_cmd->add_option("--duration", sa.duration, "Simulated time (default: automatic)");
  step_option(simulate_cmd, sa.step, "Integration step");
  simulate_cmd->add_option("--max-recorded", sa.max_recorded, "Samples kept per signal")->capture_default_str();
  simulate_cmd->add_option("-o,--out", sa.out, "Output JSON (default: stdout)");
  simulate_cmd->add_option("--csv", sa.csv, "Time series CSV (t, r, y, u, e)");

  MarginsArgs ma;
  auto* margins_cmd = app.add_subcommand("margins", "Stability margins and loop responses");
  add_plant_options(margins_cmd, ma.plant);
  margins_cmd->add_option("-c,--controller", ma.controller, "Controller JSON from tune")
      ->required()->check(CLI::ExistingFile);
  margins_cmd->add_option("--omega-min", ma.omega_min, "Sweep start (default: automatic)");
  margins_cmd->add_option("--omega-max", ma.omega_max, "Sweep end (default: automatic)");
  margins_cmd->add_option("--points-per-decade", ma.points_per_decade, "Sweep density")
      ->check(CLI::Range(10, 100000))->capture_default_str();
  margins_cmd->add_option("--reference-omega", ma.reference_omega, "Frequency for the local margin");
  margins_cmd->add_flag("--no-stability", ma.no_stability, "Skip the closed-loop stability check");
  margins_cmd->add_option("-o,--out", ma.out, "Output JSON (default: stdout)");
  margins_cmd->add_option("--bode", ma.bode, "Bode CSV of plant, controller and loop");
  margins_cmd->add_option("--nyquist", ma.nyquist, "Nyquist CSV of the loop");

  ReproduceArgs ra;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Diff the published example tables");
  reproduce_cmd->add_option("--mode", ra.mode, "pinned or end_to_end")
      ->check(CLI::IsMember({"pinned", "end_to_end", "end-to-end"}))->capture_default_str();
  reproduce_cmd->add_flag("--no-sim", ra.no_sim, "Gains only");
  reproduce_cmd->add_option("--threads", ra.threads, "Worker threads (0: all cores)")->capture_default_str();
  step_option(reproduce_cmd, ra.step, "Integration step");
  reproduce_cmd->add_option("--markdown", ra.markdown, "Markdown report (default: stdout)");
  reproduce_cmd->add_option("--json", ra.json, "JSON report");
  reproduce_cmd->add_flag("--failures-only", ra.failures_only, "List only failing cells");
  reproduce_cmd->add_flag("--strict", ra.strict, "Exit 1 when any cell fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*classify_cmd) cmd_classify(ctx, ca);
    if (*identify_cmd) cmd_identify(ctx, ia);
    if (*tune_cmd) cmd_tune(ctx, ta);
    if (*simulate_cmd) cmd_simulate(ctx, sa);
    if (*margins_cmd) cmd_margins(ctx, ma);
    if (*reproduce_cmd) return cmd_reproduce(ctx, ra);
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return kExitComputation;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kExitComputation;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"pmrtune"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pmr
