#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmr/analysis.hpp"
#include "pmr/ident.hpp"
#include "pmr/serialization.hpp"
#include "pmr/tuning.hpp"

namespace pmr {

/// Size of one unit in the last printed digit of a decimal literal,
/// e.g. "0.0975" -> 1e-4, "1457" -> 1.
double last_digit_unit(std::string_view text);
double parse_decimal(std::string_view text);

enum class ExamplePlant { ga, gb, gc };

std::string_view to_string(ExamplePlant p);
ExamplePlant parse_example_plant(std::string_view text);
TransferFunction example_plant(ExamplePlant p);
PlantClass example_class(ExamplePlant p);
/// Relay gains used for the published experiment.
double example_relay_gain(ExamplePlant p);

/// Identification pinned to the published experiment: unrounded values
/// that round to the printed (omega_nu, M_nu) row.
FrequencyPoint pinned_point(ExamplePlant p);

struct RapRow {
  ExamplePlant plant;
  double gamma_deg;
  double d;
  std::string_view a_nu, f_mag, m_nu, omega_nu;
};

const std::vector<RapRow>& printed_rap_table();

struct PrintedGains {
  int n;
  std::string_view kp, kr1, kr2;
};

/// One column of a published tuning-and-performance table.
struct Scenario {
  ExamplePlant plant;
  HarmonicKind kind;
  int count;
  double max_ratio;  // max(n omega_r)/omega_nu: 0.1 or 0.9
  std::string_view ratio_text;  // printed omega_r/omega_nu
  std::vector<PrintedGains> gains;
  std::string_view t_s, n_s, m_o;
  /// eta_1 the printed column was computed with, when it departs from the
  /// variable table.
  std::optional<double> first_mode_eta;

  std::string id() const;
  HarmonicSet harmonics() const { return {kind, count}; }
};

/// All 36 published columns (N=1 columns appear under both harmonic sets).
const std::vector<Scenario>& paper_scenarios();

inline constexpr std::string_view kLeadKa = "2.50";
inline constexpr std::string_view kLeadZa = "0.526";
inline constexpr std::string_view kLeadPa = "3.29";

struct DiffCell {
  std::string item;
  std::string quantity;
  std::string expected_text;
  double expected = 0.0;
  double computed = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  std::string tolerance_kind;  // last_digit, relative, absolute
  bool pass = false;
};

struct DiffReport {
  std::string title;
  std::vector<DiffCell> cells;

  std::size_t passed() const;
  std::size_t failed() const { return cells.size() - passed(); }
  bool all_pass() const { return failed() == 0; }
  void append(const DiffReport& other);
};

DiffCell last_digit_cell(std::string item, std::string quantity, std::string_view expected,
                         double computed);
DiffCell relative_cell(std::string item, std::string quantity, std::string_view expected,
                       double computed, double tolerance);
DiffCell absolute_cell(std::string item, std::string quantity, std::string_view expected,
                       double computed, double tolerance);

/// Both coefficient tables re-derived from the variable tables: 128 cells.
DiffReport reproduce_coefficient_tables();

enum class BenchMode { pinned, end_to_end };

std::string_view to_string(BenchMode m);
BenchMode parse_bench_mode(std::string_view text);

struct BenchOptions {
  BenchMode mode = BenchMode::pinned;
  bool simulate = true;
  double step = 1e-3;
  unsigned threads = 0;  // 0 = hardware concurrency
};

inline constexpr double kEndToEndGainTolerance = 0.07;
inline constexpr double kSettlingTolerance = 0.10;
inline constexpr double kOvershootTolerancePp = 1.5;
inline constexpr double kRapOmegaTolerance = 0.03;
inline constexpr double kRapMagnitudeTolerance = 0.07;

struct ScenarioRun {
  FrequencyPoint point;
  PmrController controller;
  std::optional<SimulationResult> simulation;
};

/// Identification used by a bench run: pinned values, or RAP with the
/// published relay gain.
FrequencyPoint bench_point(ExamplePlant p, BenchMode mode);

/// Tunes and (optionally) simulates one column. The simulation horizon is
/// doubled until the run shows three clean reference periods after t_s.
ScenarioRun run_scenario(const Scenario& s, const FrequencyPoint& point, const BenchOptions& options);

DiffReport reproduce_example(const Scenario& s, const BenchOptions& options);
DiffReport reproduce_rap_table(const RapConfig& base = {});

struct BenchReport {
  std::vector<DiffReport> sections;

  std::size_t passed() const;
  std::size_t failed() const;
};

/// Coefficient tables, RAP table and every scenario. Scenarios run on a
/// worker pool; the report order is fixed.
BenchReport reproduce_all(const BenchOptions& options);

std::string to_markdown(const BenchReport& r, bool failures_only = false);
Json to_json(const DiffReport& r);
Json to_json(const BenchReport& r);

}  // namespace pmr
