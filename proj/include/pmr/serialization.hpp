#pragma once

#include <json.hpp>
#include <ostream>
#include <span>
#include <string>

#include "pmr/analysis.hpp"
#include "pmr/ident.hpp"
#include "pmr/tuning.hpp"

namespace pmr {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

Json to_json(const FrequencyPoint& p);
Json to_json(const RapAutoResult& r);
FrequencyPoint point_from_json(const Json& j);

Json to_json(const PmrController& c);
PmrController controller_from_json(const Json& j);

Json to_json(const SimulationResult& r);
Json to_json(const MarginReport& m);
Json to_json(const StabilityReport& s);

/// Reads a whole file; throws Error(parse_error) when it cannot be opened.
std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);

void write_time_series_csv(std::ostream& os, const SimulationResult& r);
/// omega, mag_dB, phase_deg for each named response, side by side.
void write_bode_csv(std::ostream& os, std::span<const double> omegas,
                    const std::vector<std::pair<std::string, std::vector<LocusSample>>>& columns);
void write_nyquist_csv(std::ostream& os, const std::vector<LocusSample>& locus);

}  // namespace pmr
