#include "pmr/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pmr/error.hpp"

namespace pmr {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double get_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorKind::parse_error, std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

std::string get_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw Error(ErrorKind::parse_error, std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

Json to_json(const FrequencyPoint& p) {
  Json j;
  j["class"] = std::string(to_string(p.plant_class));
  j["nu_deg"] = p.nu_deg;
  j["omega_nu"] = p.omega_nu;
  j["m_nu"] = p.m_nu;
  j["source"] = std::string(to_string(p.source));
  return j;
}

Json to_json(const RapAutoResult& r) {
  Json j = to_json(r.point);
  j["a_nu"] = r.result.a_nu;
  j["d"] = r.config.relay_gain;
  j["f_mag"] = r.result.f_mag;
  j["gamma_deg"] = r.config.gamma_deg;
  j["period_dispersion"] = r.result.period_dispersion;
  Json attempts = Json::array();
  for (const auto& a : r.attempts)
    attempts.push_back({{"gamma_deg", a.gamma_deg}, {"success", a.success}, {"message", a.message}});
  j["attempts"] = attempts;
  return j;
}

FrequencyPoint point_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse_error, "frequency point must be a JSON object");
  const PlantClass c = parse_plant_class(get_string(j, "class"));
  const PointSource src = j.contains("source") ? parse_point_source(get_string(j, "source"))
                                               : PointSource::analytic;
  FrequencyPoint p = make_point(c, get_number(j, "omega_nu"), get_number(j, "m_nu"), src);
  if (j.contains("nu_deg") && std::abs(get_number(j, "nu_deg") - p.nu_deg) > 1e-9)
    throw Error(ErrorKind::invalid_argument, "nu_deg does not match the plant class");
  return p;
}

Json to_json(const PmrController& c) {
  Json j;
  j["class"] = std::string(to_string(c.plant_class));
  j["omega_nu"] = c.omega_nu;
  j["omega_r"] = c.omega_r;
  j["harmonics"] = {{"kind", std::string(to_string(c.harmonics.kind()))},
                    {"count", c.harmonics.count()}};
  if (c.lead)
    j["lead"] = {{"k_a", c.lead->k_a}, {"z_a", c.lead->z_a}, {"p_a", c.lead->p_a}};
  else
    j["lead"] = nullptr;
  Json modes = Json::array();
  for (const auto& m : c.modes)
    modes.push_back({{"n", m.n},
                     {"omega_rn", m.omega_rn},
                     {"xi", m.xi},
                     {"eta", m.eta},
                     {"kp", m.kp},
                     {"kr1", m.kr1},
                     {"kr2", m.kr2}});
  j["modes"] = modes;
  j["transfer_function"] = c.transfer_function().to_string();
  return j;
}

PmrController controller_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse_error, "controller must be a JSON object");
  PmrController c;
  c.plant_class = parse_plant_class(get_string(j, "class"));
  c.omega_nu = get_number(j, "omega_nu");
  c.omega_r = get_number(j, "omega_r");
  if (!j.contains("harmonics") || !j.at("harmonics").is_object())
    throw Error(ErrorKind::parse_error, "missing object field 'harmonics'");
  const Json& h = j.at("harmonics");
  c.harmonics = HarmonicSet(parse_harmonic_kind(get_string(h, "kind")),
                            static_cast<int>(get_number(h, "count")));
  if (j.contains("lead") && !j.at("lead").is_null()) {
    const Json& l = j.at("lead");
    c.lead = PhaseLead{get_number(l, "k_a"), get_number(l, "z_a"), get_number(l, "p_a")};
  }
  if (!j.contains("modes") || !j.at("modes").is_array())
    throw Error(ErrorKind::parse_error, "missing array field 'modes'");
  for (const Json& m : j.at("modes"))
    c.modes.push_back({static_cast<int>(get_number(m, "n")), get_number(m, "omega_rn"),
                       get_number(m, "xi"), get_number(m, "eta"), get_number(m, "kp"),
                       get_number(m, "kr1"), get_number(m, "kr2")});
  if (c.modes.size() != static_cast<std::size_t>(c.harmonics.count()))
    throw Error(ErrorKind::invalid_argument, "mode list does not match the harmonic set");
  return c;
}

Json to_json(const SimulationResult& r) {
  Json j;
  j["t_s"] = r.t_s;
  j["n_s"] = r.n_s;
  j["M_o"] = r.m_o;
  j["r_max"] = r.r_max;
  j["y_max"] = r.y_max;
  j["omega_r"] = r.omega_r;
  j["duration"] = r.duration;
  j["step"] = r.step;
  j["settled"] = r.settled;
  return j;
}

Json to_json(const MarginReport& m) {
  Json j;
  j["gain_margin"] = number_or_null(m.gain_margin);
  j["gain_margin_omega"] = number_or_null(m.gain_margin_omega);
  j["lower_gain_margin"] = number_or_null(m.lower_gain_margin);
  j["phase_margin"] = number_or_null(m.phase_margin);
  j["phase_margin_omega"] = number_or_null(m.phase_margin_omega);
  j["local_phase_margin"] = number_or_null(m.local_phase_margin);
  j["local_crossover_omega"] = number_or_null(m.local_crossover_omega);
  j["local_crossover_phase_deg"] = number_or_null(m.local_crossover_phase_deg);
  Json gc = Json::array();
  for (const auto& c : m.gain_crossings)
    gc.push_back({{"omega", c.omega}, {"phase_deg", c.phase_deg}, {"phase_margin", c.phase_margin_deg}});
  j["gain_crossings"] = gc;
  Json pc = Json::array();
  for (const auto& c : m.phase_crossings)
    pc.push_back({{"omega", c.omega}, {"magnitude", c.magnitude}});
  j["phase_crossings"] = pc;
  return j;
}

Json to_json(const StabilityReport& s) {
  Json j;
  j["verdict"] = std::string(to_string(s.verdict));
  j["method"] = s.method;
  j["max_real_part"] = number_or_null(s.max_real_part);
  j["envelope_ratio"] = number_or_null(s.envelope_ratio);
  if (s.horizon > 0.0) j["horizon"] = s.horizon;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_time_series_csv(std::ostream& os, const SimulationResult& r) {
  os << "t,r,y,u,e\n";
  for (std::size_t i = 0; i < r.time.size(); ++i)
    os << format_number(r.time[i]) << ',' << format_number(r.r[i]) << ',' << format_number(r.y[i])
       << ',' << format_number(r.u[i]) << ',' << format_number(r.e[i]) << '\n';
}

void write_bode_csv(std::ostream& os, std::span<const double> omegas,
                    const std::vector<std::pair<std::string, std::vector<LocusSample>>>& columns) {
  os << "omega";
  for (const auto& [name, _] : columns) os << ',' << name << "_mag_dB," << name << "_phase_deg";
  os << '\n';
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    os << format_number(omegas[i]);
    for (const auto& [_, samples] : columns) {
      const auto& s = samples[i];
      if (s.skipped)
        os << ",,";
      else
        os << ',' << format_number(20.0 * std::log10(std::abs(s.value))) << ','
           << format_number(s.phase_deg);
    }
    os << '\n';
  }
}

void write_nyquist_csv(std::ostream& os, const std::vector<LocusSample>& locus) {
  os << "omega,re,im,marked\n";
  for (const auto& s : locus) {
    if (s.skipped) continue;
    os << format_number(s.omega) << ',' << format_number(s.value.real()) << ','
       << format_number(s.value.imag()) << ',' << (s.marked ? 1 : 0) << '\n';
  }
}

}  // namespace pmr
