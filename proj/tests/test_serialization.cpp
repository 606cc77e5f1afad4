#include <doctest.h>

#include <limits>
#include <sstream>

#include "pmr/error.hpp"
#include "pmr/serialization.hpp"

using namespace pmr;

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("point JSON round trip") {
  const auto p = make_point(PlantClass::B, 1.6937, 0.25487, PointSource::rap);
  const Json j = to_json(p);
  CHECK(j["class"] == "B");
  CHECK(j["nu_deg"] == -120.0);
  const auto q = point_from_json(j);
  CHECK(q.plant_class == p.plant_class);
  CHECK(q.omega_nu == p.omega_nu);
  CHECK(q.m_nu == p.m_nu);
  CHECK(q.source == PointSource::rap);

  Json bad = j;
  bad["nu_deg"] = -60.0;
  CHECK_THROWS_AS(point_from_json(bad), Error);
  bad = j;
  bad.erase("omega_nu");
  CHECK_THROWS_AS(point_from_json(bad), Error);
  CHECK_THROWS_AS(point_from_json(Json::array()), Error);
}

TEST_CASE("controller JSON round trip") {
  const auto pt = make_point(PlantClass::A, 1.3, 0.39);
  const HarmonicSet hs(HarmonicKind::odd, 3);
  const auto c = tune({pt, omega_r_for_ratio(pt, hs, 0.5), hs, {0.0, 0.01, 0.02}, CoefficientSource::derived, {}});
  const Json j = to_json(c);
  const auto d = controller_from_json(j);
  CHECK(to_json(d).dump() == j.dump());
  REQUIRE(d.lead);
  CHECK(d.lead->z_a == c.lead->z_a);
  CHECK(d.modes[2].kr2 == c.modes[2].kr2);
  CHECK(d.modes[2].xi == 0.02);
  CHECK(j["transfer_function"].get<std::string>().find("den=[") != std::string::npos);

  Json broken = j;
  broken["modes"].erase(0);
  CHECK_THROWS_AS(controller_from_json(broken), Error);
}

TEST_CASE("margin report maps non-finite values to null") {
  MarginReport m;
  const Json j = to_json(m);
  CHECK(j["gain_margin"].is_null());
  CHECK(j["phase_margin"].is_null());
}

TEST_CASE("CSV writers") {
  SimulationResult r;
  r.time = {0.0, 0.5};
  r.r = {0.0, 1.0};
  r.y = {0.0, 0.25};
  r.u = {0.0, 2.0};
  r.e = {0.0, 0.75};
  std::ostringstream os;
  write_time_series_csv(os, r);
  CHECK(os.str() == "t,r,y,u,e\n0,0,0,0,0\n0.5,1,0.25,2,0.75\n");

  LocusSample a{1.0, {-0.5, 0.25}, 0.0, true, false, ""};
  LocusSample b{2.0, {0.0, 0.0}, 0.0, false, true, "pole"};
  std::ostringstream ny;
  write_nyquist_csv(ny, {a, b});
  CHECK(ny.str() == "omega,re,im,marked\n1,-0.5,0.25,1\n");

  std::ostringstream bode;
  const std::vector<double> w = {1.0};
  LocusSample ten{1.0, {10.0, 0.0}, 0.0, false, false, ""};
  write_bode_csv(bode, w, {{"g", {ten}}});
  CHECK(bode.str() == "omega,g_mag_dB,g_phase_deg\n1,20,0\n");
}

TEST_CASE("file reading errors") {
  try {
    read_text_file("/nonexistent/file.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse_error);
  }
}
