#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pmr/bench.hpp"
#include "pmr/error.hpp"
#include "pmr/tuning.hpp"
#include "test_support.hpp"

using namespace pmr;
using pmr::test::deg;
using pmr::test::rad;

namespace {

const TransferFunction Ga({1.0}, {1.0, 2.0, 1.0}, 1.0);
const TransferFunction Gb({1.0}, {1.0, 2.0, 1.0});
const TransferFunction Gc({1.0}, {1.0, 1.0});

// Value of Kp + (Kr1 s + Kr2)/(s^2 + 2 xi w s + w^2) at s = j omega, written out directly.
std::complex<double> pr_value(const ResonantMode& m, double omega) {
  const std::complex<double> s(0.0, omega);
  return m.kp + (m.kr1 * s + m.kr2) / (s * s + 2.0 * m.xi * m.omega_rn * s + m.omega_rn * m.omega_rn);
}

std::complex<double> loop_value(const TransferFunction& g, const PmrController& c, double omega) {
  std::complex<double> v = freq_response(g, omega).value;
  for (const auto& b : c.blocks()) v *= freq_response(b, omega).value;
  return v;
}

}  // namespace

TEST_CASE("harmonic sets") {
  CHECK(HarmonicSet(HarmonicKind::consecutive, 5).modes() == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(HarmonicSet(HarmonicKind::odd, 5).modes() == std::vector<int>{1, 3, 5, 7, 9});
  CHECK(HarmonicSet(HarmonicKind::odd, 3).max_mode() == 5);
  CHECK_THROWS_AS(HarmonicSet(HarmonicKind::odd, 0), Error);
  CHECK_THROWS_AS(HarmonicSet(HarmonicKind::odd, 6), Error);
  CHECK(parse_harmonic_kind("ii") == HarmonicKind::odd);
  CHECK(parse_harmonic_kind("i") == HarmonicKind::consecutive);
  CHECK_THROWS_AS(parse_harmonic_kind("iii"), Error);
}

TEST_CASE("lead phase") {
  CHECK(lead_phase_deg() == doctest::Approx(deg(std::atan(2.5) - std::atan(0.4))).epsilon(1e-14));
  CHECK(lead_phase_deg() == doctest::Approx(46.40).epsilon(1e-4));
}

TEST_CASE("target decomposition") {
  for (auto c : {PlantClass::A, PlantClass::B, PlantClass::C}) {
    for (auto k : {HarmonicKind::consecutive, HarmonicKind::odd}) {
      for (int n = 1; n <= 5; ++n) {
        const auto t = decompose_targets(c, {k, n});
        CHECK(t.p_lead.has_value() == (c == PlantClass::A));
        double phase = t.p_lead ? t.p_lead->phase_deg : 0.0;
        double mag = t.p_lead ? t.p_lead->magnitude : 1.0;
        REQUIRE(t.modes.size() == static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < t.modes.size(); ++i) {
          phase += t.modes[i].p.phase_deg;
          mag *= t.modes[i].p.magnitude;
          if (i > 0) {
            CHECK(t.modes[i].p.magnitude == 1.0);
            CHECK(t.modes[i].p.phase_deg == -1.0);
            CHECK(t.modes[i].eta == 0.9);
          }
        }
        CHECK(std::abs(phase - t.p_total.phase_deg) < 1e-9);
        CHECK(mag == doctest::Approx(t.p_total.magnitude).epsilon(1e-15));
        CHECK(t.modes[0].p.phase_deg == doctest::Approx(nominal_first_mode_phase_deg(c, n)).epsilon(1e-3));
      }
    }
  }
  const auto a1 = decompose_targets(PlantClass::A, {HarmonicKind::consecutive, 1});
  CHECK(a1.p_total.magnitude == 0.4);
  CHECK(a1.p_total.phase_deg == doctest::Approx(-140.6));
  CHECK(a1.modes[0].eta == 0.6);
  CHECK(nominal_first_mode_phase_deg(PlantClass::B, 3) == -128.0);
  CHECK(nominal_first_mode_phase_deg(PlantClass::C, 5) == -86.0);
  CHECK(first_mode_eta(PlantClass::A, 3) == 0.7);
  CHECK(first_mode_eta(PlantClass::A, 4) == 0.9);
  CHECK(first_mode_eta(PlantClass::B, 1) == 0.7);
}

TEST_CASE("coefficient examples") {
  const auto a = derive_coefficients(-187.0, -180.0, 0.4, 0.6);
  CHECK(a.alpha1 == doctest::Approx(0.397).epsilon(2e-3));
  CHECK(a.alpha2 == doctest::Approx(0.0975).epsilon(1e-3));
  CHECK(a.alpha3 == 0.36);
  CHECK(a.beta1 == doctest::Approx(0.0487).epsilon(2e-3));
  CHECK(a.beta2 == doctest::Approx(0.508).epsilon(2e-3));
  CHECK(a.beta3 == doctest::Approx(0.195).epsilon(3e-3));
  CHECK(a.zeta1 == doctest::Approx(0.254).epsilon(2e-3));
  CHECK(a.zeta2 == doctest::Approx(0.0624).epsilon(2e-3));

  CHECK(derive_coefficients(-184.0, -180.0, 0.4, 0.9).alpha3 == doctest::Approx(0.81));
  // Class B N=5: phi = -126 + 120 = -6 deg
  CHECK(derive_coefficients(-126.0, -120.0, 1.0, 0.9).alpha1 == doctest::Approx(std::cos(rad(-6.0))));

  const auto h = derive_coefficients(-1.0, 0.0, 1.0, 0.9);
  CHECK(h.beta3 == doctest::Approx(4.0 * std::sin(rad(1.0))));
  CHECK(h.alpha2 == doctest::Approx(0.0349).epsilon(1e-3));
  CHECK(h.beta2 == doctest::Approx(0.380).epsilon(1e-3));
  CHECK(h.zeta1 == doctest::Approx(0.190).epsilon(2e-3));
  CHECK(h.zeta2 == doctest::Approx(0.00663).epsilon(1e-3));

  const auto z = derive_coefficients(-60.0, -60.0, 0.7, 1.0);
  CHECK(z.alpha1 == 0.7);
  for (double v : {z.alpha2, z.beta1, z.beta2, z.beta3, z.zeta1, z.zeta2}) CHECK(v == doctest::Approx(0.0));

  CHECK_THROWS_AS(derive_coefficients(-1.0, 0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(derive_coefficients(-1.0, 0.0, 1.0, 1.1), Error);
}

TEST_CASE("derived coefficients reproduce the printed tables") {
  const auto r = reproduce_coefficient_tables();
  CHECK(r.cells.size() == 128);
  for (const auto& c : r.cells) {
    CAPTURE(c.item);
    CAPTURE(c.quantity);
    CHECK(c.pass);
  }
}

TEST_CASE("property: alpha3 is eta squared and the n>1 row is shared") {
  for (auto c : {PlantClass::A, PlantClass::B, PlantClass::C})
    for (int n = 1; n <= 5; ++n) {
      const double eta = first_mode_eta(c, n);
      const auto k = derive_coefficients(nominal_first_mode_phase_deg(c, n), class_phase_deg(c),
                                         first_mode_magnitude(c), eta);
      CHECK(k.alpha3 == eta * eta);
    }
  const auto& h = printed_higher_mode_table();
  CHECK(coefficients_from_text(h).alpha3 == doctest::Approx(0.81));
}

TEST_CASE("gain formula examples") {
  // Printed RAP point for G_a
  const auto pt = make_point(PlantClass::A, 1.32, 0.392);
  const auto k = coefficients_from_text(printed_first_mode_table(PlantClass::A, 1));
  const auto g = compute_mode_gains(k, pt.omega_nu, pt.m_nu, 1, 0.132, 0.0);
  CHECK(g.kp == doctest::Approx(1.006).epsilon(2e-3));
  CHECK(g.kr1 == doctest::Approx(0.162).epsilon(4e-3));
  CHECK(g.kr2 == doctest::Approx(-0.0112).epsilon(1e-2));

  const auto kb = coefficients_from_text(printed_first_mode_table(PlantClass::B, 1));
  const auto gb = compute_mode_gains(kb, 1.69, 0.255, 1, 0.9 * 1.69, 0.0);
  CHECK(gb.kp == doctest::Approx(1.22).epsilon(5e-3));
  CHECK(gb.kr1 == doctest::Approx(0.220).epsilon(5e-3));
  CHECK(gb.kr2 == doctest::Approx(-1.44).epsilon(5e-3));

  TuningCoefficients bad;
  bad.alpha3 = 1.0;
  CHECK_THROWS_AS(compute_mode_gains(bad, 1.0, 1.0, 1, 1.0, 0.0), Error);
}

TEST_CASE("phase lead block") {
  const auto lead = build_phase_lead(make_point(PlantClass::A, 1.316, 0.39));
  REQUIRE(lead);
  CHECK(lead->k_a == 2.5);
  CHECK(lead->z_a == doctest::Approx(0.5264));
  CHECK(lead->p_a == doctest::Approx(3.29));
  const auto r = freq_response(lead->transfer_function(), 1.316);
  CHECK(r.magnitude() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.phase_deg == doctest::Approx(46.3972).epsilon(1e-5));
  CHECK_FALSE(build_phase_lead(make_point(PlantClass::C, 1.0, 1.0)));
  CHECK_FALSE(build_phase_lead(make_point(PlantClass::B, 1.0, 1.0)));
}

TEST_CASE("property: fixed point for analytic identification") {
  for (const auto* g : {&Ga, &Gb, &Gc}) {
    const auto pt = classify(*g);
    const auto target = total_target(pt.plant_class).value();
    for (auto kind : {HarmonicKind::consecutive, HarmonicKind::odd})
      for (int n = 1; n <= 5; ++n)
        for (double ratio : {0.1, 0.5, 0.9}) {
          const HarmonicSet hs(kind, n);
          const auto c = tune({pt, omega_r_for_ratio(pt, hs, ratio), hs, {}, CoefficientSource::derived, {}});
          CHECK(std::abs(loop_value(*g, c, pt.omega_nu) - target) < 1e-9);
        }
  }
}

TEST_CASE("property: per-mode locations and zero-product identity") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cls = static_cast<PlantClass>(trial % 3);
    const auto pt = make_point(cls, 0.2 + 5.0 * u(rng), 0.05 + 2.0 * u(rng));
    const HarmonicSet hs(trial % 2 ? HarmonicKind::odd : HarmonicKind::consecutive, 1 + trial % 5);
    const double ratio = 0.05 + 0.9 * u(rng);
    const double wr = omega_r_for_ratio(pt, hs, ratio);
    const auto c = tune({pt, wr, hs, {}, CoefficientSource::derived, {}});
    const auto targets = decompose_targets(cls, hs);
    REQUIRE(c.modes.size() == targets.modes.size());
    for (std::size_t i = 0; i < c.modes.size(); ++i) {
      const auto& m = c.modes[i];
      const auto& t = targets.modes[i];
      // The first mode also cancels the plant point M_nu at nu.
      const auto want = i == 0 ? PolarPoint{t.p.magnitude / pt.m_nu, t.p.phase_deg - pt.nu_deg}.value()
                               : t.p.value();
      const auto v = pr_value(m, pt.omega_nu);
      CHECK(std::abs(v - want) < 1e-9 * std::abs(v));
      const double nw = m.n * wr;
      CHECK(m.omega_rn == doctest::Approx(nw));
      const double zp = (m.eta * m.eta - 1.0) * nw * nw * m.kp;
      CHECK(std::abs(m.kr2 - zp) <= 1e-12 * std::max(std::abs(zp), 1e-300));
      // xi = 0 puts the resonant poles on +-j n w_r exactly.
      const auto den = m.transfer_function().denominator();
      CHECK(den.size() == 3);
      CHECK(den[1] == 0.0);
      CHECK(den[2] == doctest::Approx(nw * nw).epsilon(1e-15));
    }
    if (c.lead) {
      const auto r = freq_response(c.lead->transfer_function(), pt.omega_nu);
      CHECK(r.magnitude() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: damped modes still hit their targets") {
  const auto pt = classify(Gb);
  const HarmonicSet hs(HarmonicKind::consecutive, 3);
  const double wr = omega_r_for_ratio(pt, hs, 0.6);
  for (double xi : {0.01, 0.05, 0.2}) {
    const auto c = tune({pt, wr, hs, {xi}, CoefficientSource::derived, {}});
    const auto t = decompose_targets(pt.plant_class, hs);
    for (std::size_t i = 0; i < c.modes.size(); ++i) {
      CHECK(c.modes[i].xi == xi);
      const auto& p = t.modes[i].p;
      const auto want = i == 0 ? PolarPoint{p.magnitude / pt.m_nu, p.phase_deg - pt.nu_deg}.value() : p.value();
      CHECK(std::abs(pr_value(c.modes[i], pt.omega_nu) - want) < 1e-9);
    }
  }
}

TEST_CASE("property: gains scale with the identified point") {
  const auto pt = make_point(PlantClass::B, 1.7, 0.3);
  const HarmonicSet hs(HarmonicKind::odd, 3);
  const auto base = tune({pt, omega_r_for_ratio(pt, hs, 0.4), hs, {}, CoefficientSource::derived, {}});
  const double s = 3.0;
  const auto pt2 = make_point(PlantClass::B, s * 1.7, 0.3 / 2.0);
  const auto scaled = tune({pt2, omega_r_for_ratio(pt2, hs, 0.4), hs, {}, CoefficientSource::derived, {}});
  const auto& m1 = base.modes[0];
  const auto& m2 = scaled.modes[0];
  CHECK(m2.kp == doctest::Approx(2.0 * m1.kp).epsilon(1e-12));
  CHECK(m2.kr1 == doctest::Approx(2.0 * s * m1.kr1).epsilon(1e-12));
  CHECK(m2.kr2 == doctest::Approx(2.0 * s * s * m1.kr2).epsilon(1e-12));
  CHECK(scaled.modes[1].kp == doctest::Approx(base.modes[1].kp).epsilon(1e-12));
}

TEST_CASE("controller assembly") {
  const auto pt = classify(Ga);
  const HarmonicSet hs(HarmonicKind::consecutive, 5);
  const auto c = tune({pt, omega_r_for_ratio(pt, hs, 0.9), hs, {}, CoefficientSource::derived, {}});
  CHECK(c.blocks().size() == 6);
  CHECK(c.state_space().order() == 11);
  CHECK(c.transfer_function().order() == 11);
  for (double w : {0.05, 0.5, 3.0}) {
    std::complex<double> v = 1.0;
    for (const auto& b : c.blocks()) v *= freq_response(b, w).value;
    CHECK(test::rel_err(freq_response(c.state_space(), w), v) < 1e-9);
  }
}

TEST_CASE("tune rejects invalid specs") {
  const auto pt = make_point(PlantClass::C, 1.68, 0.5);
  const HarmonicSet hs(HarmonicKind::odd, 2);
  CHECK_THROWS_AS(tune({pt, 1.7 / 3.0, hs, {}, CoefficientSource::derived, {}}), Error);
  CHECK_THROWS_AS(tune({pt, 0.0, hs, {}, CoefficientSource::derived, {}}), Error);
  CHECK_THROWS_AS(tune({pt, 0.1, hs, {0.1, 0.1, 0.1}, CoefficientSource::derived, {}}), Error);
  CHECK_THROWS_AS(tune({pt, 0.1, hs, {}, CoefficientSource::derived, 1.5}), Error);
  CHECK_NOTHROW(tune({pt, 0.1, hs, {0.1, 0.2}, CoefficientSource::derived, {}}));
}

TEST_CASE("printed coefficients with the published point") {
  const auto pt = pinned_point(ExamplePlant::ga);
  const HarmonicSet hs(HarmonicKind::consecutive, 1);
  const auto c = tune({pt, omega_r_for_ratio(pt, hs, 0.1), hs, {}, CoefficientSource::printed, {}});
  CHECK(c.modes[0].kp == doctest::Approx(1.01).epsilon(0.01));
  CHECK(c.modes[0].kr2 == doctest::Approx(-0.0112).epsilon(0.01));
}

TEST_CASE("first-mode eta override") {
  const auto pt = pinned_point(ExamplePlant::gc);
  const HarmonicSet hs(HarmonicKind::consecutive, 1);
  const auto c = tune({pt, omega_r_for_ratio(pt, hs, 0.1), hs, {}, CoefficientSource::printed, 0.1});
  CHECK(c.modes[0].eta == 0.1);
  CHECK(c.modes[0].kp == doctest::Approx(1.71).epsilon(0.003));
  const auto d = tune({pt, omega_r_for_ratio(pt, hs, 0.1), hs, {}, CoefficientSource::printed, {}});
  CHECK(d.modes[0].kp == doctest::Approx(1.73).epsilon(0.003));
}
