#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pmr/error.hpp"
#include "pmr/lti.hpp"
#include "test_support.hpp"

using namespace pmr;
using pmr::test::deg;
using pmr::test::rel_err;

namespace {

// Root of w + 2 atan(w) = pi by plain bisection.
double ga_ultimate_frequency() {
  double lo = 0.5, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + 2.0 * std::atan(mid) < std::numbers::pi ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> unit_step(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

TEST_CASE("polynomial helpers") {
  CHECK(poly::multiply(Polynomial{1, 1}, Polynomial{1, 1}) == Polynomial{1, 2, 1});
  CHECK(poly::add(Polynomial{1, 0}, Polynomial{2}) == Polynomial{1, 2});
  CHECK(poly::trimmed({0, 0, 3, 1}) == Polynomial{3, 1});
  CHECK(poly::degree(Polynomial{0, 2, 1}) == 1);
  CHECK(poly::is_zero(Polynomial{0, 0}));
  CHECK(std::abs(poly::evaluate(Polynomial{1, 2, 1}, {0.0, 1.0}) - std::complex<double>(0, 2)) < 1e-15);

  auto r = poly::roots(Polynomial{1, 0, -4});
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(), [](auto a, auto b) { return a.real() < b.real(); });
  CHECK(r[0].real() == doctest::Approx(-2.0));
  CHECK(r[1].real() == doctest::Approx(2.0));
}

TEST_CASE("transfer function construction and validation") {
  const TransferFunction g({0.0, 1.0}, {1.0, 2.0, 1.0}, 0.5);
  CHECK(g.numerator() == Polynomial{1.0});
  CHECK(g.order() == 2);
  CHECK(g.relative_degree() == 2);
  CHECK(g.is_strictly_proper());
  CHECK(g.delay() == 0.5);

  CHECK_THROWS_AS(TransferFunction({1.0}, {0.0}), Error);
  CHECK_THROWS_AS(TransferFunction({1.0}, {1.0, 1.0}, -1.0), Error);
  CHECK_THROWS_AS(TransferFunction({NAN}, {1.0, 1.0}), Error);
  CHECK_FALSE(TransferFunction({1.0, 0.0, 0.0}, {1.0, 1.0}).is_proper());
}

TEST_CASE("parse and print round trip") {
  const auto g = TransferFunction::parse("num=[1]; den=[1, 2, 1]; delay=1");
  CHECK(g.denominator() == Polynomial{1, 2, 1});
  CHECK(g.delay() == 1.0);

  const auto h = TransferFunction::parse("# comment\nden = [1, 0.1]\nnum=[0.3333333333333333, 2]\n");
  const auto back = TransferFunction::parse(h.to_string());
  CHECK(back.numerator() == h.numerator());
  CHECK(back.denominator() == h.denominator());
  CHECK(back.delay() == h.delay());

  auto kind_of = [](std::string_view text) {
    try {
      TransferFunction::parse(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::invalid_argument;
  };
  CHECK(kind_of("num=[1]") == ErrorKind::parse_error);
  CHECK(kind_of("num=[1]; den=[1, x]") == ErrorKind::parse_error);
  CHECK(kind_of("num=[1]; den=[1]; gain=2") == ErrorKind::parse_error);
  CHECK(kind_of("num=1; den=[1]") == ErrorKind::parse_error);
}

TEST_CASE("frequency response of first-order lag") {
  const TransferFunction gc({1.0}, {1.0, 1.0});
  auto r0 = freq_response(gc, 0.0);
  CHECK(r0.magnitude() == doctest::Approx(1.0));
  CHECK(r0.phase_deg == doctest::Approx(0.0));
  auto r1 = freq_response(gc, 1.0);
  CHECK(r1.magnitude() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(r1.phase_deg == doctest::Approx(-45.0).epsilon(1e-12));
}

TEST_CASE("delayed plant phase is unwrapped past -180") {
  const TransferFunction ga({1.0}, {1.0, 2.0, 1.0}, 1.0);
  const double wu = ga_ultimate_frequency();
  const auto r = freq_response(ga, wu);
  CHECK(r.phase_deg == doctest::Approx(-180.0).epsilon(1e-9));
  CHECK(r.magnitude() == doctest::Approx(1.0 / (1.0 + wu * wu)).epsilon(1e-12));
  CHECK(wu == doctest::Approx(1.3065).epsilon(1e-4));

  for (double w : {0.01, 0.5, 2.0, 5.0, 20.0}) {
    const double expected = -deg(w) - 2.0 * deg(std::atan(w));
    CHECK(freq_response(ga, w).phase_deg == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("type-1 phase starts at -90") {
  const TransferFunction g({1.0}, {1.0, 1.0, 0.0});
  CHECK(freq_response(g, 1e-4).phase_deg == doctest::Approx(-90.0).epsilon(1e-3));
  CHECK(freq_response(g, 1.0).phase_deg == doctest::Approx(-135.0).epsilon(1e-12));
}

TEST_CASE("pole on the imaginary axis is reported") {
  const TransferFunction g({1.0}, {1.0, 0.0, 1.0});
  try {
    freq_response(g, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::pole_at_frequency);
  }
  const FrequencyResponse fr(g);
  const auto axis = fr.axis_pole_frequencies();
  REQUIRE(axis.size() == 1);
  CHECK(axis[0] == doctest::Approx(1.0));
}

TEST_CASE("series examples") {
  const TransferFunction lag({1.0}, {1.0, 1.0});
  const auto sq = series(lag, lag);
  CHECK(sq.denominator() == Polynomial{1, 2, 1});
  const auto same = series(lag, TransferFunction::unity());
  CHECK(same.numerator() == lag.numerator());
  CHECK(same.denominator() == lag.denominator());
  CHECK(series(TransferFunction({1}, {1, 1}, 0.5), TransferFunction({1}, {1, 2}, 0.25)).delay() == 0.75);
}

TEST_CASE("property: series response equals product of responses") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lw(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = test::random_stable_plant(rng);
    auto b = test::random_stable_plant(rng);
    a = TransferFunction(a.numerator(), a.denominator(), 0.1 * (trial % 3));
    const double w = std::pow(10.0, lw(rng));
    const auto prod = freq_response(a, w).value * freq_response(b, w).value;
    CHECK(rel_err(freq_response(series(a, b), w).value, prod) < 1e-10);
  }
}

TEST_CASE("FrequencyResponse of a block chain matches the expanded product") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TransferFunction> blocks;
    TransferFunction total = TransferFunction::unity();
    for (int i = 0; i < 3; ++i) {
      blocks.push_back(test::random_stable_plant(rng, 2));
      total = series(total, blocks.back());
    }
    const FrequencyResponse chain(blocks);
    for (double w : {0.05, 0.7, 3.0}) {
      const auto c = chain(w);
      const auto t = freq_response(total, w);
      CHECK(rel_err(c.value, t.value) < 1e-10);
      CHECK(c.phase_deg == doctest::Approx(t.phase_deg).epsilon(1e-9));
    }
  }
}

TEST_CASE("state-space realization") {
  const auto s1 = to_state_space(TransferFunction({1.0}, {1.0, 1.0}));
  REQUIRE(s1.order() == 1);
  CHECK(s1.a(0, 0) == -1.0);
  CHECK(s1.b(0) == 1.0);
  CHECK(s1.c(0) == 1.0);
  CHECK(s1.d == 0.0);

  const auto s2 = to_state_space(TransferFunction({1.0, 2.0}, {1.0, 1.0}));
  CHECK(s2.d == 1.0);
  CHECK(s2.c(0) == doctest::Approx(1.0));
  CHECK(s2.a(0, 0) == -1.0);

  CHECK(to_state_space(TransferFunction::gain(3.0)).d == 3.0);
  try {
    to_state_space(TransferFunction({1.0, 0.0}, {1.0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::improper_system);
  }
}

TEST_CASE("property: realization reproduces the frequency response") {
  std::mt19937_64 rng(3);
  const auto omegas = log_space(1e-2, 1e2, 100);
  for (int trial = 0; trial < 50; ++trial) {
    auto tf = test::random_stable_plant(rng, 5);
    if (trial % 4 == 0) tf = TransferFunction(poly::add(tf.numerator(), tf.denominator()), tf.denominator());
    const auto ss = to_state_space(tf);
    for (double w : omegas) CHECK(rel_err(freq_response(ss, w), freq_response(tf, w).value) < 1e-9);
  }
}

TEST_CASE("state-space cascade") {
  const TransferFunction a({1.0, 3.0}, {1.0, 1.0});
  const TransferFunction b({2.0}, {1.0, 0.5, 4.0});
  const auto ss = series(to_state_space(a), to_state_space(b));
  CHECK(ss.order() == 3);
  for (double w : {0.1, 1.0, 2.0, 10.0})
    CHECK(rel_err(freq_response(ss, w), freq_response(series(a, b), w).value) < 1e-12);
}

TEST_CASE("log_space") {
  const auto v = log_space(0.1, 10.0, 3);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(0.1));
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == 10.0);
  CHECK_THROWS_AS(log_space(0.0, 1.0, 5), Error);
}

TEST_CASE("simulation: first-order step response") {
  const double h = 1e-3;
  const auto ss = to_state_space(TransferFunction({1.0}, {1.0, 1.0}));
  const auto out = simulate(ss, unit_step(1001), h);
  CHECK(out.y[1000] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-4));
}

TEST_CASE("simulation: double lag matches closed form") {
  const double h = 1e-3;
  const auto ss = to_state_space(TransferFunction({1.0}, {1.0, 2.0, 1.0}));
  const auto out = simulate(ss, unit_step(10001), h);
  double worst = 0.0;
  for (std::size_t k = 0; k < out.y.size(); ++k) {
    const double t = static_cast<double>(k) * h;
    worst = std::max(worst, std::abs(out.y[k] - (1.0 - (1.0 + t) * std::exp(-t))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("simulation: dead time") {
  const double h = 1e-3;
  auto ss = to_state_space(TransferFunction({1.0}, {1.0, 1.0}, 1.0));
  ss.input_delay = 1.0;
  const auto out = simulate(ss, unit_step(3001), h);
  for (std::size_t k = 0; k < 1000; ++k) REQUIRE(out.y[k] == 0.0);
  // The sampled step is interpolated over one step, so the delayed edge
  // arrives half a step early.
  CHECK(out.y[2000] == doctest::Approx(1.0 - std::exp(-(1.0 + 0.5 * h))).epsilon(1e-5));
  CHECK_THROWS_AS(simulate(ss, unit_step(10), 2.0), Error);
}

TEST_CASE("simulation: divergence is flagged, not thrown") {
  const auto ss = to_state_space(TransferFunction({1.0}, {1.0, -50.0}));
  const auto out = simulate(ss, unit_step(100001), 1e-3);
  CHECK(out.diverged);
  CHECK(out.divergence_time > 0.0);
}

TEST_CASE("property: sinusoidal steady state matches the frequency response") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lw(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    auto tf = test::random_stable_plant(rng, 3);
    if (trial % 3 == 0) tf = TransferFunction(tf.numerator(), tf.denominator(), 0.3);
    const double w = std::pow(10.0, lw(rng));
    const double h = std::min(1e-3, 2.0 * std::numbers::pi / (1000.0 * w));
    auto ss = to_state_space(tf);
    ss.input_delay = tf.delay();

    // Slowest pole decays by e^-25 before the measured cycle.
    double slowest = 1e9;
    for (auto p : tf.poles()) slowest = std::min(slowest, -p.real());
    const double period = 2.0 * std::numbers::pi / w;
    const double t_end = 25.0 / slowest + tf.delay() + 2.0 * period;
    const auto n = static_cast<std::size_t>(t_end / h) + 1;
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = std::sin(w * static_cast<double>(k) * h);
    const auto out = simulate(ss, u, h);
    REQUIRE_FALSE(out.diverged);

    // Fourier coefficients over the last whole period.
    const auto per = static_cast<std::size_t>(std::llround(period / h));
    double s = 0.0, c = 0.0;
    for (std::size_t k = n - per; k < n; ++k) {
      const double t = static_cast<double>(k) * h;
      s += out.y[k] * std::sin(w * t);
      c += out.y[k] * std::cos(w * t);
    }
    s *= 2.0 / static_cast<double>(per);
    c *= 2.0 / static_cast<double>(per);
    const auto expected = freq_response(tf, w);
    const double amp = std::hypot(s, c);
    const double dphi = std::remainder(deg(std::atan2(c, s)) - expected.phase_deg, 360.0);
    CHECK(amp == doctest::Approx(expected.magnitude()).epsilon(5e-3));
    CHECK(std::abs(dphi) < 0.5);
  }
}
