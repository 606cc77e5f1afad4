#include "pmr/lti.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pmr/error.hpp"
#include "pmr/integrator.hpp"

namespace pmr {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(const Polynomial& p, const char* what) {
  for (double c : p)
    if (!std::isfinite(c))
      throw Error(ErrorKind::invalid_argument, std::string(what) + " has a non-finite coefficient");
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size())
    throw Error(ErrorKind::parse_error, "not a number: '" + std::string(token) + "'");
  return v;
}

Polynomial parse_list(std::string_view text) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw Error(ErrorKind::parse_error, "expected a bracketed coefficient list, got '" +
                                            std::string(text) + "'");
  text = text.substr(1, text.size() - 2);
  Polynomial out;
  std::string buf(text);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream in(buf);
  std::string token;
  while (in >> token) out.push_back(parse_number(token));
  if (out.empty()) throw Error(ErrorKind::parse_error, "empty coefficient list");
  return out;
}

// Angle of (j*omega - root), continuous in omega unless the root sits on the
// imaginary axis.
double factor_angle(double omega, std::complex<double> root) {
  return std::arg(std::complex<double>(0.0, omega) - root);
}

}  // namespace

TransferFunction::TransferFunction(Polynomial numerator, Polynomial denominator, double delay)
    : num_(poly::trimmed(std::move(numerator))),
      den_(poly::trimmed(std::move(denominator))),
      delay_(delay) {
  require_finite(num_, "numerator");
  require_finite(den_, "denominator");
  if (poly::is_zero(den_))
    throw Error(ErrorKind::invalid_argument, "denominator must not be the zero polynomial");
  if (!std::isfinite(delay_) || delay_ < 0.0)
    throw Error(ErrorKind::invalid_argument, "delay must be finite and non-negative");
}

TransferFunction TransferFunction::parse(std::string_view text) {
  std::string cleaned;
  bool comment = false;
  for (char ch : text) {
    if (ch == '#') comment = true;
    if (ch == '\n') comment = false;
    if (!comment) cleaned.push_back(ch == '\n' ? ';' : ch);
  }

  Polynomial num, den;
  double delay = 0.0;
  bool have_num = false, have_den = false;
  std::string_view rest = cleaned;
  while (!rest.empty()) {
    const auto cut = rest.find(';');
    std::string_view item = trim(rest.substr(0, cut));
    rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::parse_error, "expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = trim(item.substr(0, eq));
    const std::string_view value = item.substr(eq + 1);
    if (key == "num") {
      num = parse_list(value);
      have_num = true;
    } else if (key == "den") {
      den = parse_list(value);
      have_den = true;
    } else if (key == "delay") {
      delay = parse_number(value);
    } else {
      throw Error(ErrorKind::parse_error, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_num || !have_den)
    throw Error(ErrorKind::parse_error, "transfer function needs both num and den");
  return TransferFunction(std::move(num), std::move(den), delay);
}

std::string TransferFunction::to_string() const {
  auto list = [](const Polynomial& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) s += ", ";
      s += format_double(p[i]);
    }
    return s + "]";
  };
  return "num=" + list(num_) + "; den=" + list(den_) + "; delay=" + format_double(delay_);
}

TransferFunction series(const TransferFunction& a, const TransferFunction& b) {
  return TransferFunction(poly::multiply(a.numerator(), b.numerator()),
                          poly::multiply(a.denominator(), b.denominator()),
                          a.delay() + b.delay());
}

// ---------------------------------------------------------------------------

FrequencyResponse::FrequencyResponse(const TransferFunction& tf)
    : FrequencyResponse(std::vector<TransferFunction>{tf}) {}

FrequencyResponse::FrequencyResponse(std::vector<TransferFunction> blocks)
    : blocks_(std::move(blocks)) {
  factored_.reserve(blocks_.size());
  for (const auto& tf : blocks_) {
    Factored f;
    if (!poly::is_zero(tf.numerator())) {
      f.zeros = tf.zeros();
      f.gain_phase = tf.numerator().front() / tf.denominator().front() < 0.0 ? -kPi : 0.0;
    }
    f.poles = tf.poles();
    factored_.push_back(std::move(f));
  }
}

ComplexResponse FrequencyResponse::operator()(double omega) const {
  if (!(omega >= 0.0))
    throw Error(ErrorKind::invalid_argument, "frequency must be non-negative");
  const std::complex<double> s(0.0, omega);
  std::complex<double> total(1.0, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& tf = blocks_[i];
    const auto& f = factored_[i];
    const auto den = poly::evaluate(tf.denominator(), s);
    if (std::abs(den) <= 1e-13 * poly::magnitude_bound(tf.denominator(), omega))
      throw Error(ErrorKind::pole_at_frequency,
                  "pole at evaluation frequency omega=" + std::to_string(omega));
    const auto value = poly::evaluate(tf.numerator(), s) / den * std::polar(1.0, -omega * tf.delay());

    double estimate = f.gain_phase - omega * tf.delay();
    for (const auto& z : f.zeros) estimate += factor_angle(omega, z);
    for (const auto& p : f.poles) estimate -= factor_angle(omega, p);

    double block_phase = estimate;
    if (std::abs(value) > 0.0) {
      const double principal = std::arg(value);
      block_phase = principal + 2.0 * kPi * std::round((estimate - principal) / (2.0 * kPi));
    }
    total *= value;
    phase += block_phase;
  }
  return {omega, total, phase * 180.0 / kPi};
}

std::complex<double> FrequencyResponse::value(double omega) const { return (*this)(omega).value; }

std::vector<ComplexResponse> FrequencyResponse::sweep(std::span<const double> omegas) const {
  std::vector<ComplexResponse> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back((*this)(w));
  return out;
}

std::vector<double> FrequencyResponse::axis_pole_frequencies() const {
  std::vector<double> out;
  for (const auto& f : factored_)
    for (const auto& p : f.poles)
      if (p.imag() > 0.0 && std::abs(p.real()) <= 1e-9 * std::abs(p)) out.push_back(p.imag());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }),
            out.end());
  return out;
}

ComplexResponse freq_response(const TransferFunction& tf, double omega) {
  return FrequencyResponse(tf)(omega);
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 2)
    throw Error(ErrorKind::invalid_argument, "log_space needs 0 < lo <= hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------

StateSpaceModel to_state_space(const TransferFunction& tf) {
  if (!tf.is_proper())
    throw Error(ErrorKind::improper_system, "cannot realize an improper transfer function");
  const Polynomial& den = tf.denominator();
  const int n = poly::degree(den);
  const double lead = den.front();

  Polynomial num(static_cast<std::size_t>(n + 1), 0.0);
  const Polynomial& raw = tf.numerator();
  if (!poly::is_zero(raw))
    std::copy(raw.begin(), raw.end(), num.end() - static_cast<std::ptrdiff_t>(raw.size()));
  for (double& c : num) c /= lead;

  StateSpaceModel ss;
  ss.a = Eigen::MatrixXd::Zero(n, n);
  ss.b = Eigen::VectorXd::Zero(n);
  ss.c = Eigen::RowVectorXd::Zero(n);
  ss.d = num[0];
  ss.input_delay = tf.delay();
  if (n == 0) return ss;

  for (int j = 0; j < n; ++j) {
    const double a_j = den[static_cast<std::size_t>(j + 1)] / lead;
    ss.a(0, j) = -a_j;
    ss.c(j) = num[static_cast<std::size_t>(j + 1)] - num[0] * a_j;
  }
  for (int i = 1; i < n; ++i) ss.a(i, i - 1) = 1.0;
  ss.b(0) = 1.0;
  return ss;
}

StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second) {
  const int n1 = first.order(), n2 = second.order();
  StateSpaceModel ss;
  ss.a = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  ss.a.topLeftCorner(n1, n1) = first.a;
  ss.a.bottomRightCorner(n2, n2) = second.a;
  ss.a.bottomLeftCorner(n2, n1) = second.b * first.c;
  ss.b.resize(n1 + n2);
  ss.b.head(n1) = first.b;
  ss.b.tail(n2) = second.b * first.d;
  ss.c.resize(n1 + n2);
  ss.c.head(n1) = second.d * first.c;
  ss.c.tail(n2) = second.c;
  ss.d = second.d * first.d;
  ss.input_delay = first.input_delay + second.input_delay;
  return ss;
}

std::complex<double> freq_response(const StateSpaceModel& ss, double omega) {
  const int n = ss.order();
  if (n == 0) return {ss.d, 0.0};
  Eigen::MatrixXcd m = -ss.a.cast<std::complex<double>>();
  m.diagonal().array() += std::complex<double>(0.0, omega);
  const Eigen::VectorXcd x = m.partialPivLu().solve(ss.b.cast<std::complex<double>>());
  return (ss.c.cast<std::complex<double>>() * x)(0) + ss.d;
}

SampledOutput simulate(const StateSpaceModel& ss, std::span<const double> input, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::invalid_argument, "step must be positive");
  if (ss.input_delay > 0.0 && step > ss.input_delay * (1.0 + 1e-12))
    throw Error(ErrorKind::invalid_argument, "step must not exceed the dead time");

  const auto shift = static_cast<std::ptrdiff_t>(std::llround(ss.input_delay / step));
  const auto count = static_cast<std::ptrdiff_t>(input.size());
  auto delayed = [&](std::ptrdiff_t k) {
    const std::ptrdiff_t idx = std::min(k - shift, count - 1);
    return idx < 0 ? 0.0 : input[static_cast<std::size_t>(idx)];
  };

  SampledOutput out;
  out.y.reserve(input.size());
  const int n = ss.order();
  Rk4Propagator prop(ss.a, ss.b, step);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w0(1), wm(1), w1(1);
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const double u = delayed(k);
    out.y.push_back(n ? ss.c.dot(x) + ss.d * u : ss.d * u);
    if (k + 1 == count) break;
    const double u_next = delayed(k + 1);
    w0(0) = u;
    wm(0) = 0.5 * (u + u_next);
    w1(0) = u_next;
    prop.step(x, w0, wm, w1);
    if (!x.allFinite() || x.squaredNorm() > 1e200) {
      out.diverged = true;
      out.divergence_time = static_cast<double>(k + 1) * step;
      break;
    }
  }
  return out;
}

}  // namespace pmr
