#include "pmr/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace pmr::poly {

Polynomial trimmed(Polynomial p) {
  auto first = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
  if (first == p.end()) return {0.0};
  p.erase(p.begin(), first);
  return p;
}

int degree(std::span<const double> p) {
  auto first = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
  if (first == p.end()) return 0;
  return static_cast<int>(std::distance(first, p.end())) - 1;
}

bool is_zero(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; });
}

Polynomial multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {0.0};
  Polynomial out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return trimmed(std::move(out));
}

Polynomial add(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  Polynomial out(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[n - a.size() + i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[n - b.size() + i] += b[i];
  return trimmed(std::move(out));
}

Polynomial scaled(std::span<const double> p, double k) {
  Polynomial out(p.begin(), p.end());
  for (double& c : out) c *= k;
  return trimmed(std::move(out));
}

std::complex<double> evaluate(std::span<const double> p, std::complex<double> s) {
  std::complex<double> acc{0.0, 0.0};
  for (double c : p) acc = acc * s + c;
  return acc;
}

double magnitude_bound(std::span<const double> p, double abs_s) {
  double acc = 0.0;
  for (double c : p) acc = acc * abs_s + std::abs(c);
  return acc;
}

std::vector<std::complex<double>> roots(std::span<const double> p) {
  Polynomial q = trimmed(Polynomial(p.begin(), p.end()));
  const int n = degree(q);
  if (n <= 0) return {};
  if (n == 1) return {std::complex<double>(-q[1] / q[0], 0.0)};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(0, j) = -q[j + 1] / q[0];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace pmr::poly
