#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "pmr/lti.hpp"

namespace pmr::test {

inline double deg(double rad) { return rad * 180.0 / std::numbers::pi; }
inline double rad(double deg) { return deg * std::numbers::pi / 180.0; }

inline double rel_err(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Stable plant with real or complex-pair poles, strictly proper, random
/// zeros and gain.
inline TransferFunction random_stable_plant(std::mt19937_64& rng, int max_order = 4) {
  std::uniform_int_distribution<int> order_dist(1, max_order);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::uniform_real_distribution<double> g(0.3, 3.0);
  const int order = order_dist(rng);
  Polynomial den{1.0};
  int built = 0;
  while (built < order) {
    if (order - built >= 2 && u(rng) > 1.6) {
      const double wn = u(rng), z = 0.2 + 0.25 * u(rng);
      den = poly::multiply(den, Polynomial{1.0, 2.0 * z * wn, wn * wn});
      built += 2;
    } else {
      den = poly::multiply(den, Polynomial{1.0, u(rng)});
      built += 1;
    }
  }
  Polynomial num{g(rng)};
  std::uniform_int_distribution<int> zeros_dist(0, order - 1);
  const int zeros = zeros_dist(rng);
  for (int i = 0; i < zeros; ++i) num = poly::multiply(num, Polynomial{1.0, u(rng)});
  return {num, den};
}

}  // namespace pmr::test
