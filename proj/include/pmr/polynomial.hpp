#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pmr {

/// Real polynomial, coefficients in descending powers of s.
using Polynomial = std::vector<double>;

namespace poly {

/// Drops leading zeros; an all-zero input collapses to {0}.
Polynomial trimmed(Polynomial p);

int degree(std::span<const double> p);
bool is_zero(std::span<const double> p);

Polynomial multiply(std::span<const double> a, std::span<const double> b);
Polynomial add(std::span<const double> a, std::span<const double> b);
Polynomial scaled(std::span<const double> p, double k);

std::complex<double> evaluate(std::span<const double> p, std::complex<double> s);

/// Sum of |a_i| |s|^(n-i); the natural scale for deciding whether a value
/// returned by evaluate() is zero up to rounding.
double magnitude_bound(std::span<const double> p, double abs_s);

/// Roots from the eigenvalues of the companion matrix.
std::vector<std::complex<double>> roots(std::span<const double> p);

}  // namespace poly
}  // namespace pmr
