#include "blochobs/spherical_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "blochobs/rational.hpp"

namespace blochobs {

namespace {

void check_indices(int n, int k) {
  if (n < 0 || k < -n || k > n)
    throw std::domain_error("spherical harmonic indices require n >= 0 and |k| <= n");
}

// Coefficients (ascending powers) of d^m/dt^m (t^2-1)^n / (2^n n!).
std::vector<Rational> rodrigues_derivative(int n, int m) {
  std::vector<Rational> c(2 * n + 1);
  mpz_class binom;
  for (int j = 0; j <= n; ++j) {
    mpz_bin_uiui(binom.get_mpz_t(), n, j);
    // (t^2 - 1)^n = sum_j C(n,j) t^{2j} (-1)^{n-j}
    c[2 * j] = Rational(((n - j) % 2 == 0) ? mpz_class(binom) : mpz_class(-binom), mpz_class(1));
  }
  for (int step = 0; step < m; ++step) {
    for (std::size_t p = 1; p < c.size(); ++p) c[p - 1] = c[p] * Rational(static_cast<long>(p));
    if (!c.empty()) c.pop_back();
  }
  const Rational scale = Rational(1) / (pow(Rational(2), static_cast<unsigned>(n)) * factorial(static_cast<unsigned>(n)));
  for (auto& x : c) x *= scale;
  return c;
}

double horner(const std::vector<Rational>& c, double t) {
  long double acc = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + it->to_long_double();
  return static_cast<double>(acc);
}

double factorial_ratio(int a, int b) {
  // a! / b!
  return (factorial(static_cast<unsigned>(a)) / factorial(static_cast<unsigned>(b))).to_double();
}

}  // namespace

double assoc_legendre(int n, int k, double t) {
  check_indices(n, k);
  if (!(t >= -1.0 && t <= 1.0)) throw std::domain_error("assoc_legendre: argument outside [-1, 1]");
  if (k < 0) {
    // L^{-m} = (-1)^m (n-m)!/(n+m)! L^m avoids the (1-t^2)^{-m/2} singularity.
    const int m = -k;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * factorial_ratio(n - m, n + m) * assoc_legendre(n, m, t);
  }
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double radial = std::pow(std::max(0.0, 1.0 - t * t), 0.5 * k);
  return sign * radial * horner(rodrigues_derivative(n, n + k), t);
}

double legendre(int n, double t) { return assoc_legendre(n, 0, t); }

SphericalHarmonicValue spherical_harmonic(int n, int k, double theta, double phi) {
  check_indices(n, k);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double norm =
      std::sqrt((2.0 * n + 1.0) / (4.0 * std::numbers::pi) * factorial_ratio(n - k, n + k));
  SphericalHarmonicValue out{n, k, theta, phi, {}};
  out.value = sign * norm * assoc_legendre(n, k, std::cos(theta)) * std::polar(1.0, k * phi);
  return out;
}

double addition_theorem_residual(int n, int sample_count, std::uint64_t seed) {
  if (n < 0) throw std::domain_error("addition_theorem_residual: n must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double expected = (2.0 * n + 1.0) / (4.0 * std::numbers::pi);
  double worst = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    // Uniform on the sphere: cos(theta) uniform in [-1, 1].
    const double theta = std::acos(2.0 * unit(rng) - 1.0);
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    double sum = 0.0;
    for (int k = -n; k <= n; ++k) sum += std::norm(spherical_harmonic(n, k, theta, phi).value);
    worst = std::max(worst, std::abs(sum - expected));
  }
  return worst;
}

}  // namespace blochobs
