#ifndef BLOCHOBS_SPHERICAL_HARMONICS_HPP
#define BLOCHOBS_SPHERICAL_HARMONICS_HPP

#include <complex>
#include <cstdint>

namespace blochobs {

// Numeric cross-check only.  The derivative d^{n+|k|}/dt^{n+|k|} (t^2-1)^n is
// formed exactly, then evaluated in floating point.

/// L_n^k(t) = (-1)^k / (2^n n!) (1-t^2)^{k/2} d^{n+k}/dt^{n+k} (t^2-1)^n, |k| <= n, |t| <= 1.
double assoc_legendre(int n, int k, double t);

/// L_n(t), i.e. k = 0.
double legendre(int n, double t);

struct SphericalHarmonicValue {
  int n = 0;
  int k = 0;
  double theta = 0.0;
  double phi = 0.0;
  std::complex<double> value;
};

/// Y_n^k = (-1)^k sqrt((2n+1)/(4 pi) (n-k)!/(n+k)!) L_n^k(cos theta) e^{i k phi}.
SphericalHarmonicValue spherical_harmonic(int n, int k, double theta, double phi);

/// Max over uniform random sphere points of |sum_k |Y_n^k|^2 - (2n+1)/(4 pi)|.
double addition_theorem_residual(int n, int sample_count, std::uint64_t seed);

}  // namespace blochobs

#endif  // BLOCHOBS_SPHERICAL_HARMONICS_HPP
