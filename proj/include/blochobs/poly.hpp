#ifndef BLOCHOBS_POLY_HPP
#define BLOCHOBS_POLY_HPP

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blochobs/rational.hpp"

namespace blochobs {

/// Exponent triple (e1, e2, e3) of x1^e1 x2^e2 x3^e3.
struct Monomial {
  std::array<int, 3> exponents{0, 0, 0};

  Monomial() = default;
  Monomial(int e1, int e2, int e3) : exponents{e1, e2, e3} {}

  int degree() const { return exponents[0] + exponents[1] + exponents[2]; }
  std::string to_string() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic order, highest first: higher total degree, then
/// lexicographically larger exponent triple.  Iterating a `Poly` follows it.
struct GradedLexFirst {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.degree() != b.degree()) return a.degree() > b.degree();
    return a.exponents > b.exponents;
  }
};

/// All monomials of total degree n, in graded-lex order; (n+1)(n+2)/2 of them.
std::vector<Monomial> monomials_of_degree(int n);

/// Sparse polynomial in x1, x2, x3 with exact complex-rational coefficients.
/// Zero coefficients are never stored.
class Poly {
public:
  using Terms = std::map<Monomial, CScalar, GradedLexFirst>;

  Poly() = default;
  Poly(const Monomial& m, CScalar c);
  static Poly constant(CScalar c) { return Poly(Monomial{}, std::move(c)); }
  /// The coordinate x_axis, axis in {1,2,3}.
  static Poly variable(int axis);
  /// x1^2 + x2^2 + x3^2.
  static Poly norm_sq();

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  CScalar coefficient(const Monomial& m) const;
  void add_term(const Monomial& m, const CScalar& c);

  /// Defined iff every stored monomial shares one degree (the zero polynomial has none).
  std::optional<int> homogeneous_degree() const;
  bool is_real() const;
  Poly real_part() const;
  Poly imag_part() const;
  Poly conjugate() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const CScalar& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const CScalar& c) { return a *= c; }
  friend Poly operator*(const CScalar& c, Poly a) { return a *= c; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  std::complex<double> evaluate(const std::array<double, 3>& point) const;
  /// Canonical text form, terms in graded-lex order joined by " + ".
  std::string to_string() const;

  /// Coordinates against `monomials_of_degree(n)`.
  std::vector<CScalar> coordinates(int n) const;
  static Poly from_coordinates(int n, const std::vector<CScalar>& coords);

private:
  Terms terms_;
};

Poly add(const Poly& p, const Poly& q);
Poly mul(const Poly& p, const Poly& q);
Poly pow(const Poly& p, unsigned exponent);
/// Formal partial derivative, axis in {1,2,3}.
Poly partial(const Poly& p, int axis);
Poly laplacian(const Poly& p);
bool is_harmonic(const Poly& p);
std::complex<double> evaluate(const Poly& p, const std::array<double, 3>& point);
Poly conjugate(const Poly& p);
/// p * (x1^2 + x2^2 + x3^2)^k.
Poly norm_sq_power_multiply(const Poly& p, unsigned k);

/// Floating-point snapshot of a Poly for repeated evaluation.
class CompiledPoly {
public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Poly& p);

  std::complex<double> operator()(const std::array<double, 3>& x) const;
  /// Real part only; valid shortcut for real polynomials.
  double real(const std::array<double, 3>& x) const;
  bool empty() const { return terms_.empty(); }

private:
  struct Term {
    std::array<int, 3> e;
    std::complex<double> c;
  };
  std::vector<Term> terms_;
};

}  // namespace blochobs

#endif  // BLOCHOBS_POLY_HPP
