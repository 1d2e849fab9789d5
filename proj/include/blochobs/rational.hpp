#ifndef BLOCHOBS_RATIONAL_HPP
#define BLOCHOBS_RATIONAL_HPP

#include <complex>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace blochobs {

/// Exact rational number, always in lowest terms with a positive denominator.
class Rational {
public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(const mpq_class& value);

  /// Exact binary value of a finite double.
  static Rational from_double(double value);
  /// Parses "p", "-p", "p/q".
  static Rational parse(const std::string& text);

  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }
  const mpq_class& raw() const { return value_; }

  bool is_zero() const { return sgn(value_) == 0; }
  int sign() const { return sgn(value_); }
  double to_double() const { return value_.get_d(); }
  long double to_long_double() const;
  /// "p" when the denominator is one, otherwise "p/q".
  std::string to_string() const;

  Rational operator-() const { return Rational(mpq_class(-value_)); }
  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.value_ < b.value_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.value_ > b.value_; }

private:
  mpq_class value_{0};
};

Rational pow(const Rational& base, unsigned exponent);
Rational factorial(unsigned n);

/// Complex number with rational real and imaginary parts.
struct CScalar {
  Rational re;
  Rational im;

  CScalar() = default;
  CScalar(long r) : re(r) {}  // NOLINT(google-explicit-constructor)
  CScalar(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  CScalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static CScalar i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }
  CScalar conj() const { return {re, -im}; }
  Rational norm_sq() const { return re * re + im * im; }
  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
  /// "(re + im i)" or "(re - |im| i)".
  std::string to_string() const;

  CScalar operator-() const { return {-re, -im}; }
  CScalar& operator+=(const CScalar& o) { re += o.re; im += o.im; return *this; }
  CScalar& operator-=(const CScalar& o) { re -= o.re; im -= o.im; return *this; }
  CScalar& operator*=(const CScalar& o);
  CScalar& operator/=(const CScalar& o);

  friend CScalar operator+(CScalar a, const CScalar& b) { return a += b; }
  friend CScalar operator-(CScalar a, const CScalar& b) { return a -= b; }
  friend CScalar operator*(CScalar a, const CScalar& b) { return a *= b; }
  friend CScalar operator/(CScalar a, const CScalar& b) { return a /= b; }
  friend bool operator==(const CScalar& a, const CScalar& b) { return a.re == b.re && a.im == b.im; }
};

inline bool is_zero(const Rational& r) { return r.is_zero(); }
inline bool is_zero(const CScalar& c) { return c.is_zero(); }

}  // namespace blochobs

#endif  // BLOCHOBS_RATIONAL_HPP
