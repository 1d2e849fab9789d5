#include "blochobs/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace blochobs {

Rational::Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Rational::Rational(const mpq_class& value) : value_(value) { value_.canonicalize(); }

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw std::domain_error("Rational: non-finite double");
  // mpq_set_d is exact for binary doubles.
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), value);
  return Rational(q);
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(mpz_class(text, 10), mpz_class(1));
    return Rational(mpz_class(text.substr(0, slash), 10), mpz_class(text.substr(slash + 1), 10));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("Rational: cannot parse '" + text + "'");
  }
}

long double Rational::to_long_double() const {
  if (is_zero()) return 0.0L;
  // t = floor(|num| * 2^s / den) carries 63-64 significant bits.
  const mpz_class num = abs(value_.get_num());
  const mpz_class den = value_.get_den();
  const long s = 63 - (static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
                       static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)));
  mpz_class scaled_num = num, scaled_den = den;
  if (s >= 0) scaled_num <<= static_cast<mp_bitcnt_t>(s);
  else scaled_den <<= static_cast<mp_bitcnt_t>(-s);
  const mpz_class t = scaled_num / scaled_den;
  const long double mant = static_cast<long double>(mpz_get_ui(t.get_mpz_t()));
  const long double out = std::ldexp(mant, static_cast<int>(-s));
  return sign() < 0 ? -out : out;
}

std::string Rational::to_string() const {
  if (value_.get_den() == 1) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  value_ /= o.value_;
  return *this;
}

Rational pow(const Rational& base, unsigned exponent) {
  Rational result(1);
  for (unsigned i = 0; i < exponent; ++i) result *= base;
  return result;
}

Rational factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f, mpz_class(1));
}

std::string CScalar::to_string() const {
  std::string out = "(" + re.to_string();
  if (im.sign() < 0) out += " - " + (-im).to_string() + " i)";
  else out += " + " + im.to_string() + " i)";
  return out;
}

CScalar& CScalar::operator*=(const CScalar& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

CScalar& CScalar::operator/=(const CScalar& o) {
  const Rational d = o.norm_sq();
  if (d.is_zero()) throw std::domain_error("CScalar: division by zero");
  Rational r = (re * o.re + im * o.im) / d;
  Rational i = (im * o.re - re * o.im) / d;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

}  // namespace blochobs
