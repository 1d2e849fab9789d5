#include "blochobs/poly.hpp"

#include <stdexcept>

namespace blochobs {

std::string Monomial::to_string() const {
  std::string out;
  for (int axis = 0; axis < 3; ++axis) {
    const int e = exponents[axis];
    if (e == 0) continue;
    if (!out.empty()) out += ' ';
    out += "x" + std::to_string(axis + 1);
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out;
}

std::vector<Monomial> monomials_of_degree(int n) {
  std::vector<Monomial> out;
  if (n < 0) return out;
  out.reserve(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
  for (int e1 = n; e1 >= 0; --e1)
    for (int e2 = n - e1; e2 >= 0; --e2) out.emplace_back(e1, e2, n - e1 - e2);
  return out;
}

Poly::Poly(const Monomial& m, CScalar c) {
  if (!c.is_zero()) terms_.emplace(m, std::move(c));
}

Poly Poly::variable(int axis) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("Poly::variable: axis must be 1, 2 or 3");
  Monomial m;
  m.exponents[axis - 1] = 1;
  return Poly(m, CScalar(1));
}

Poly Poly::norm_sq() {
  Poly p;
  p.add_term(Monomial(2, 0, 0), 1);
  p.add_term(Monomial(0, 2, 0), 1);
  p.add_term(Monomial(0, 0, 2), 1);
  return p;
}

CScalar Poly::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? CScalar() : it->second;
}

void Poly::add_term(const Monomial& m, const CScalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

std::optional<int> Poly::homogeneous_degree() const {
  if (terms_.empty()) return std::nullopt;
  const int d = terms_.begin()->first.degree();
  // Graded order puts the highest degree first and the lowest last.
  if (terms_.rbegin()->first.degree() != d) return std::nullopt;
  return d;
}

bool Poly::is_real() const {
  for (const auto& [m, c] : terms_)
    if (!c.is_real()) return false;
  return true;
}

Poly Poly::real_part() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.add_term(m, CScalar(c.re));
  return out;
}

Poly Poly::imag_part() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.add_term(m, CScalar(c.im));
  return out;
}

Poly Poly::conjugate() const {
  Poly out = *this;
  for (auto& [m, c] : out.terms_) c.im = -c.im;
  return out;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const CScalar& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m(ma.exponents[0] + mb.exponents[0], ma.exponents[1] + mb.exponents[1],
                 ma.exponents[2] + mb.exponents[2]);
      out.add_term(m, ca * cb);
    }
  return out;
}

std::complex<double> Poly::evaluate(const std::array<double, 3>& point) const {
  std::complex<double> sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = 1.0;
    for (int axis = 0; axis < 3; ++axis)
      for (int k = 0; k < m.exponents[axis]; ++k) v *= point[axis];
    sum += c.to_complex() * v;
  }
  return sum;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += c.to_string();
    const std::string mono = m.to_string();
    if (!mono.empty()) out += " " + mono;
  }
  return out;
}

std::vector<CScalar> Poly::coordinates(int n) const {
  const auto basis = monomials_of_degree(n);
  std::vector<CScalar> coords;
  coords.reserve(basis.size());
  std::size_t found = 0;
  for (const auto& m : basis) {
    const auto it = terms_.find(m);
    if (it == terms_.end()) {
      coords.emplace_back();
    } else {
      coords.push_back(it->second);
      ++found;
    }
  }
  if (found != terms_.size())
    throw std::invalid_argument("Poly::coordinates: polynomial is not homogeneous of degree " +
                                std::to_string(n));
  return coords;
}

Poly Poly::from_coordinates(int n, const std::vector<CScalar>& coords) {
  const auto basis = monomials_of_degree(n);
  if (coords.size() != basis.size())
    throw std::invalid_argument("Poly::from_coordinates: size mismatch");
  Poly out;
  for (std::size_t i = 0; i < basis.size(); ++i) out.add_term(basis[i], coords[i]);
  return out;
}

Poly add(const Poly& p, const Poly& q) { return p + q; }

Poly mul(const Poly& p, const Poly& q) { return p * q; }

Poly pow(const Poly& p, unsigned exponent) {
  Poly out = Poly::constant(1);
  for (unsigned i = 0; i < exponent; ++i) out = out * p;
  return out;
}

Poly partial(const Poly& p, int axis) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("partial: axis must be 1, 2 or 3");
  const int a = axis - 1;
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    const int e = m.exponents[a];
    if (e == 0) continue;
    Monomial d = m;
    d.exponents[a] = e - 1;
    out.add_term(d, c * CScalar(e));
  }
  return out;
}

Poly laplacian(const Poly& p) {
  Poly out;
  for (int axis = 1; axis <= 3; ++axis) out += partial(partial(p, axis), axis);
  return out;
}

bool is_harmonic(const Poly& p) { return laplacian(p).is_zero(); }

std::complex<double> evaluate(const Poly& p, const std::array<double, 3>& point) {
  return p.evaluate(point);
}

Poly conjugate(const Poly& p) { return p.conjugate(); }

Poly norm_sq_power_multiply(const Poly& p, unsigned k) { return p * pow(Poly::norm_sq(), k); }

CompiledPoly::CompiledPoly(const Poly& p) {
  terms_.reserve(p.size());
  for (const auto& [m, c] : p.terms()) terms_.push_back({m.exponents, c.to_complex()});
}

namespace {
double monomial_value(const std::array<int, 3>& e, const std::array<double, 3>& x) {
  double v = 1.0;
  for (int axis = 0; axis < 3; ++axis)
    for (int k = 0; k < e[axis]; ++k) v *= x[axis];
  return v;
}
}  // namespace

std::complex<double> CompiledPoly::operator()(const std::array<double, 3>& x) const {
  std::complex<double> sum = 0.0;
  for (const auto& t : terms_) sum += t.c * monomial_value(t.e, x);
  return sum;
}

double CompiledPoly::real(const std::array<double, 3>& x) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.c.real() * monomial_value(t.e, x);
  return sum;
}

}  // namespace blochobs
