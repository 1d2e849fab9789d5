#include "blochobs/identities.hpp"

#include <random>
#include <stdexcept>

#include "json.hpp"

#include "blochobs/exact_linalg.hpp"
#include "blochobs/representation.hpp"

namespace blochobs {

std::string to_string(BasisProvenance p) {
  switch (p) {
    case BasisProvenance::LadderDerived: return "ladder-derived";
    case BasisProvenance::PaperExample: return "paper-example";
    case BasisProvenance::UserSupplied: return "user-supplied";
  }
  return "unknown";
}

namespace {

std::vector<Rational> real_coordinates(const Poly& p, int n) {
  std::vector<Rational> out;
  for (auto& c : p.coordinates(n)) {
    if (!c.is_real()) throw VerificationError("unexpected imaginary coefficient in a real identity");
    out.push_back(c.re);
  }
  return out;
}

Poly term(long c, int e1, int e2, int e3) { return Poly(Monomial(e1, e2, e3), CScalar(c)); }

}  // namespace

void validate_basis(const HarmonicBasis& basis) {
  const int n = basis.n;
  if (n < 1) throw std::invalid_argument("basis degree must be positive");
  if (basis.polys.size() != static_cast<std::size_t>(2 * n + 1))
    throw std::invalid_argument("basis of H_" + std::to_string(n) + " must have " +
                                std::to_string(2 * n + 1) + " elements, got " +
                                std::to_string(basis.polys.size()));
  exact::Matrix<Rational> rows;
  for (std::size_t i = 0; i < basis.polys.size(); ++i) {
    const Poly& p = basis.polys[i];
    const std::string where = "basis element " + std::to_string(i + 1);
    if (p.homogeneous_degree() != n) throw std::invalid_argument(where + " is not homogeneous of degree " + std::to_string(n));
    if (!p.is_real()) throw std::invalid_argument(where + " is not real");
    if (!is_harmonic(p)) throw std::invalid_argument(where + " is not harmonic");
    rows.push_back(real_coordinates(p, n));
  }
  if (exact::rank(rows) != basis.polys.size())
    throw std::invalid_argument("basis elements are linearly dependent");
}

Poly primitive_integer_scaling(const Poly& p) {
  if (p.is_zero()) return p;
  if (!p.is_real()) throw std::invalid_argument("primitive_integer_scaling: polynomial is not real");
  mpz_class den_lcm = 1, num_gcd = 0;
  for (const auto& [m, c] : p.terms()) {
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.re.denominator().get_mpz_t());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.re.numerator().get_mpz_t());
  }
  Rational scale(den_lcm, num_gcd);
  if (p.terms().begin()->second.re.sign() < 0) scale = -scale;
  return p * CScalar(scale);
}

HarmonicBasis real_harmonic_basis(int n) {
  const WeightLadder ladder = weight_ladder(n);
  HarmonicBasis b;
  b.n = n;
  b.provenance = BasisProvenance::LadderDerived;
  b.polys.push_back(primitive_integer_scaling(ladder.vectors[n]));
  for (int k = 0; k < n; ++k) {
    b.polys.push_back(primitive_integer_scaling(ladder.vectors[k].real_part()));
    b.polys.push_back(primitive_integer_scaling(ladder.vectors[k].imag_part()));
  }
  validate_basis(b);
  return b;
}

HarmonicBasis example_basis(int n) {
  HarmonicBasis b;
  b.n = n;
  b.provenance = BasisProvenance::PaperExample;
  switch (n) {
    case 1:
      b.polys = {term(1, 1, 0, 0), term(1, 0, 1, 0), term(1, 0, 0, 1)};
      break;
    case 2:
      b.polys = {
          term(1, 2, 0, 0) + term(-1, 0, 2, 0),
          term(1, 0, 2, 0) + term(-1, 0, 0, 2),
          term(1, 1, 1, 0),
          term(1, 1, 0, 1),
          term(1, 0, 1, 1),
      };
      break;
    case 3:
      b.polys = {
          term(2, 3, 0, 0) + term(-3, 1, 2, 0) + term(-3, 1, 0, 2),
          term(2, 0, 3, 0) + term(-3, 2, 1, 0) + term(-3, 0, 1, 2),
          term(2, 0, 0, 3) + term(-3, 2, 0, 1) + term(-3, 0, 2, 1),
          term(1, 1, 2, 0) + term(-1, 1, 0, 2),
          term(1, 2, 1, 0) + term(-1, 0, 1, 2),
          term(1, 2, 0, 1) + term(-1, 0, 2, 1),
          term(1, 1, 1, 1),
      };
      break;
    default:
      throw std::invalid_argument("example_basis: reference bases exist only for n = 1, 2, 3");
  }
  validate_basis(b);
  return b;
}

HarmonicBasis random_real_basis(int n, std::uint64_t seed) {
  const HarmonicBasis ladder = real_harmonic_basis(n);
  const std::size_t dim = ladder.polys.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (;;) {
    HarmonicBasis b;
    b.n = n;
    b.provenance = BasisProvenance::UserSupplied;
    for (std::size_t i = 0; i < dim; ++i) {
      Poly p;
      for (std::size_t j = 0; j < dim; ++j) p += ladder.polys[j] * CScalar(entry(rng));
      b.polys.push_back(std::move(p));
    }
    try {
      validate_basis(b);
      return b;
    } catch (const std::invalid_argument&) {
      // singular draw; try again
    }
  }
}

Poly QuadraticIdentity::form() const {
  Poly out;
  const auto& p = basis.polys;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (!coeffs[i][j].is_zero()) out += (p[i] * p[j]) * CScalar(coeffs[i][j]);
  return out;
}

Poly QuadraticIdentity::residual() const {
  return form() - pow(Poly::norm_sq(), static_cast<unsigned>(basis.n));
}

Poly ladder_q_star(int n) {
  const WeightLadder ladder = weight_ladder(n);
  Poly q;
  for (int k = 0; k <= 2 * n; ++k) {
    const long sign = (n + k) % 2 == 0 ? 1 : -1;
    q += (ladder.vectors[k] * ladder.vectors[2 * n - k]) * CScalar(sign);
  }
  return q;
}

Rational casimir_normalizer(int n) {
  const Poly q = ladder_q_star(n);
  const CScalar c = q.coefficient(Monomial(0, 0, 2 * n));
  if (!c.is_real() || c.re.sign() <= 0 || !(q == pow(Poly::norm_sq(), static_cast<unsigned>(n)) * c))
    throw VerificationError("q* is not a positive multiple of ||x||^" + std::to_string(2 * n));
  return c.re;
}

QuadraticIdentity constant_quadratic_form(const HarmonicBasis& basis) {
  validate_basis(basis);
  const int n = basis.n;
  const Rational c = casimir_normalizer(n);
  const Poly target = ladder_q_star(n) * CScalar(Rational(1) / c);
  const auto& p = basis.polys;
  const std::size_t dim = p.size();

  // Unknown d_ij (i <= j) multiplies p_i p_j; the products form a basis of P_{2n}.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) pairs.emplace_back(i, j);
  const std::size_t rows = monomials_of_degree(2 * n).size();
  exact::Matrix<Rational> a(rows, std::vector<Rational>(pairs.size()));
  for (std::size_t col = 0; col < pairs.size(); ++col) {
    const auto coords = real_coordinates(p[pairs[col].first] * p[pairs[col].second], 2 * n);
    for (std::size_t r = 0; r < rows; ++r) a[r][col] = coords[r];
  }
  const auto d = exact::solve(a, real_coordinates(target, 2 * n));
  if (!d) throw VerificationError("||x||^" + std::to_string(2 * n) + " is not in the span of basis products");

  QuadraticIdentity id;
  id.basis = basis;
  id.coeffs.assign(dim, std::vector<Rational>(dim));
  for (std::size_t col = 0; col < pairs.size(); ++col) {
    const auto [i, j] = pairs[col];
    if (i == j) {
      id.coeffs[i][i] = (*d)[col];
    } else {
      id.coeffs[i][j] = id.coeffs[j][i] = (*d)[col] / Rational(2);
    }
  }
  if (!id.verify()) throw VerificationError("quadratic identity failed exact verification");
  return id;
}

QuadraticIdentity reference_identity(int n) {
  QuadraticIdentity id;
  id.basis = example_basis(n);
  const std::size_t dim = id.basis.polys.size();
  id.coeffs.assign(dim, std::vector<Rational>(dim));
  auto& c = id.coeffs;
  switch (n) {
    case 1:
      for (std::size_t i = 0; i < 3; ++i) c[i][i] = 1;
      break;
    case 2:
      c[0][0] = c[1][1] = 1;
      c[0][1] = c[1][0] = Rational(1, 2);
      c[2][2] = c[3][3] = c[4][4] = 2;
      break;
    case 3:
      c[0][0] = c[1][1] = c[2][2] = Rational(1, 4);
      c[3][3] = c[4][4] = c[5][5] = Rational(15, 4);
      c[6][6] = 15;
      break;
  }
  return id;
}

bool s2_closure_check(const HarmonicBasis& basis) {
  validate_basis(basis);
  const int n = basis.n;
  const auto& p = basis.polys;
  std::vector<Poly> products;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i; j < p.size(); ++j) products.push_back(p[i] * p[j]);
  exact::IncrementalSpan<Rational> span(monomials_of_degree(2 * n).size());
  for (const Poly& q : products) span.insert(real_coordinates(q, 2 * n));
  for (int f = 0; f < 3; ++f)
    for (const Poly& q : products) {
      const Poly image = apply_field(static_cast<FieldId>(f), q);
      if (image.is_zero()) continue;
      if (!span.contains(real_coordinates(image, 2 * n))) return false;
    }
  return true;
}

std::string identity_to_json(const QuadraticIdentity& id) {
  nlohmann::ordered_json j;
  j["n"] = id.basis.n;
  j["basis"] = nlohmann::ordered_json::array();
  for (const Poly& p : id.basis.polys) j["basis"].push_back(p.to_string());
  j["coeffs"] = nlohmann::ordered_json::array();
  for (const auto& row : id.coeffs) {
    auto r = nlohmann::ordered_json::array();
    for (const Rational& c : row) r.push_back(c.to_string());
    j["coeffs"].push_back(r);
  }
  return j.dump(2) + "\n";
}

std::string identity_to_text(const QuadraticIdentity& id) {
  std::string out = "||x||^" + std::to_string(2 * id.basis.n) + " =";
  bool first = true;
  const std::size_t dim = id.coeffs.size();
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      Rational c = i == j ? id.coeffs[i][j] : id.coeffs[i][j] * Rational(2);
      if (c.is_zero()) continue;
      out += first ? " " : " + ";
      first = false;
      out += "(" + c.to_string() + ")*p" + std::to_string(i + 1) + "*p" + std::to_string(j + 1);
    }
  out += "\n";
  for (std::size_t i = 0; i < dim; ++i)
    out += "p" + std::to_string(i + 1) + " = " + id.basis.polys[i].to_string() + "\n";
  return out;
}

}  // namespace blochobs
