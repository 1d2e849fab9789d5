#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "blochobs/exact_linalg.hpp"
#include "blochobs/representation.hpp"

using namespace blochobs;

namespace {

const Poly x1 = Poly::variable(1), x2 = Poly::variable(2), x3 = Poly::variable(3);
const CScalar I = CScalar::i();

OperatorExpr field(int i) { return OperatorExpr(Word{static_cast<FieldId>(i)}); }

Poly random_homogeneous(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> c(-3, 3);
  Poly p;
  for (const Monomial& m : monomials_of_degree(n)) p.add_term(m, CScalar(Rational(c(rng)), Rational(c(rng))));
  return p;
}

}  // namespace

TEST_CASE("words parse and print") {
  CHECK(word_to_string(parse_word("0121")) == "0121");
  CHECK(parse_word("").empty());
  CHECK_THROWS(parse_word("013"));
  CHECK(kappa(parse_word("0121")) == KappaSignature{1, 3});
}

TEST_CASE("apply_field") {
  CHECK(apply_field(FieldId::F0, x1) == x2);
  CHECK(apply_field(FieldId::F1, x3) == -x1);
  CHECK(apply_field(FieldId::F2, x1).is_zero());
}

TEST_CASE("apply_word composes left to right") {
  CHECK(apply_word(parse_word("01"), x3) == -x2);
  const Poly p = x1 * x2 + x3;
  CHECK(apply_word(Word{}, p) == p);
  CHECK(apply_word(parse_word("11"), x1 + I * x2) == -x1);
}

TEST_CASE("apply_expr") {
  CHECK(apply_expr(casimir(), x3) == CScalar(-2) * x3);
  CHECK(apply_expr(lowering(), x1 + I * x2) == CScalar(-2) * x3);
  CHECK(apply_expr(OperatorExpr(), x1 * x2).is_zero());
}

TEST_CASE("kappa_of") {
  CHECK(kappa_of(xi()) == KappaSignature{1, 2});
  CHECK(kappa_of(zeta()) == KappaSignature{0, 4});
  CHECK_FALSE(kappa_of(casimir()).has_value());
}

TEST_CASE("operator text form") {
  CHECK(casimir().to_string() == "[00] + [11] + [22]");
  CHECK(zeta().to_string() == "−[1122] + 3·[1212] − 2·[1221] − 2·[2112] + 3·[2121] − [2211]");
  CHECK(OperatorExpr().to_string() == "0");
}

TEST_CASE("commutator_check") {
  // n = 1 by hand: (f0 f1 - f1 f0) x3 = f0(-x1) - f1(0) = -x2 = f2 x3.
  CHECK(apply_word(parse_word("01"), x3) - apply_word(parse_word("10"), x3) == apply_field(FieldId::F2, x3));
  CHECK(commutator_check(0));
  CHECK(commutator_check(1));
  CHECK(commutator_check(2));
  CHECK(commutator_check(5));
  CHECK_THROWS_AS(commutator_check(-1), std::invalid_argument);
  CHECK_THROWS_AS(commutator_check(kCommutatorDegreeCap + 1), std::invalid_argument);
}

TEST_CASE("weight_ladder n=1") {
  const WeightLadder l = weight_ladder(1);
  REQUIRE(l.vectors.size() == 3);
  CHECK(l.vectors[0] == x1 + I * x2);
  CHECK(l.vectors[1] == CScalar(-2) * x3);
  CHECK(l.vectors[2] == CScalar(-2) * (x1 - I * x2));
  for (int n = 1; n <= 4; ++n) CHECK(check_ladder(weight_ladder(n)));
}

TEST_CASE("check_ladder rejects a tampered ladder") {
  WeightLadder l = weight_ladder(2);
  l.vectors[2] = l.vectors[2] * CScalar(2);
  CHECK_FALSE(check_ladder(l));
}

TEST_CASE("verify_casimir_eigen") {
  CHECK(verify_casimir_eigen(1).lambda == Rational(-2));
  CHECK(verify_casimir_eigen(2).lambda == Rational(-6));
  CHECK(verify_casimir_eigen(5).lambda == Rational(-30));
  const auto cert = verify_casimir_eigen(3);
  CHECK(cert.checked_elements == std::vector<std::string>{"eta*", "xi", "zeta"});
}

TEST_CASE("harmonic_decompose") {
  const auto a = harmonic_decompose(Poly::norm_sq());
  REQUIRE(a.size() == 1);
  CHECK(a[0].first == 1);
  CHECK(a[0].second == Poly::constant(1));

  // Independent hand solution: x1^2 = (x1^2 - |x|^2/3) + |x|^2 / 3.
  const auto b = harmonic_decompose(x1 * x1);
  REQUIRE(b.size() == 2);
  CHECK(b[0].first == 0);
  CHECK(b[0].second == x1 * x1 - CScalar(Rational(1, 3)) * Poly::norm_sq());
  CHECK(b[1].first == 1);
  CHECK(b[1].second == Poly::constant(Rational(1, 3)));

  const auto c = harmonic_decompose(x1 * x2);
  REQUIRE(c.size() == 1);
  CHECK(c[0].first == 0);
  CHECK(c[0].second == x1 * x2);

  CHECK_THROWS_AS(harmonic_decompose(x1 + x1 * x2), std::invalid_argument);
}

TEST_CASE("harmonic_decompose round-trips random homogeneous polynomials") {
  std::mt19937_64 rng(21);
  for (int n = 0; n <= 6; ++n)
    for (int t = 0; t < 3; ++t) {
      const Poly p = random_homogeneous(rng, n);
      const auto parts = harmonic_decompose(p);
      for (const auto& [k, h] : parts) {
        CHECK(is_harmonic(h));
        CHECK(h.homogeneous_degree() == n - 2 * k);
      }
      CHECK(harmonic_recompose(parts) == p);
    }
}

TEST_CASE("word_basis_search") {
  const auto w1 = word_basis_search(x3);
  REQUIRE(w1.size() == 3);
  CHECK(word_to_string(w1[0]) == "");
  CHECK(word_to_string(w1[1]) == "1");
  CHECK(word_to_string(w1[2]) == "2");
  CHECK(apply_word(w1[1], x3) == -x1);
  CHECK(apply_word(w1[2], x3) == -x2);

  const Poly phi = x1 * x2;
  const auto w2 = word_basis_search(phi);
  REQUIRE(w2.size() == 5);
  std::vector<std::vector<CScalar>> rows;
  for (const Word& w : w2) {
    CHECK(w.size() <= 2);
    rows.push_back(apply_word(w, phi).coordinates(2));
  }
  CHECK(exact::rank(rows) == 5);

  CHECK_THROWS(word_basis_search(Poly::norm_sq()));
}

TEST_CASE("Leibniz rule") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const Poly p = random_homogeneous(rng, 2), q = random_homogeneous(rng, 3);
    for (int f = 0; f < 3; ++f) {
      const FieldId id = static_cast<FieldId>(f);
      CHECK(apply_field(id, p * q) == apply_field(id, p) * q + p * apply_field(id, q));
    }
  }
}

TEST_CASE("fields commute with the Laplacian and annihilate |x|^2") {
  for (int f = 0; f < 3; ++f) CHECK(apply_field(static_cast<FieldId>(f), Poly::norm_sq()).is_zero());
  for (int n = 0; n <= 6; ++n)
    for (const Monomial& m : monomials_of_degree(n)) {
      const Poly p(m, CScalar(1));
      for (int f = 0; f < 3; ++f) {
        const FieldId id = static_cast<FieldId>(f);
        CHECK(laplacian(apply_field(id, p)) == apply_field(id, laplacian(p)));
      }
    }
}

TEST_CASE("casimir is central") {
  for (int n = 0; n <= 5; ++n)
    for (int f = 0; f < 3; ++f) CHECK(operators_commute(casimir(), field(f), n));
}

TEST_CASE("sl2 triple relations") {
  const OperatorExpr h = cartan_h(), ep = raising(), em = lowering();
  for (int n = 0; n <= 5; ++n) {
    CHECK(bracket_equals(h, ep, CScalar(2) * ep, n));
    CHECK(bracket_equals(h, em, CScalar(-2) * em, n));
    CHECK(bracket_equals(ep, em, h, n));
  }
}

TEST_CASE("weight spaces are one-dimensional") {
  for (int n = 1; n <= 4; ++n) {
    const WeightLadder l = weight_ladder(n);
    for (int k = 0; k <= 2 * n; ++k) {
      const Poly& p = l.vectors[k];
      CHECK(apply_expr(cartan_h(), p) == CScalar(2 * n - 2 * k) * p);
    }
    // 2n+1 independent eigenvectors with distinct weights fill the (2n+1)-dimensional H_n,
    // so every weight space is a line.
    exact::Matrix<CScalar> rows;
    for (const Poly& p : l.vectors) rows.push_back(p.coordinates(n));
    CHECK(exact::rank(rows) == static_cast<std::size_t>(2 * n + 1));
  }
}

TEST_CASE("x3^n coefficient of p_n") {
  for (int n = 1; n <= 6; ++n) {
    const Poly pn = weight_ladder(n).vectors[n];
    Rational expected = factorial(n) * pow(Rational(-2), n);
    CHECK(pn.coefficient(Monomial(0, 0, n)) == CScalar(expected));
  }
}
