#ifndef BLOCHOBS_REPRESENTATION_HPP
#define BLOCHOBS_REPRESENTATION_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blochobs/poly.hpp"

namespace blochobs {

/// The three rotation fields on the sphere: F0 the drift, F1 and F2 the controls.
///   F0 p = x2 d1p - x1 d2p,  F1 p = x3 d1p - x1 d3p,  F2 p = x3 d2p - x2 d3p.
enum class FieldId : int { F0 = 0, F1 = 1, F2 = 2 };

/// A word over {0,1,2}.  Acts by left-to-right composition:
/// word i1 i2 ... ik applied to p is F_{i1}(F_{i2}(...F_{ik}(p))).
using Word = std::vector<FieldId>;

Word parse_word(const std::string& digits);
std::string word_to_string(const Word& w);

/// (number of F0 letters, number of F1/F2 letters).
struct KappaSignature {
  int drift = 0;
  int control = 0;
  friend bool operator==(const KappaSignature&, const KappaSignature&) = default;
  friend KappaSignature operator+(KappaSignature a, KappaSignature b) {
    return {a.drift + b.drift, a.control + b.control};
  }
};

KappaSignature kappa(const Word& w);

struct WordOrder {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// Finite complex-linear combination of words.
class OperatorExpr {
public:
  using Terms = std::map<Word, CScalar, WordOrder>;

  OperatorExpr() = default;
  explicit OperatorExpr(Word w, CScalar c = 1);
  static OperatorExpr identity() { return OperatorExpr(Word{}); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add_term(const Word& w, const CScalar& c);

  OperatorExpr& operator+=(const OperatorExpr& o);
  OperatorExpr& operator-=(const OperatorExpr& o);
  OperatorExpr& operator*=(const CScalar& c);
  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
  friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) { return a -= b; }
  friend OperatorExpr operator*(const CScalar& c, OperatorExpr a) { return a *= c; }
  /// Composition: (a*b) p = a(b p), words concatenated.
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);
  friend bool operator==(const OperatorExpr& a, const OperatorExpr& b) { return a.terms_ == b.terms_; }

  /// e.g. "3·[1212] + 3·[2121] − 2·[1221]"; non-real coefficients print in full.
  std::string to_string() const;

private:
  Terms terms_;
};

OperatorExpr power(const OperatorExpr& e, unsigned exponent);

Poly apply_field(FieldId id, const Poly& p);
Poly apply_word(const Word& w, const Poly& p);
Poly apply_expr(const OperatorExpr& e, const Poly& p);

/// Common signature of every word in `e`, or nullopt when the words disagree.
std::optional<KappaSignature> kappa_of(const OperatorExpr& e);

/// F0^2 + F1^2 + F2^2.
OperatorExpr casimir();
/// Signature (1,2) rewriting of the Casimir element.
OperatorExpr xi();
/// Signature (0,4) rewriting of the Casimir element.
OperatorExpr zeta();

/// sl(2,C) triple: h = 2i F0, e+ = F1 + i F2, e- = -F1 + i F2.
OperatorExpr cartan_h();
OperatorExpr raising();
OperatorExpr lowering();

inline constexpr int kCommutatorDegreeCap = 12;

/// [F_i, F_j] = F_k for cyclic (i,j,k), checked exactly on every monomial of degree n.
bool commutator_check(int n);

/// True iff A∘B = B∘A on every monomial of degree n.
bool operators_commute(const OperatorExpr& a, const OperatorExpr& b, int n);
/// True iff [a, b] = c on every monomial of degree n.
bool bracket_equals(const OperatorExpr& a, const OperatorExpr& b, const OperatorExpr& c, int n);

struct WeightLadder {
  int n = 0;
  /// p_0 = (x1 + i x2)^n, p_{k+1} = e- p_k, k = 0..2n.
  std::vector<Poly> vectors;
};

WeightLadder weight_ladder(int n);
/// Checks h p_k = (2n-2k) p_k, e+ p_k = k(2n-k+1) p_{k-1}, e+ p_0 = 0, e- p_{2n} = 0,
/// p_{2n-k} = (-1)^{n-k} (2n-k)!/k! conj(p_k), and harmonicity.
bool check_ladder(const WeightLadder& ladder);

class VerificationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CasimirCertificate {
  int n = 0;
  Rational lambda;
  std::vector<std::string> checked_elements;
};

/// Applies η*, ξ, ζ to every ladder vector and requires exact equality with
/// -n(n+1) p_k.  Throws VerificationError naming the first failing (operator, k).
CasimirCertificate verify_casimir_eigen(int n);

/// Components (k, h_k) with p = Σ ||x||^{2k} h_k and h_k harmonic of degree n-2k.
/// Zero components are omitted.  Throws std::invalid_argument if p is not homogeneous.
std::vector<std::pair<int, Poly>> harmonic_decompose(const Poly& p);
Poly harmonic_recompose(const std::vector<std::pair<int, Poly>>& parts);

/// BFS over words ordered by (length, F0<F1<F2), greedily keeping words whose
/// images F_w phi extend the span.  Returns 2n+1 words.
std::vector<Word> word_basis_search(const Poly& phi);

}  // namespace blochobs

#endif  // BLOCHOBS_REPRESENTATION_HPP
