#include "blochobs/representation.hpp"

#include <algorithm>
#include <array>

#include "blochobs/exact_linalg.hpp"

namespace blochobs {

Word parse_word(const std::string& digits) {
  Word w;
  w.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '2') throw std::invalid_argument("parse_word: letters must be 0, 1 or 2");
    w.push_back(static_cast<FieldId>(c - '0'));
  }
  return w;
}

std::string word_to_string(const Word& w) {
  std::string s;
  for (FieldId f : w) s += static_cast<char>('0' + static_cast<int>(f));
  return s;
}

KappaSignature kappa(const Word& w) {
  KappaSignature k;
  for (FieldId f : w) (f == FieldId::F0 ? k.drift : k.control)++;
  return k;
}

OperatorExpr::OperatorExpr(Word w, CScalar c) {
  if (!c.is_zero()) terms_.emplace(std::move(w), std::move(c));
}

void OperatorExpr::add_term(const Word& w, const CScalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

OperatorExpr& OperatorExpr::operator-=(const OperatorExpr& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

OperatorExpr& OperatorExpr::operator*=(const CScalar& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, coeff] : terms_) coeff *= c;
  return *this;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr out;
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add_term(w, ca * cb);
    }
  return out;
}

std::string OperatorExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    const std::string word = "[" + word_to_string(w) + "]";
    if (c.is_real()) {
      const bool negative = c.re.sign() < 0;
      const Rational mag = negative ? -c.re : c.re;
      if (first) out += negative ? "−" : "";
      else out += negative ? " − " : " + ";
      if (!(mag == Rational(1))) out += mag.to_string() + "·";
      out += word;
    } else {
      if (!first) out += " + ";
      out += c.to_string() + "·" + word;
    }
    first = false;
  }
  return out;
}

OperatorExpr power(const OperatorExpr& e, unsigned exponent) {
  OperatorExpr out = OperatorExpr::identity();
  for (unsigned i = 0; i < exponent; ++i) out = out * e;
  return out;
}

Poly apply_field(FieldId id, const Poly& p) {
  // (a, b): the field is x_a d_b - x_b d_a.
  static constexpr std::array<std::array<int, 2>, 3> axes{{{2, 1}, {3, 1}, {3, 2}}};
  const auto [a, b] = axes[static_cast<int>(id)];
  return Poly::variable(a) * partial(p, b) - Poly::variable(b) * partial(p, a);
}

Poly apply_word(const Word& w, const Poly& p) {
  Poly out = p;
  for (auto it = w.rbegin(); it != w.rend() && !out.is_zero(); ++it) out = apply_field(*it, out);
  return out;
}

Poly apply_expr(const OperatorExpr& e, const Poly& p) {
  Poly out;
  for (const auto& [w, c] : e.terms()) out += apply_word(w, p) * c;
  return out;
}

std::optional<KappaSignature> kappa_of(const OperatorExpr& e) {
  if (e.is_zero()) return std::nullopt;
  const KappaSignature k = kappa(e.terms().begin()->first);
  for (const auto& [w, c] : e.terms())
    if (!(kappa(w) == k)) return std::nullopt;
  return k;
}

namespace {

OperatorExpr combination(std::initializer_list<std::pair<const char*, long>> terms) {
  OperatorExpr e;
  for (const auto& [w, c] : terms) e.add_term(parse_word(w), CScalar(c));
  return e;
}

OperatorExpr field(FieldId f, CScalar c = 1) { return OperatorExpr(Word{f}, std::move(c)); }

}  // namespace

OperatorExpr casimir() { return combination({{"00", 1}, {"11", 1}, {"22", 1}}); }

OperatorExpr xi() {
  return combination({{"012", 1}, {"120", 1}, {"201", 1}, {"021", -1}, {"102", -1}, {"210", -1}});
}

OperatorExpr zeta() {
  return combination({{"1212", 3}, {"2121", 3}, {"1221", -2}, {"2112", -2}, {"1122", -1}, {"2211", -1}});
}

OperatorExpr cartan_h() { return field(FieldId::F0, CScalar(0, 2)); }

OperatorExpr raising() { return field(FieldId::F1) + field(FieldId::F2, CScalar::i()); }

OperatorExpr lowering() { return field(FieldId::F1, -1) + field(FieldId::F2, CScalar::i()); }

bool bracket_equals(const OperatorExpr& a, const OperatorExpr& b, const OperatorExpr& c, int n) {
  const OperatorExpr comm = a * b - b * a;
  for (const auto& m : monomials_of_degree(n)) {
    const Poly p(m, 1);
    if (!(apply_expr(comm, p) == apply_expr(c, p))) return false;
  }
  return true;
}

bool operators_commute(const OperatorExpr& a, const OperatorExpr& b, int n) {
  return bracket_equals(a, b, OperatorExpr(), n);
}

bool commutator_check(int n) {
  if (n < 0 || n > kCommutatorDegreeCap)
    throw std::invalid_argument("commutator_check: degree outside [0, " +
                                std::to_string(kCommutatorDegreeCap) + "]");
  static constexpr std::array<std::array<FieldId, 3>, 3> cyclic{{
      {FieldId::F0, FieldId::F1, FieldId::F2},
      {FieldId::F1, FieldId::F2, FieldId::F0},
      {FieldId::F2, FieldId::F0, FieldId::F1},
  }};
  for (const auto& [i, j, k] : cyclic)
    if (!bracket_equals(field(i), field(j), field(k), n)) return false;
  return true;
}

WeightLadder weight_ladder(int n) {
  if (n < 1) throw std::invalid_argument("weight_ladder: degree must be positive");
  WeightLadder ladder;
  ladder.n = n;
  const Poly z = Poly::variable(1) + Poly::variable(2) * CScalar::i();
  const OperatorExpr lower = lowering();
  ladder.vectors.push_back(pow(z, static_cast<unsigned>(n)));
  for (int k = 0; k < 2 * n; ++k) ladder.vectors.push_back(apply_expr(lower, ladder.vectors.back()));
  return ladder;
}

bool check_ladder(const WeightLadder& ladder) {
  const int n = ladder.n;
  const auto& p = ladder.vectors;
  if (n < 1 || p.size() != static_cast<std::size_t>(2 * n + 1)) return false;
  const OperatorExpr h = cartan_h(), up = raising(), down = lowering();
  for (int k = 0; k <= 2 * n; ++k) {
    const Poly& pk = p[k];
    if (pk.homogeneous_degree() != n || !is_harmonic(pk)) return false;
    if (!(apply_expr(h, pk) == pk * CScalar(2 * n - 2 * k))) return false;
    const Poly raised = apply_expr(up, pk);
    if (k == 0) {
      if (!raised.is_zero()) return false;
    } else if (!(raised == p[k - 1] * CScalar(static_cast<long>(k) * (2 * n - k + 1)))) {
      return false;
    }
    Rational scale = factorial(static_cast<unsigned>(2 * n - k)) / factorial(static_cast<unsigned>(k));
    if ((n - k) % 2 != 0) scale = -scale;
    if (!(p[2 * n - k] == pk.conjugate() * CScalar(scale))) return false;
  }
  return apply_expr(down, p[2 * n]).is_zero();
}

CasimirCertificate verify_casimir_eigen(int n) {
  if (n < 1) throw std::invalid_argument("verify_casimir_eigen: degree must be positive");
  CasimirCertificate cert;
  cert.n = n;
  cert.lambda = Rational(-static_cast<long>(n) * (n + 1));
  const std::vector<std::pair<std::string, OperatorExpr>> ops{
      {"eta*", casimir()}, {"xi", xi()}, {"zeta", zeta()}};
  const WeightLadder ladder = weight_ladder(n);
  for (const auto& [name, op] : ops) {
    for (std::size_t k = 0; k < ladder.vectors.size(); ++k) {
      const Poly& pk = ladder.vectors[k];
      if (!(apply_expr(op, pk) == pk * CScalar(cert.lambda)))
        throw VerificationError("casimir eigenvalue check failed: operator " + name + ", k = " +
                                std::to_string(k) + ", n = " + std::to_string(n));
    }
    cert.checked_elements.push_back(name);
  }
  return cert;
}

std::vector<std::pair<int, Poly>> harmonic_decompose(const Poly& p) {
  if (p.is_zero()) return {};
  const auto deg = p.homogeneous_degree();
  if (!deg) throw std::invalid_argument("harmonic_decompose: polynomial is not homogeneous");
  const int n = *deg;

  // Columns: ||x||^{2k} times each ladder vector of degree n - 2k.
  std::vector<std::pair<int, Poly>> columns;
  for (int k = 0; 2 * k <= n; ++k) {
    const int m = n - 2 * k;
    if (m == 0) {
      columns.emplace_back(k, Poly::constant(1));
    } else {
      for (const Poly& v : weight_ladder(m).vectors) columns.emplace_back(k, v);
    }
  }

  const std::size_t dim = monomials_of_degree(n).size();
  exact::Matrix<CScalar> a(dim, std::vector<CScalar>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const Poly full = norm_sq_power_multiply(columns[j].second, static_cast<unsigned>(columns[j].first));
    const auto coords = full.coordinates(n);
    for (std::size_t i = 0; i < dim; ++i) a[i][j] = coords[i];
  }
  const auto x = exact::solve(a, p.coordinates(n));
  if (!x) throw std::logic_error("harmonic_decompose: singular system");

  std::map<int, Poly> parts;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (!(*x)[j].is_zero()) parts[columns[j].first] += columns[j].second * (*x)[j];
  std::vector<std::pair<int, Poly>> out;
  for (auto& [k, h] : parts)
    if (!h.is_zero()) out.emplace_back(k, std::move(h));
  return out;
}

Poly harmonic_recompose(const std::vector<std::pair<int, Poly>>& parts) {
  Poly out;
  for (const auto& [k, h] : parts) out += norm_sq_power_multiply(h, static_cast<unsigned>(k));
  return out;
}

std::vector<Word> word_basis_search(const Poly& phi) {
  const auto deg = phi.homogeneous_degree();
  if (phi.is_zero() || !deg || !is_harmonic(phi))
    throw std::invalid_argument("word_basis_search: phi must be a nonzero harmonic homogeneous polynomial");
  const int n = *deg;
  const std::size_t target = static_cast<std::size_t>(2 * n + 1);
  const int max_length = std::max(4 * n, 1);

  exact::IncrementalSpan<CScalar> span(monomials_of_degree(n).size());
  std::vector<Word> chosen;

  // Each level holds the nonzero images of all words of one length, in lex order.
  std::vector<std::pair<Word, Poly>> level{{Word{}, phi}};
  for (int length = 0;; ++length) {
    for (const auto& [w, img] : level) {
      if (span.insert(img.coordinates(n))) {
        chosen.push_back(w);
        if (chosen.size() == target) return chosen;
      }
    }
    if (length == max_length) break;
    std::vector<std::pair<Word, Poly>> next;
    next.reserve(level.size() * 3);
    for (int letter = 0; letter < 3; ++letter)
      for (const auto& [w, img] : level) {
        Poly image = apply_field(static_cast<FieldId>(letter), img);
        if (image.is_zero()) continue;
        Word extended{static_cast<FieldId>(letter)};
        extended.insert(extended.end(), w.begin(), w.end());
        next.emplace_back(std::move(extended), std::move(image));
      }
    level = std::move(next);
  }
  throw std::runtime_error("word_basis_search: no basis found within word length " +
                           std::to_string(max_length));
}

}  // namespace blochobs
