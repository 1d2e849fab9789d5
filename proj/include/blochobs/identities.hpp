#ifndef BLOCHOBS_IDENTITIES_HPP
#define BLOCHOBS_IDENTITIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "blochobs/poly.hpp"

namespace blochobs {

enum class BasisProvenance { LadderDerived, PaperExample, UserSupplied };

std::string to_string(BasisProvenance p);

/// 2n+1 real harmonic polynomials of degree n.
struct HarmonicBasis {
  int n = 0;
  std::vector<Poly> polys;
  BasisProvenance provenance = BasisProvenance::UserSupplied;
};

/// Checks size, reality, harmonicity, degree and exact independence.
/// Throws std::invalid_argument describing the first violation.
void validate_basis(const HarmonicBasis& basis);

/// p_n, then Re p_k and Im p_k for k = 0..n-1, each scaled to primitive integer
/// coefficients with a positive leading term.
HarmonicBasis real_harmonic_basis(int n);

/// The reference bases for n = 1, 2, 3, in their reference order.
HarmonicBasis example_basis(int n);

/// Integer combinations (entries in [-3, 3]) of the ladder basis, redrawn until invertible.
HarmonicBasis random_real_basis(int n, std::uint64_t seed);

/// Scale a polynomial with rational coefficients to primitive integer coefficients.
Poly primitive_integer_scaling(const Poly& p);

struct QuadraticIdentity {
  HarmonicBasis basis;
  /// Symmetric; sum_ij coeffs[i][j] p_i p_j = ||x||^{2n}.
  std::vector<std::vector<Rational>> coeffs;

  Poly form() const;
  /// form() - ||x||^{2n}.
  Poly residual() const;
  bool verify() const { return residual().is_zero(); }
};

/// sum_k (-1)^{n+k} p_k p_{2n-k} over the weight ladder.
Poly ladder_q_star(int n);

/// c with q* = c ||x||^{2n}; throws if q* is not a multiple of ||x||^{2n}.
Rational casimir_normalizer(int n);

/// Unique symmetric coefficients expressing ||x||^{2n} = q*/c in the given basis.
/// Throws std::invalid_argument when the basis is invalid.
QuadraticIdentity constant_quadratic_form(const HarmonicBasis& basis);

/// The reference quadratic identities, coefficients as given, for n = 1, 2, 3.
QuadraticIdentity reference_identity(int n);

/// Every f_i (p_a p_b) lies in the span of the products p_a p_b.
bool s2_closure_check(const HarmonicBasis& basis);

/// {"n": n, "basis": [...], "coeffs": [[...]]}, two-space indented, trailing newline.
std::string identity_to_json(const QuadraticIdentity& id);
std::string identity_to_text(const QuadraticIdentity& id);

}  // namespace blochobs

#endif  // BLOCHOBS_IDENTITIES_HPP
