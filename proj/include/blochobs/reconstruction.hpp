#ifndef BLOCHOBS_RECONSTRUCTION_HPP
#define BLOCHOBS_RECONSTRUCTION_HPP

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "blochobs/ensemble.hpp"
#include "blochobs/identities.hpp"
#include "blochobs/representation.hpp"

namespace blochobs {

/// sigma1^drift * sigma2^control.
double kappa_monomial(const KappaSignature& k, const Sigma& sigma);

enum class MomentProvenance { Oracle, Measured };

/// M_i(a, b) = integral of m_xi^a m_zeta^b psi_i, with m_xi = s1 s2^2, m_zeta = s2^4.
struct MomentTable {
  std::map<std::tuple<int, int, int>, double> entries;
  MomentProvenance provenance = MomentProvenance::Oracle;

  bool has(int i, int a, int b) const { return entries.count({i, a, b}) != 0; }
  double at(int i, int a, int b) const;
  /// Largest D such that every (a, b) with a + b <= D is present for index i.
  int covered_degree(int i) const;
};

/// Quadrature of m_xi^a m_zeta^b sigma^{kappa_i} p_i(x_sigma) rho over a + b <= D.
MomentTable oracle_moments(const Profile& truth, const Density& density, const ParameterGrid& grid,
                           const std::vector<Poly>& images, const std::vector<KappaSignature>& kappas, int D);

/// Black-box access to y after a sequence of (possibly negative-duration) segments.
class Simulator {
public:
  Simulator(ParameterGrid grid, Profile initial, Density density, const Poly& phi);

  double output_after(const std::vector<Segment>& segments) const;
  const ParameterGrid& grid() const { return grid_; }
  long evaluations() const { return evaluations_; }

private:
  ParameterGrid grid_;
  Profile initial_;
  Density density_;
  CompiledPoly phi_;
  mutable long evaluations_ = 0;
};

class WordTooLong : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Estimates the integral of sigma^{kappa(w)} (f_w phi)(x_sigma(0)) rho from outputs alone:
/// one segment per letter (first letter first in time), per-segment controls
/// (0,0), (1,0), (0,1) unmixed linearly, central tensor differences in the
/// durations, Richardson with steps h and h/2.
double measured_moment(const Simulator& sim, const Word& w, double h = 1e-2, int word_cap = 4);

/// Moments from measured_moment over the words of xi^a zeta^b concatenated with
/// each alpha_i, divided by lambda^{a+b}; only entries with total length <= word_cap.
MomentTable measured_moments(const Simulator& sim, const std::vector<Word>& words, int n, int D, double h,
                             int word_cap);

struct PsiFit {
  std::vector<std::pair<int, int>> features;
  /// Exact coefficients of sum c_ab m_xi^a m_zeta^b.
  std::vector<Rational> coeffs;
  double gram_condition = 0.0;
  double gram_min_eigenvalue = 0.0;

  double evaluate(const Sigma& sigma) const;
};

/// Exact closed-form integral of s1^p s2^q over the box.
Rational box_monomial_integral(const ParameterBox& box, int p, int q);

/// Least-squares fit of psi_i in span{m_xi^a m_zeta^b : a + b <= D} against the
/// box measure, using an exactly orthogonalized feature basis; ridge shrinks the
/// orthonormal coordinates by 1/(1 + ridge).
PsiFit fit_psi(const MomentTable& table, const ParameterBox& box, int i, int D, double ridge);

struct DensityEstimate {
  Density density;
  std::vector<std::size_t> undefined_nodes;
  std::vector<bool> defined;
};

/// rho^2 = sum_ij c_ij psi_i psi_j / sigma^{kappa_i + kappa_j}; nodes below
/// rho_floor_relative * max(rho) are flagged and set to zero.
DensityEstimate recover_density(const std::vector<std::vector<double>>& psi, const QuadraticIdentity& identity,
                                const std::vector<KappaSignature>& kappas, const ParameterGrid& grid,
                                double rho_floor_relative);

/// p_i(x_sigma(0)) = psi_i / (sigma^{kappa_i} rho) on defined nodes; absent elsewhere.
std::vector<std::optional<std::vector<double>>> recover_harmonic_values(
    const std::vector<std::vector<double>>& psi, const DensityEstimate& density,
    const std::vector<KappaSignature>& kappas, const ParameterGrid& grid);

enum class Ambiguity { Unique, AntipodalPair };
std::string to_string(Ambiguity a);

struct PointInversion {
  Vec3 point;
  Ambiguity ambiguity = Ambiguity::Unique;
  /// max_i |b_i(point) - value_i|.
  double residual = 0.0;
};

class InconsistentValues : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Recovers x on S^2 from the values of a real basis of H_n at x.
/// The basis change to (z^n, x_c z^{n-1}, (x_c + i x_a)^n), z = x_a + i x_b, is done
/// exactly once for each cyclic choice of coordinates (a, b, c).
class PointInverter {
public:
  explicit PointInverter(const HarmonicBasis& basis);

  /// Never throws on inconsistent input; the residual reports the mismatch.
  PointInversion invert_unchecked(const std::vector<double>& values) const;
  /// Throws InconsistentValues when the residual exceeds tol.
  PointInversion invert(const std::vector<double>& values, double tol = 1e-8) const;

  int degree() const { return n_; }

private:
  struct Chart {
    std::array<int, 3> axes;  // (a, b, c)
    std::array<std::vector<std::complex<double>>, 3> rows;
  };
  double residual(const Vec3& x, const std::vector<double>& values) const;
  Vec3 refine(Vec3 x, const std::vector<double>& values) const;

  int n_;
  std::vector<CompiledPoly> basis_;
  std::vector<std::array<CompiledPoly, 3>> gradients_;
  std::vector<Chart> charts_;
};

PointInversion invert_point(const std::vector<double>& values, const HarmonicBasis& basis, double tol = 1e-8);

struct StitchResult {
  Profile profile;
  int components = 0;
};

/// For even n: breadth-first over grid neighbours from the first defined node of
/// each component, choosing +x or -x closest to the already fixed neighbour.
StitchResult stitch_signs(const Profile& candidates, const std::vector<bool>& defined, const ParameterGrid& grid);

enum class ReconstructionMode { OraclePsi, OracleMoments, MeasuredMoments };
std::string to_string(ReconstructionMode m);
ReconstructionMode parse_mode(const std::string& s);

struct ReconstructionConfig {
  ReconstructionMode mode = ReconstructionMode::OraclePsi;
  int D = 6;
  double ridge = 1e-10;
  double rho_floor = 1e-6;
  double fd_step = 1e-2;
  int fd_word_cap = 4;
  double residual_tol = 1e-6;
};

struct ReconstructionResult {
  Density density_est;
  Profile profile_est;
  std::vector<bool> defined;
  Ambiguity ambiguity = Ambiguity::Unique;
  std::vector<std::size_t> undefined_nodes;
  std::vector<std::size_t> inconsistent_nodes;
  std::vector<Word> words;
  std::vector<KappaSignature> kappas;
  int components = 0;
  int effective_D = -1;
  std::map<std::string, double> diagnostics;
};

class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

/// Full pipeline.  Oracle modes read the truth directly; measured mode only
/// calls the simulator built from it.
ReconstructionResult reconstruct(const Profile& truth_profile, const Density& truth_density,
                                 const ParameterGrid& grid, const Poly& phi, const ReconstructionConfig& config);

}  // namespace blochobs

#endif  // BLOCHOBS_RECONSTRUCTION_HPP
