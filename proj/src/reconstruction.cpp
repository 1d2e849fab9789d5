#include "blochobs/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Eigenvalues>

#include "blochobs/exact_linalg.hpp"

namespace blochobs {

double kappa_monomial(const KappaSignature& k, const Sigma& sigma) {
  return std::pow(sigma[0], k.drift) * std::pow(sigma[1], k.control);
}

double MomentTable::at(int i, int a, int b) const {
  const auto it = entries.find({i, a, b});
  if (it == entries.end())
    throw std::out_of_range("moment (" + std::to_string(i) + ", " + std::to_string(a) + ", " +
                            std::to_string(b) + ") not in table");
  return it->second;
}

int MomentTable::covered_degree(int i) const {
  for (int D = 0;; ++D)
    for (int a = 0; a <= D; ++a)
      if (!has(i, a, D - a)) return D - 1;
}

namespace {

double m_xi(const Sigma& s) { return s[0] * s[1] * s[1]; }
double m_zeta(const Sigma& s) { return s[1] * s[1] * s[1] * s[1]; }

std::vector<std::pair<int, int>> feature_list(int D) {
  std::vector<std::pair<int, int>> f;
  for (int total = 0; total <= D; ++total)
    for (int a = total; a >= 0; --a) f.emplace_back(a, total - a);
  return f;
}

}  // namespace

MomentTable oracle_moments(const Profile& truth, const Density& density, const ParameterGrid& grid,
                           const std::vector<Poly>& images, const std::vector<KappaSignature>& kappas, int D) {
  if (images.size() != kappas.size()) throw std::invalid_argument("oracle_moments: images/kappas size mismatch");
  if (truth.states.size() != grid.size() || density.values.size() != grid.size())
    throw std::invalid_argument("oracle_moments: truth does not match grid");
  MomentTable table;
  table.provenance = MomentProvenance::Oracle;
  const auto features = feature_list(D);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const CompiledPoly p(images[i]);
    std::vector<double> base(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Vec3& x = truth.states[j];
      base[j] = grid.weights[j] * kappa_monomial(kappas[i], grid.nodes[j]) * p.real({x[0], x[1], x[2]}) *
                density.values[j];
    }
    for (const auto& [a, b] : features) {
      double sum = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j)
        sum += std::pow(m_xi(grid.nodes[j]), a) * std::pow(m_zeta(grid.nodes[j]), b) * base[j];
      table.entries[{static_cast<int>(i), a, b}] = sum;
    }
  }
  return table;
}

Simulator::Simulator(ParameterGrid grid, Profile initial, Density density, const Poly& phi)
    : grid_(std::move(grid)), initial_(std::move(initial)), density_(std::move(density)), phi_(phi) {
  if (!phi.is_real()) throw std::invalid_argument("Simulator: observation function must be real");
}

double Simulator::output_after(const std::vector<Segment>& segments) const {
  ++evaluations_;
  return output(evolve_signed(initial_, grid_, segments), grid_, density_, phi_);
}

namespace {

// Inverse of the per-segment control map: letter -> weights on controls (0,0), (1,0), (0,1).
constexpr double kUnmix[3][3] = {{1, 0, 0}, {-1, 1, 0}, {-1, 0, 1}};
constexpr double kControls[3][2] = {{0, 0}, {1, 0}, {0, 1}};

double central_mixed_difference(const Simulator& sim, const std::vector<int>& controls, double h) {
  const std::size_t k = controls.size();
  double sum = 0.0;
  std::vector<Segment> segs(k);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    double sign = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const bool negative = (mask >> j) & 1U;
      if (negative) sign = -sign;
      segs[j] = {negative ? -h : h, kControls[controls[j]][0], kControls[controls[j]][1]};
    }
    sum += sign * sim.output_after(segs);
  }
  return sum / std::pow(2.0 * h, static_cast<double>(k));
}

double unmixed_derivative(const Simulator& sim, const Word& w, double h) {
  const std::size_t k = w.size();
  std::vector<int> controls(k, 0);
  double total = 0.0;
  // Enumerate control tuples in {0,1,2}^k.
  for (;;) {
    double weight = 1.0;
    for (std::size_t j = 0; j < k; ++j) weight *= kUnmix[static_cast<int>(w[j])][controls[j]];
    if (weight != 0.0) total += weight * central_mixed_difference(sim, controls, h);
    std::size_t j = 0;
    while (j < k && controls[j] == 2) controls[j++] = 0;
    if (j == k) break;
    ++controls[j];
  }
  return total;
}

}  // namespace

double measured_moment(const Simulator& sim, const Word& w, double h, int word_cap) {
  if (static_cast<int>(w.size()) > word_cap)
    throw WordTooLong("word " + word_to_string(w) + " exceeds the finite-difference cap " + std::to_string(word_cap));
  if (!(h > 0.0)) throw std::invalid_argument("measured_moment: step must be positive");
  if (w.empty()) return sim.output_after({});
  const double coarse = unmixed_derivative(sim, w, h);
  const double fine = unmixed_derivative(sim, w, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

MomentTable measured_moments(const Simulator& sim, const std::vector<Word>& words, int n, int D, double h,
                             int word_cap) {
  MomentTable table;
  table.provenance = MomentProvenance::Measured;
  const double lambda = -static_cast<double>(n) * (n + 1);
  const OperatorExpr x = xi(), z = zeta();
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (const auto& [a, b] : feature_list(D)) {
      if (3 * a + 4 * b + static_cast<int>(words[i].size()) > word_cap) continue;
      const OperatorExpr eta = power(x, a) * power(z, b);
      double sum = 0.0;
      for (const auto& [prefix, c] : eta.terms()) {
        Word w = prefix;
        w.insert(w.end(), words[i].begin(), words[i].end());
        sum += c.re.to_double() * measured_moment(sim, w, h, word_cap);
      }
      table.entries[{static_cast<int>(i), a, b}] = sum / std::pow(lambda, a + b);
    }
  }
  return table;
}

double PsiFit::evaluate(const Sigma& sigma) const {
  const Rational s1 = Rational::from_double(sigma[0]), s2 = Rational::from_double(sigma[1]);
  const Rational mx = s1 * s2 * s2, mz = s2 * s2 * s2 * s2;
  Rational sum;
  for (std::size_t k = 0; k < features.size(); ++k)
    sum += coeffs[k] * pow(mx, static_cast<unsigned>(features[k].first)) *
           pow(mz, static_cast<unsigned>(features[k].second));
  return sum.to_double();
}

Rational box_monomial_integral(const ParameterBox& box, int p, int q) {
  const Rational a1 = Rational::from_double(box.a1), b1 = Rational::from_double(box.b1);
  const Rational a2 = Rational::from_double(box.a2), b2 = Rational::from_double(box.b2);
  const unsigned up = static_cast<unsigned>(p + 1), uq = static_cast<unsigned>(q + 1);
  return (pow(b1, up) - pow(a1, up)) / Rational(p + 1) * ((pow(b2, uq) - pow(a2, uq)) / Rational(q + 1));
}

PsiFit fit_psi(const MomentTable& table, const ParameterBox& box, int i, int D, double ridge) {
  if (D < 0) throw std::invalid_argument("fit_psi: D must be nonnegative");
  if (!(ridge >= 0.0)) throw std::invalid_argument("fit_psi: ridge must be nonnegative");
  if (table.covered_degree(i) < D)
    throw std::invalid_argument("fit_psi: moment table does not cover degree " + std::to_string(D) + " for index " +
                                std::to_string(i));
  PsiFit fit;
  fit.features = feature_list(D);
  const std::size_t m = fit.features.size();

  // Gram matrix of s1^a s2^{2a+4b} under Lebesgue measure on the box.
  exact::Matrix<Rational> g(m, std::vector<Rational>(m));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c <= r; ++c) {
      const int a = fit.features[r].first + fit.features[c].first;
      const int b = fit.features[r].second + fit.features[c].second;
      g[r][c] = g[c][r] = box_monomial_integral(box, a, 2 * a + 4 * b);
    }

  {
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> gd(m, m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) gd(r, c) = g[r][c].to_long_double();
    Eigen::SelfAdjointEigenSolver<decltype(gd)> eig(gd, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    fit.gram_min_eigenvalue = static_cast<double>(ev(0));
    fit.gram_condition = static_cast<double>(ev(m - 1) / ev(0));
  }

  // G = L diag(d) L^T, L unit lower triangular; the rows of L^{-1} give the
  // exactly orthogonal features q_k with squared norms d_k.
  exact::Matrix<Rational> l(m, std::vector<Rational>(m));
  std::vector<Rational> d(m);
  for (std::size_t j = 0; j < m; ++j) {
    Rational s = g[j][j];
    for (std::size_t k = 0; k < j; ++k) s -= l[j][k] * l[j][k] * d[k];
    if (s.sign() <= 0) throw std::runtime_error("fit_psi: Gram matrix is not positive definite");
    d[j] = s;
    l[j][j] = 1;
    for (std::size_t r = j + 1; r < m; ++r) {
      Rational t = g[r][j];
      for (std::size_t k = 0; k < j; ++k) t -= l[r][k] * l[j][k] * d[k];
      l[r][j] = t / d[j];
    }
  }

  std::vector<Rational> y(m);
  for (std::size_t r = 0; r < m; ++r) {
    Rational t = Rational::from_double(table.at(i, fit.features[r].first, fit.features[r].second));
    for (std::size_t k = 0; k < r; ++k) t -= l[r][k] * y[k];
    y[r] = t;
  }
  // Orthonormal coordinates y_k / sqrt(d_k), shrunk by 1/(1 + ridge).
  const Rational shrink = Rational(1) / (Rational(1) + Rational::from_double(ridge));
  for (std::size_t k = 0; k < m; ++k) y[k] = y[k] / d[k] * shrink;
  fit.coeffs.assign(m, Rational());
  for (std::size_t r = m; r-- > 0;) {
    Rational t = y[r];
    for (std::size_t k = r + 1; k < m; ++k) t -= l[k][r] * fit.coeffs[k];
    fit.coeffs[r] = t;
  }
  return fit;
}

DensityEstimate recover_density(const std::vector<std::vector<double>>& psi, const QuadraticIdentity& identity,
                                const std::vector<KappaSignature>& kappas, const ParameterGrid& grid,
                                double rho_floor_relative) {
  const std::size_t dim = identity.coeffs.size();
  if (psi.size() != dim || kappas.size() != dim) throw std::invalid_argument("recover_density: size mismatch");
  if (!(rho_floor_relative > 0.0)) throw std::invalid_argument("recover_density: rho_floor must be positive");
  std::vector<std::vector<double>> c(dim, std::vector<double>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = 0; k < dim; ++k) c[i][k] = identity.coeffs[i][k].to_double();

  DensityEstimate est;
  est.density.values.assign(grid.size(), 0.0);
  std::vector<double> scaled(dim);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i < dim; ++i) scaled[i] = psi[i][j] / kappa_monomial(kappas[i], grid.nodes[j]);
    double q = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) q += c[i][k] * scaled[i] * scaled[k];
    est.density.values[j] = std::sqrt(std::max(0.0, q));
  }
  const double peak = *std::max_element(est.density.values.begin(), est.density.values.end());
  const double floor = rho_floor_relative * peak;
  est.defined.assign(grid.size(), false);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (peak > 0.0 && est.density.values[j] >= floor) {
      est.defined[j] = true;
    } else {
      est.density.values[j] = 0.0;
      est.undefined_nodes.push_back(j);
    }
  }
  return est;
}

std::vector<std::optional<std::vector<double>>> recover_harmonic_values(
    const std::vector<std::vector<double>>& psi, const DensityEstimate& density,
    const std::vector<KappaSignature>& kappas, const ParameterGrid& grid) {
  std::vector<std::optional<std::vector<double>>> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!density.defined[j]) continue;
    std::vector<double> v(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
      v[i] = psi[i][j] / (kappa_monomial(kappas[i], grid.nodes[j]) * density.density.values[j]);
    out[j] = std::move(v);
  }
  return out;
}

std::string to_string(Ambiguity a) { return a == Ambiguity::Unique ? "unique" : "antipodal-pair"; }

PointInverter::PointInverter(const HarmonicBasis& basis) : n_(basis.n) {
  validate_basis(basis);
  const std::size_t dim = basis.polys.size();
  for (const Poly& p : basis.polys) {
    basis_.emplace_back(p);
    gradients_.push_back({CompiledPoly(partial(p, 1)), CompiledPoly(partial(p, 2)), CompiledPoly(partial(p, 3))});
  }
  const std::size_t mono = monomials_of_degree(n_).size();
  exact::Matrix<CScalar> a(mono, std::vector<CScalar>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    const auto coords = basis.polys[k].coordinates(n_);
    for (std::size_t r = 0; r < mono; ++r) a[r][k] = coords[r];
  }
  const unsigned n = static_cast<unsigned>(n_);
  for (const std::array<int, 3>& axes : {std::array<int, 3>{1, 2, 3}, {2, 3, 1}, {3, 1, 2}}) {
    const Poly xa = Poly::variable(axes[0]), xb = Poly::variable(axes[1]), xc = Poly::variable(axes[2]);
    const Poly z = xa + xb * CScalar::i();
    const std::array<Poly, 3> targets{pow(z, n), xc * pow(z, n - 1), pow(xc + xa * CScalar::i(), n)};
    Chart chart;
    chart.axes = axes;
    for (int t = 0; t < 3; ++t) {
      const auto sol = exact::solve(a, targets[t].coordinates(n_));
      if (!sol) throw std::logic_error("PointInverter: target polynomial outside the span of the basis");
      for (const CScalar& c : *sol) chart.rows[t].push_back(c.to_complex());
    }
    charts_.push_back(std::move(chart));
  }
}

double PointInverter::residual(const Vec3& x, const std::vector<double>& values) const {
  double r = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    r = std::max(r, std::abs(basis_[i].real({x[0], x[1], x[2]}) - values[i]));
  return r;
}

Vec3 PointInverter::refine(Vec3 x, const std::vector<double>& values) const {
  // Gauss-Newton on the sphere in a tangent frame.
  const std::size_t m = basis_.size();
  double best = residual(x, values);
  for (int iter = 0; iter < 6 && best > 0.0; ++iter) {
    Vec3 helper = Vec3::UnitX();
    if (std::abs(x.x()) > 0.6) helper = Vec3::UnitY();
    const Vec3 e1 = x.cross(helper).normalized();
    const Vec3 e2 = x.cross(e1);
    Eigen::MatrixXd j(m, 2);
    Eigen::VectorXd r(m);
    const std::array<double, 3> p{x[0], x[1], x[2]};
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3 grad(gradients_[i][0].real(p), gradients_[i][1].real(p), gradients_[i][2].real(p));
      j(i, 0) = grad.dot(e1);
      j(i, 1) = grad.dot(e2);
      r(i) = basis_[i].real(p) - values[i];
    }
    const Eigen::Vector2d step = j.colPivHouseholderQr().solve(-r);
    const Vec3 candidate = (x + step(0) * e1 + step(1) * e2).normalized();
    const double res = residual(candidate, values);
    if (!(res < best)) break;
    x = candidate;
    best = res;
  }
  return x;
}

PointInversion PointInverter::invert_unchecked(const std::vector<double>& values) const {
  if (values.size() != basis_.size()) throw std::invalid_argument("invert_point: value vector has wrong size");
  const int n = n_;
  std::size_t best = 0;
  std::array<std::array<std::complex<double>, 3>, 3> c{};
  for (std::size_t h = 0; h < charts_.size(); ++h) {
    for (int t = 0; t < 3; ++t) {
      std::complex<double> s = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) s += charts_[h].rows[t][k] * values[k];
      c[h][t] = s;
    }
    if (std::abs(c[h][0]) < std::abs(c[best][0])) best = h;
  }
  // The chart with the smallest |z|^n has the largest |x_c|.
  const auto [c1, c2, c3] = c[best];
  Vec3 local;
  if (std::pow(std::abs(c1), 1.0 / n) < 1e-7 || std::abs(c2) == 0.0) {
    const double sign = (n % 2 == 1 && c3.real() < 0.0) ? -1.0 : 1.0;
    local = Vec3(0.0, 0.0, sign);
  } else {
    const std::complex<double> r = c1 / c2;  // (x_a + i x_b) / x_c
    local = Vec3(r.real(), r.imag(), 1.0).normalized();
    if (n % 2 == 1) {
      const std::complex<double> zd(local[0], local[1]);
      if ((std::conj(std::pow(zd, n)) * c1).real() < 0.0) local = -local;
    }
  }
  Vec3 x;
  const auto& axes = charts_[best].axes;
  for (int t = 0; t < 3; ++t) x[axes[t] - 1] = local[t];
  x = refine(x, values);

  PointInversion out;
  if (n % 2 == 0) {
    out.ambiguity = Ambiguity::AntipodalPair;
    const bool flip = x[2] < 0.0 || (x[2] == 0.0 && (x[0] < 0.0 || (x[0] == 0.0 && x[1] < 0.0)));
    if (flip) x = -x;
  }
  out.point = x;
  out.residual = residual(x, values);
  return out;
}

PointInversion PointInverter::invert(const std::vector<double>& values, double tol) const {
  PointInversion out = invert_unchecked(values);
  if (!(out.residual <= tol))
    throw InconsistentValues("values are not the harmonic values of a point on the sphere (residual " +
                             std::to_string(out.residual) + ")");
  return out;
}

PointInversion invert_point(const std::vector<double>& values, const HarmonicBasis& basis, double tol) {
  return PointInverter(basis).invert(values, tol);
}

StitchResult stitch_signs(const Profile& candidates, const std::vector<bool>& defined, const ParameterGrid& grid) {
  if (candidates.states.size() != grid.size() || defined.size() != grid.size())
    throw std::invalid_argument("stitch_signs: inputs do not match grid");
  StitchResult out;
  out.profile.states.assign(grid.size(), Vec3::Zero());
  out.profile.time_tag = candidates.time_tag;
  std::vector<bool> visited(grid.size(), false);
  for (std::size_t seed = 0; seed < grid.size(); ++seed) {
    if (!defined[seed] || visited[seed]) continue;
    ++out.components;
    visited[seed] = true;
    out.profile.states[seed] = candidates.states[seed];
    std::deque<std::size_t> queue{seed};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      for (std::size_t nb : grid.neighbors(cur)) {
        if (!defined[nb] || visited[nb]) continue;
        const Vec3& fixed = out.profile.states[cur];
        const Vec3& cand = candidates.states[nb];
        out.profile.states[nb] = (cand - fixed).squaredNorm() <= (cand + fixed).squaredNorm() ? cand : Vec3(-cand);
        visited[nb] = true;
        queue.push_back(nb);
      }
    }
  }
  return out;
}

std::string to_string(ReconstructionMode m) {
  switch (m) {
    case ReconstructionMode::OraclePsi: return "oracle-psi";
    case ReconstructionMode::OracleMoments: return "oracle-moments";
    case ReconstructionMode::MeasuredMoments: return "measured-moments";
  }
  return "unknown";
}

ReconstructionMode parse_mode(const std::string& s) {
  if (s == "oracle-psi") return ReconstructionMode::OraclePsi;
  if (s == "oracle-moments") return ReconstructionMode::OracleMoments;
  if (s == "measured-moments") return ReconstructionMode::MeasuredMoments;
  throw std::invalid_argument("unknown reconstruction mode '" + s + "'");
}

namespace {

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

ReconstructionResult reconstruct(const Profile& truth_profile, const Density& truth_density,
                                 const ParameterGrid& grid, const Poly& phi, const ReconstructionConfig& config) {
  ReconstructionResult res;
  const int n = stage("input", [&] {
    const auto deg = phi.homogeneous_degree();
    if (phi.is_zero() || !deg || *deg < 1 || !phi.is_real() || !is_harmonic(phi))
      throw std::invalid_argument("phi must be a nonzero real harmonic homogeneous polynomial of degree >= 1");
    if (truth_profile.states.size() != grid.size() || truth_density.values.size() != grid.size())
      throw std::invalid_argument("truth profile/density do not match the grid");
    if (config.D < 0 || !(config.ridge >= 0.0) || !(config.rho_floor > 0.0) || !(config.fd_step > 0.0))
      throw std::invalid_argument("invalid reconstruction parameters");
    return *deg;
  });

  res.words = stage("word-basis", [&] { return word_basis_search(phi); });
  std::vector<Poly> images;
  for (const Word& w : res.words) {
    images.push_back(apply_word(w, phi));
    res.kappas.push_back(kappa(w));
  }
  const QuadraticIdentity identity = stage("identity", [&] {
    HarmonicBasis basis{n, images, BasisProvenance::UserSupplied};
    return constant_quadratic_form(basis);
  });

  const std::size_t dim = images.size();
  std::vector<std::vector<double>> psi(dim, std::vector<double>(grid.size()));
  if (config.mode == ReconstructionMode::OraclePsi) {
    for (std::size_t i = 0; i < dim; ++i) {
      const CompiledPoly p(images[i]);
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const Vec3& x = truth_profile.states[j];
        psi[i][j] = kappa_monomial(res.kappas[i], grid.nodes[j]) * p.real({x[0], x[1], x[2]}) * truth_density.values[j];
      }
    }
  } else {
    const MomentTable table = stage("moments", [&] {
      if (config.mode == ReconstructionMode::OracleMoments)
        return oracle_moments(truth_profile, truth_density, grid, images, res.kappas, config.D);
      const Simulator sim(grid, truth_profile, truth_density, phi);
      MomentTable t = measured_moments(sim, res.words, n, config.D, config.fd_step, config.fd_word_cap);
      res.diagnostics["simulator_evaluations"] = static_cast<double>(sim.evaluations());
      return t;
    });
    int effective = config.D;
    for (std::size_t i = 0; i < dim; ++i) effective = std::min(effective, table.covered_degree(static_cast<int>(i)));
    res.effective_D = effective;
    res.diagnostics["effective_D"] = effective;
    res.diagnostics["moment_count"] = static_cast<double>(table.entries.size());
    stage("fit", [&] {
      if (effective < 0) throw std::runtime_error("moment table covers no complete feature degree");
      for (std::size_t i = 0; i < dim; ++i) {
        const PsiFit fit = fit_psi(table, grid.box, static_cast<int>(i), effective, config.ridge);
        res.diagnostics["gram_condition"] = fit.gram_condition;
        res.diagnostics["gram_min_eigenvalue"] = fit.gram_min_eigenvalue;
        for (std::size_t j = 0; j < grid.size(); ++j) psi[i][j] = fit.evaluate(grid.nodes[j]);
      }
      return 0;
    });
  }

  const DensityEstimate est =
      stage("density", [&] { return recover_density(psi, identity, res.kappas, grid, config.rho_floor); });
  res.density_est = est.density;
  res.defined = est.defined;
  res.undefined_nodes = est.undefined_nodes;
  res.diagnostics["undefined_count"] = static_cast<double>(est.undefined_nodes.size());

  Profile candidates;
  candidates.states.assign(grid.size(), Vec3::Zero());
  stage("inversion", [&] {
    const auto values = recover_harmonic_values(psi, est, res.kappas, grid);
    const PointInverter inverter(identity.basis);
    double worst = 0.0, identity_residual = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (!values[j]) continue;
      const auto& v = *values[j];
      double q = 0.0;
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) q += identity.coeffs[a][b].to_double() * v[a] * v[b];
      identity_residual = std::max(identity_residual, std::abs(q - 1.0));
      const PointInversion inv = inverter.invert_unchecked(v);
      candidates.states[j] = inv.point;
      worst = std::max(worst, inv.residual);
      if (inv.residual > config.residual_tol) res.inconsistent_nodes.push_back(j);
    }
    res.diagnostics["inversion_residual_max"] = worst;
    res.diagnostics["identity_residual_max"] = identity_residual;
    res.diagnostics["inconsistent_count"] = static_cast<double>(res.inconsistent_nodes.size());
    return 0;
  });

  if (n % 2 == 0) {
    res.ambiguity = Ambiguity::AntipodalPair;
    const StitchResult st = stage("stitch", [&] { return stitch_signs(candidates, res.defined, grid); });
    res.profile_est = st.profile;
    res.components = st.components;
  } else {
    res.ambiguity = Ambiguity::Unique;
    res.profile_est = candidates;
    res.components = 0;
    std::vector<bool> visited(grid.size(), false);
    for (std::size_t s = 0; s < grid.size(); ++s) {
      if (!res.defined[s] || visited[s]) continue;
      ++res.components;
      std::deque<std::size_t> q{s};
      visited[s] = true;
      while (!q.empty()) {
        const std::size_t cur = q.front();
        q.pop_front();
        for (std::size_t nb : grid.neighbors(cur))
          if (res.defined[nb] && !visited[nb]) visited[nb] = true, q.push_back(nb);
      }
    }
  }
  res.diagnostics["components"] = res.components;
  return res;
}

}  // namespace blochobs
