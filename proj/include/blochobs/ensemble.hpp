#ifndef BLOCHOBS_ENSEMBLE_HPP
#define BLOCHOBS_ENSEMBLE_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blochobs/poly.hpp"
#include "blochobs/quadrature.hpp"

namespace blochobs {

using Vec3 = Eigen::Vector3d;

/// rho(sigma_j) >= 0 per grid node; the measure is weight_j * values[j].
struct Density {
  std::vector<double> values;
};

Density uniform_density(const ParameterGrid& grid, double value = 1.0);
/// amplitude * exp(-((s1-c1)/sd1)^2/2 - ((s2-c2)/sd2)^2/2), truncated to the box.
Density gaussian_density(const ParameterGrid& grid, Sigma center, Sigma sd, double amplitude = 1.0);
Density table_density(const ParameterGrid& grid, std::vector<double> values);

/// Unit state per grid node.
struct Profile {
  std::vector<Vec3> states;
  double time_tag = 0.0;

  Profile negated() const;
};

Profile constant_profile(const ParameterGrid& grid, const Vec3& x);
/// Normalizes each row; throws on zero rows or a size mismatch.
Profile table_profile(const ParameterGrid& grid, const std::vector<Vec3>& rows);

/// Polar and azimuthal angles affine in sigma:
///   theta = theta0 + theta1 * s1 + theta2 * s2,  phi = phi0 + phi1 * s1 + phi2 * s2.
struct SphericalLinearParams {
  double theta0 = 0.6, theta1 = 0.5, theta2 = 0.3;
  double phi0 = 0.2, phi1 = 1.1, phi2 = 0.7;
};
Profile spherical_linear_profile(const ParameterGrid& grid, const SphericalLinearParams& p = {});

struct Segment {
  double tau = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

/// Piecewise-constant controls.
struct ControlSchedule {
  std::vector<Segment> segments;

  /// Durations must be positive and all entries finite.
  void validate() const;
  double duration() const;
};

/// Flow of sigma1 f0 + sigma2 (u1 f1 + u2 f2) for time tau: rotation about
/// omega = (-sigma2 u2, sigma2 u1, -sigma1) by |omega| tau.  tau may be negative.
Vec3 rotation_step(const Vec3& x, const Sigma& sigma, double u1, double u2, double tau);

Profile evolve_profile(const Profile& profile, const ParameterGrid& grid, const ControlSchedule& schedule);
/// Same as evolve_profile but accepts signed durations (used for central differences).
Profile evolve_signed(const Profile& profile, const ParameterGrid& grid, const std::vector<Segment>& segments);

/// sum_j w_j rho_j phi(x_j), summed in node order.
double output(const Profile& profile, const ParameterGrid& grid, const Density& density, const CompiledPoly& phi);
double output(const Profile& profile, const ParameterGrid& grid, const Density& density, const Poly& phi);

struct OutputTrace {
  std::vector<double> times;
  std::vector<double> values;
};

/// Samples at 0, dt, 2dt, ... and at every segment boundary including T.
std::vector<double> sample_times(const ControlSchedule& schedule, double dt);

OutputTrace simulate(const Profile& initial, const ParameterGrid& grid, const Density& density,
                     const ControlSchedule& schedule, const Poly& phi, double dt);

struct EquivalenceVerdict {
  bool distinguished = false;
  int trials_run = 0;
  /// Populated when distinguished.
  ControlSchedule schedule;
  double time = 0.0;
  double gap = 0.0;
  /// Largest gap seen over every trial (also when not distinguished).
  double max_gap = 0.0;

  std::string label() const { return distinguished ? "distinguished" : "equivalent-so-far"; }
};

struct EquivalenceOptions {
  int trials = 50;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  double dt = 0.1;
};

/// Random schedules: 1-4 segments, u uniform in [-2,2]^2, tau uniform in [0.1,1].
ControlSchedule random_schedule(std::mt19937_64& rng);

EquivalenceVerdict output_equiv_test(const Profile& profile_a, const Density& density_a,
                                     const Profile& profile_b, const Density& density_b,
                                     const ParameterGrid& grid, const Poly& phi,
                                     const EquivalenceOptions& options);

/// Header "t,y"; 17 significant digits.
void write_trace_csv(std::ostream& os, const OutputTrace& trace);
/// Header "sigma1,sigma2,weight,rho,x1,x2,x3".
void write_profile_csv(std::ostream& os, const ParameterGrid& grid, const Density& density, const Profile& profile);

}  // namespace blochobs

#endif  // BLOCHOBS_ENSEMBLE_HPP
