#include "blochobs/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace blochobs {

Density uniform_density(const ParameterGrid& grid, double value) {
  if (!(value >= 0.0)) throw std::invalid_argument("density must be nonnegative");
  return Density{std::vector<double>(grid.size(), value)};
}

Density gaussian_density(const ParameterGrid& grid, Sigma center, Sigma sd, double amplitude) {
  if (!(sd[0] > 0.0 && sd[1] > 0.0)) throw std::invalid_argument("gaussian density needs positive widths");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("gaussian amplitude must be nonnegative");
  Density d;
  d.values.reserve(grid.size());
  for (const Sigma& s : grid.nodes) {
    const double z1 = (s[0] - center[0]) / sd[0], z2 = (s[1] - center[1]) / sd[1];
    d.values.push_back(amplitude * std::exp(-0.5 * (z1 * z1 + z2 * z2)));
  }
  return d;
}

Density table_density(const ParameterGrid& grid, std::vector<double> values) {
  if (values.size() != grid.size())
    throw std::invalid_argument("density table has " + std::to_string(values.size()) +
                                " entries, grid has " + std::to_string(grid.size()));
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("density values must be finite and nonnegative");
  return Density{std::move(values)};
}

Profile Profile::negated() const {
  Profile out = *this;
  for (auto& x : out.states) x = -x;
  return out;
}

Profile constant_profile(const ParameterGrid& grid, const Vec3& x) {
  return table_profile(grid, std::vector<Vec3>(grid.size(), x));
}

Profile table_profile(const ParameterGrid& grid, const std::vector<Vec3>& rows) {
  if (rows.size() != grid.size())
    throw std::invalid_argument("profile table has " + std::to_string(rows.size()) +
                                " rows, grid has " + std::to_string(grid.size()));
  Profile p;
  p.states.reserve(rows.size());
  for (const Vec3& x : rows) {
    const double r = x.norm();
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("profile states must be nonzero and finite");
    p.states.push_back(x / r);
  }
  return p;
}

Profile spherical_linear_profile(const ParameterGrid& grid, const SphericalLinearParams& q) {
  Profile p;
  p.states.reserve(grid.size());
  for (const Sigma& s : grid.nodes) {
    const double theta = q.theta0 + q.theta1 * s[0] + q.theta2 * s[1];
    const double phi = q.phi0 + q.phi1 * s[0] + q.phi2 * s[1];
    p.states.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  }
  return p;
}

void ControlSchedule::validate() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (!std::isfinite(s.tau) || !std::isfinite(s.u1) || !std::isfinite(s.u2))
      throw std::invalid_argument("schedule segment " + std::to_string(i) + " is not finite");
    if (!(s.tau > 0.0)) throw std::invalid_argument("schedule segment " + std::to_string(i) + " has nonpositive duration");
  }
}

double ControlSchedule::duration() const {
  double t = 0.0;
  for (const Segment& s : segments) t += s.tau;
  return t;
}

Vec3 rotation_step(const Vec3& x, const Sigma& sigma, double u1, double u2, double tau) {
  const Vec3 omega(-sigma[1] * u2, sigma[1] * u1, -sigma[0]);
  const double speed = omega.norm();
  const double angle = speed * tau;
  if (std::abs(angle) < 1e-8) {
    const Vec3 wx = omega.cross(x);
    return x + tau * wx + 0.5 * tau * tau * omega.cross(wx);
  }
  const Vec3 k = omega / speed;
  const double c = std::cos(angle), s = std::sin(angle);
  return x * c + k.cross(x) * s + k * (k.dot(x) * (1.0 - c));
}

Profile evolve_signed(const Profile& profile, const ParameterGrid& grid, const std::vector<Segment>& segments) {
  if (profile.states.size() != grid.size()) throw std::invalid_argument("profile does not match grid");
  Profile out = profile;
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (const Segment& seg : segments) out.states[j] = rotation_step(out.states[j], grid.nodes[j], seg.u1, seg.u2, seg.tau);
  for (const Segment& seg : segments) out.time_tag += seg.tau;
  return out;
}

Profile evolve_profile(const Profile& profile, const ParameterGrid& grid, const ControlSchedule& schedule) {
  schedule.validate();
  return evolve_signed(profile, grid, schedule.segments);
}

double output(const Profile& profile, const ParameterGrid& grid, const Density& density, const CompiledPoly& phi) {
  if (profile.states.size() != grid.size() || density.values.size() != grid.size())
    throw std::invalid_argument("profile/density do not match grid");
  double y = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Vec3& x = profile.states[j];
    y += grid.weights[j] * density.values[j] * phi.real({x[0], x[1], x[2]});
  }
  return y;
}

double output(const Profile& profile, const ParameterGrid& grid, const Density& density, const Poly& phi) {
  if (!phi.is_real()) throw std::invalid_argument("observation function must be real");
  return output(profile, grid, density, CompiledPoly(phi));
}

std::vector<double> sample_times(const ControlSchedule& schedule, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  schedule.validate();
  const double total = schedule.duration();
  std::vector<double> t;
  for (long k = 0;; ++k) {
    const double tk = static_cast<double>(k) * dt;
    if (tk > total) break;
    t.push_back(tk);
  }
  double boundary = 0.0;
  for (const Segment& s : schedule.segments) {
    boundary += s.tau;
    t.push_back(boundary);
  }
  t.push_back(0.0);
  std::sort(t.begin(), t.end());
  const double tol = 1e-12 * std::max(1.0, total);
  std::vector<double> out;
  for (double x : t)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

OutputTrace simulate(const Profile& initial, const ParameterGrid& grid, const Density& density,
                     const ControlSchedule& schedule, const Poly& phi, double dt) {
  if (!phi.is_real()) throw std::invalid_argument("observation function must be real");
  const std::vector<double> times = sample_times(schedule, dt);
  const CompiledPoly f(phi);
  OutputTrace trace;
  Profile current = initial;
  double now = 0.0;
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (double t : times) {
    // Advance from `now` to `t` through the segments in between.
    std::vector<Segment> steps;
    while (now < t && seg < schedule.segments.size()) {
      const Segment& s = schedule.segments[seg];
      const double seg_end = seg_start + s.tau;
      const double stop = std::min(t, seg_end);
      if (stop > now) steps.push_back({stop - now, s.u1, s.u2});
      now = stop;
      if (seg_end - now <= 1e-12 * std::max(1.0, seg_end)) {
        now = seg_end;
        seg_start = seg_end;
        ++seg;
      }
    }
    current = evolve_signed(current, grid, steps);
    current.time_tag = t;
    trace.times.push_back(t);
    trace.values.push_back(output(current, grid, density, f));
  }
  return trace;
}

ControlSchedule random_schedule(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> control(-2.0, 2.0), duration(0.1, 1.0);
  ControlSchedule s;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Segment seg;
    seg.tau = duration(rng);
    seg.u1 = control(rng);
    seg.u2 = control(rng);
    s.segments.push_back(seg);
  }
  return s;
}

EquivalenceVerdict output_equiv_test(const Profile& profile_a, const Density& density_a,
                                     const Profile& profile_b, const Density& density_b,
                                     const ParameterGrid& grid, const Poly& phi,
                                     const EquivalenceOptions& options) {
  std::mt19937_64 rng(options.seed);
  EquivalenceVerdict v;
  for (int trial = 0; trial < options.trials; ++trial) {
    const ControlSchedule schedule = random_schedule(rng);
    const OutputTrace a = simulate(profile_a, grid, density_a, schedule, phi, options.dt);
    const OutputTrace b = simulate(profile_b, grid, density_b, schedule, phi, options.dt);
    v.trials_run = trial + 1;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      const double gap = std::abs(a.values[i] - b.values[i]);
      v.max_gap = std::max(v.max_gap, gap);
      if (gap > options.tol) {
        v.distinguished = true;
        v.schedule = schedule;
        v.time = a.times[i];
        v.gap = gap;
        return v;
      }
    }
  }
  return v;
}

void write_trace_csv(std::ostream& os, const OutputTrace& trace) {
  os << "t,y\n" << std::setprecision(17);
  for (std::size_t i = 0; i < trace.times.size(); ++i) os << trace.times[i] << ',' << trace.values[i] << '\n';
}

void write_profile_csv(std::ostream& os, const ParameterGrid& grid, const Density& density, const Profile& profile) {
  os << "sigma1,sigma2,weight,rho,x1,x2,x3\n" << std::setprecision(17);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Vec3& x = profile.states[j];
    os << grid.nodes[j][0] << ',' << grid.nodes[j][1] << ',' << grid.weights[j] << ',' << density.values[j] << ','
       << x[0] << ',' << x[1] << ',' << x[2] << '\n';
  }
}

}  // namespace blochobs
