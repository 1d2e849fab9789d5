#ifndef BLOCHOBS_CONFIG_HPP
#define BLOCHOBS_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochobs/ensemble.hpp"
#include "blochobs/reconstruction.hpp"

namespace blochobs {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DensitySpec {
  std::string kind = "uniform";  // uniform | gaussian | table
  double value = 1.0;
  Sigma center{0.5, 1.0};
  Sigma sd{0.5, 0.5};
  double amplitude = 1.0;
  std::vector<double> table;
};

struct ProfileSpec {
  std::string kind = "spherical-linear";  // constant | table | spherical-linear
  Vec3 x = Vec3(0.0, 0.0, 1.0);
  std::vector<Vec3> table;
  SphericalLinearParams angles;
};

struct EquivalenceSpec {
  int trials = 50;
  double tol = 1e-12;
  /// Pair B is pair A transformed: optional own profile/density, then negation and scaling.
  std::optional<ProfileSpec> profile_b;
  std::optional<DensitySpec> density_b;
  bool negate_profile = false;
  double density_scale = 1.0;
};

struct RunConfig {
  ParameterBox box;
  int n1 = 16, n2 = 16;
  Poly phi;
  int phi_degree = 0;
  DensitySpec density;
  ProfileSpec profile;
  ControlSchedule schedule;
  double dt = 0.1;
  std::uint64_t seed = 1;
  std::optional<std::string> out;
  EquivalenceSpec equivalence;
  ReconstructionConfig reconstruction;
};

/// Parses and validates a JSON document.  Unknown keys, wrong types and
/// out-of-range values raise ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Named observation functions: x1, x2, x3, x1x2, x1x3, x2x3, x1x2x3.
Poly named_phi(const std::string& name);

ParameterGrid build_grid(const RunConfig& cfg);
Density build_density(const DensitySpec& spec, const ParameterGrid& grid);
Profile build_profile(const ProfileSpec& spec, const ParameterGrid& grid);

}  // namespace blochobs

#endif  // BLOCHOBS_CONFIG_HPP
