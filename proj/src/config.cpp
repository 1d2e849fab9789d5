#include "blochobs/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace blochobs {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

const json& required(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& where, std::optional<std::size_t> size = {}) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  if (size && j.size() != *size) throw ConfigError(where + ": expected " + std::to_string(*size) + " entries");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Vec3 vec3(const json& j, const std::string& where) {
  const auto v = numbers(j, where, 3);
  return Vec3(v[0], v[1], v[2]);
}

DensitySpec parse_density(const json& j, const std::string& where) {
  DensitySpec d;
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  d.kind = text(required(j, where, "kind"), where + ".kind");
  if (d.kind == "uniform") {
    only_keys(j, where, {"kind", "value"});
    if (j.contains("value")) d.value = number(j["value"], where + ".value");
    if (d.value < 0.0) throw ConfigError(where + ".value: must be nonnegative");
  } else if (d.kind == "gaussian") {
    only_keys(j, where, {"kind", "center", "sd", "amplitude"});
    if (j.contains("center")) {
      const auto c = numbers(j["center"], where + ".center", 2);
      d.center = {c[0], c[1]};
    }
    if (j.contains("sd")) {
      const auto s = numbers(j["sd"], where + ".sd", 2);
      d.sd = {s[0], s[1]};
    }
    if (j.contains("amplitude")) d.amplitude = number(j["amplitude"], where + ".amplitude");
    if (!(d.sd[0] > 0.0 && d.sd[1] > 0.0)) throw ConfigError(where + ".sd: must be positive");
    if (d.amplitude < 0.0) throw ConfigError(where + ".amplitude: must be nonnegative");
  } else if (d.kind == "table") {
    only_keys(j, where, {"kind", "values"});
    d.table = numbers(required(j, where, "values"), where + ".values");
    for (double v : d.table)
      if (v < 0.0) throw ConfigError(where + ".values: must be nonnegative");
  } else {
    throw ConfigError(where + ".kind: unknown density kind '" + d.kind + "'");
  }
  return d;
}

ProfileSpec parse_profile(const json& j, const std::string& where) {
  ProfileSpec p;
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  p.kind = text(required(j, where, "kind"), where + ".kind");
  if (p.kind == "constant") {
    only_keys(j, where, {"kind", "x"});
    p.x = vec3(required(j, where, "x"), where + ".x");
    if (!(p.x.norm() > 0.0)) throw ConfigError(where + ".x: must be nonzero");
  } else if (p.kind == "table") {
    only_keys(j, where, {"kind", "states"});
    const json& rows = required(j, where, "states");
    if (!rows.is_array()) throw ConfigError(where + ".states: expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      p.table.push_back(vec3(rows[i], where + ".states[" + std::to_string(i) + "]"));
      if (!(p.table.back().norm() > 0.0)) throw ConfigError(where + ".states: rows must be nonzero");
    }
  } else if (p.kind == "spherical-linear") {
    only_keys(j, where, {"kind", "theta", "phi"});
    if (j.contains("theta")) {
      const auto t = numbers(j["theta"], where + ".theta", 3);
      p.angles.theta0 = t[0], p.angles.theta1 = t[1], p.angles.theta2 = t[2];
    }
    if (j.contains("phi")) {
      const auto t = numbers(j["phi"], where + ".phi", 3);
      p.angles.phi0 = t[0], p.angles.phi1 = t[1], p.angles.phi2 = t[2];
    }
  } else {
    throw ConfigError(where + ".kind: unknown profile kind '" + p.kind + "'");
  }
  return p;
}

Poly parse_phi(const json& j, int& degree) {
  only_keys(j, "phi", {"degree", "named", "coefficients"});
  degree = integer(required(j, "phi", "degree"), "phi.degree");
  if (degree < 1) throw ConfigError("phi.degree: must be at least 1");
  const bool named = j.contains("named"), coeffs = j.contains("coefficients");
  if (named == coeffs) throw ConfigError("phi: give exactly one of 'named' or 'coefficients'");
  Poly p;
  if (named) {
    try {
      p = named_phi(text(j["named"], "phi.named"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("phi.named: ") + e.what());
    }
  } else {
    const json& rows = j["coefficients"];
    if (!rows.is_array() || rows.empty()) throw ConfigError("phi.coefficients: expected a nonempty array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string where = "phi.coefficients[" + std::to_string(i) + "]";
      const json& r = rows[i];
      if (!r.is_array() || r.size() != 4) throw ConfigError(where + ": expected [e1, e2, e3, \"p/q\"]");
      Monomial m(integer(r[0], where), integer(r[1], where), integer(r[2], where));
      for (int e : m.exponents)
        if (e < 0) throw ConfigError(where + ": exponents must be nonnegative");
      Rational c;
      try {
        c = r[3].is_string() ? Rational::parse(r[3].get<std::string>()) : Rational(static_cast<long>(integer(r[3], where)));
      } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
      }
      p.add_term(m, CScalar(c));
    }
  }
  if (p.homogeneous_degree() != degree) throw ConfigError("phi: not homogeneous of the declared degree");
  return p;
}

ControlSchedule parse_schedule(const json& j) {
  if (!j.is_array()) throw ConfigError("schedule: expected an array of [tau, u1, u2]");
  ControlSchedule s;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto v = numbers(j[i], "schedule[" + std::to_string(i) + "]", 3);
    if (!(v[0] > 0.0)) throw ConfigError("schedule[" + std::to_string(i) + "]: duration must be positive");
    s.segments.push_back({v[0], v[1], v[2]});
  }
  return s;
}

EquivalenceSpec parse_equivalence(const json& j) {
  only_keys(j, "equivalence", {"trials", "tol", "profile_b", "density_b", "negate_profile", "density_scale"});
  EquivalenceSpec e;
  if (j.contains("trials")) e.trials = integer(j["trials"], "equivalence.trials");
  if (j.contains("tol")) e.tol = number(j["tol"], "equivalence.tol");
  if (j.contains("profile_b")) e.profile_b = parse_profile(j["profile_b"], "equivalence.profile_b");
  if (j.contains("density_b")) e.density_b = parse_density(j["density_b"], "equivalence.density_b");
  if (j.contains("negate_profile")) {
    if (!j["negate_profile"].is_boolean()) throw ConfigError("equivalence.negate_profile: expected a boolean");
    e.negate_profile = j["negate_profile"].get<bool>();
  }
  if (j.contains("density_scale")) e.density_scale = number(j["density_scale"], "equivalence.density_scale");
  if (e.trials < 1) throw ConfigError("equivalence.trials: must be positive");
  if (!(e.tol >= 0.0)) throw ConfigError("equivalence.tol: must be nonnegative");
  if (!(e.density_scale >= 0.0)) throw ConfigError("equivalence.density_scale: must be nonnegative");
  return e;
}

ReconstructionConfig parse_reconstruction(const json& j) {
  only_keys(j, "reconstruction", {"mode", "D", "ridge", "rho_floor", "fd_step", "fd_word_cap", "residual_tol"});
  ReconstructionConfig r;
  if (j.contains("mode")) {
    try {
      r.mode = parse_mode(text(j["mode"], "reconstruction.mode"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("reconstruction.mode: ") + e.what());
    }
  }
  if (j.contains("D")) r.D = integer(j["D"], "reconstruction.D");
  if (j.contains("ridge")) r.ridge = number(j["ridge"], "reconstruction.ridge");
  if (j.contains("rho_floor")) r.rho_floor = number(j["rho_floor"], "reconstruction.rho_floor");
  if (j.contains("fd_step")) r.fd_step = number(j["fd_step"], "reconstruction.fd_step");
  if (j.contains("fd_word_cap")) r.fd_word_cap = integer(j["fd_word_cap"], "reconstruction.fd_word_cap");
  if (j.contains("residual_tol")) r.residual_tol = number(j["residual_tol"], "reconstruction.residual_tol");
  if (r.D < 0) throw ConfigError("reconstruction.D: must be nonnegative");
  if (r.ridge < 0.0) throw ConfigError("reconstruction.ridge: must be nonnegative");
  if (!(r.rho_floor > 0.0)) throw ConfigError("reconstruction.rho_floor: must be positive");
  if (!(r.fd_step > 0.0)) throw ConfigError("reconstruction.fd_step: must be positive");
  if (r.fd_word_cap < 0 || r.fd_word_cap > 4) throw ConfigError("reconstruction.fd_word_cap: must be in [0, 4]");
  if (!(r.residual_tol > 0.0)) throw ConfigError("reconstruction.residual_tol: must be positive");
  return r;
}

}  // namespace

Poly named_phi(const std::string& name) {
  static const std::vector<std::pair<std::string, Monomial>> table{
      {"x1", {1, 0, 0}},   {"x2", {0, 1, 0}},   {"x3", {0, 0, 1}},      {"x1x2", {1, 1, 0}},
      {"x1x3", {1, 0, 1}}, {"x2x3", {0, 1, 1}}, {"x1x2x3", {1, 1, 1}},
  };
  for (const auto& [n, m] : table)
    if (n == name) return Poly(m, CScalar(1));
  throw std::invalid_argument("unknown named observation function '" + name + "'");
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  only_keys(j, "config", {"box", "grid", "phi", "density", "profile", "schedule", "dt", "seed", "out",
                          "equivalence", "reconstruction"});
  RunConfig cfg;

  const json& box = required(j, "config", "box");
  only_keys(box, "box", {"a1", "b1", "a2", "b2"});
  cfg.box.a1 = number(required(box, "box", "a1"), "box.a1");
  cfg.box.b1 = number(required(box, "box", "b1"), "box.b1");
  cfg.box.a2 = number(required(box, "box", "a2"), "box.a2");
  cfg.box.b2 = number(required(box, "box", "b2"), "box.b2");
  try {
    cfg.box.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("box: ") + e.what());
  }

  const json& grid = required(j, "config", "grid");
  only_keys(grid, "grid", {"n1", "n2"});
  cfg.n1 = integer(required(grid, "grid", "n1"), "grid.n1");
  cfg.n2 = integer(required(grid, "grid", "n2"), "grid.n2");
  if (cfg.n1 < 1 || cfg.n2 < 1 || cfg.n1 > 512 || cfg.n2 > 512) throw ConfigError("grid: sizes must be in [1, 512]");

  cfg.phi = parse_phi(required(j, "config", "phi"), cfg.phi_degree);
  if (j.contains("density")) cfg.density = parse_density(j["density"], "density");
  if (j.contains("profile")) cfg.profile = parse_profile(j["profile"], "profile");
  if (j.contains("schedule")) cfg.schedule = parse_schedule(j["schedule"]);
  if (j.contains("dt")) cfg.dt = number(j["dt"], "dt");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt: must be positive");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out")) cfg.out = text(j["out"], "out");
  if (j.contains("equivalence")) cfg.equivalence = parse_equivalence(j["equivalence"]);
  if (j.contains("reconstruction")) cfg.reconstruction = parse_reconstruction(j["reconstruction"]);

  const std::size_t nodes = static_cast<std::size_t>(cfg.n1) * cfg.n2;
  if (cfg.density.kind == "table" && cfg.density.table.size() != nodes)
    throw ConfigError("density.values: expected one value per grid node");
  if (cfg.profile.kind == "table" && cfg.profile.table.size() != nodes)
    throw ConfigError("profile.states: expected one state per grid node");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ParameterGrid build_grid(const RunConfig& cfg) { return make_grid(cfg.box, cfg.n1, cfg.n2); }

Density build_density(const DensitySpec& spec, const ParameterGrid& grid) {
  if (spec.kind == "uniform") return uniform_density(grid, spec.value);
  if (spec.kind == "gaussian") return gaussian_density(grid, spec.center, spec.sd, spec.amplitude);
  return table_density(grid, spec.table);
}

Profile build_profile(const ProfileSpec& spec, const ParameterGrid& grid) {
  if (spec.kind == "constant") return constant_profile(grid, spec.x);
  if (spec.kind == "table") return table_profile(grid, spec.table);
  return spherical_linear_profile(grid, spec.angles);
}

}  // namespace blochobs
