#include "blochobs/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blochobs/config.hpp"
#include "blochobs/ensemble.hpp"
#include "blochobs/identities.hpp"
#include "blochobs/reconstruction.hpp"
#include "blochobs/representation.hpp"
#include "blochobs/spherical_harmonics.hpp"

namespace blochobs {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

using ordered_json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sends `body` to the file at `path`, or to `fallback` when no path is given.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  body(f);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string output_path(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  return cfg.out.value_or("");
}

const char* pass(bool ok) { return ok ? "pass" : "FAIL"; }

// ---------------------------------------------------------------- verify-rep

bool decomposition_round_trips(int n, std::uint64_t seed) {
  std::vector<Poly> samples;
  for (const Monomial& m : monomials_of_degree(n)) samples.emplace_back(m, CScalar(1));
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(n));
  std::uniform_int_distribution<int> coeff(-5, 5);
  Poly mixed;
  for (const Monomial& m : monomials_of_degree(n)) mixed.add_term(m, CScalar(Rational(coeff(rng)), Rational(coeff(rng))));
  samples.push_back(mixed);
  for (const Poly& p : samples) {
    const auto parts = harmonic_decompose(p);
    for (const auto& [k, h] : parts)
      if (!is_harmonic(h) || h.homogeneous_degree() != n - 2 * k) return false;
    if (!(harmonic_recompose(parts) == p)) return false;
  }
  return true;
}

int cmd_verify_rep(int degree_max, bool dump, std::uint64_t seed, const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
  const std::vector<OperatorExpr> fields{OperatorExpr(Word{FieldId::F0}), OperatorExpr(Word{FieldId::F1}),
                                         OperatorExpr(Word{FieldId::F2})};
  const bool kappa_ok = kappa_of(xi()) == KappaSignature{1, 2} && kappa_of(zeta()) == KappaSignature{0, 4};
  std::ostringstream table;
  std::string first_failure;
  table << "n  lambda  commutators  centrality  kappa  ladder  casimir  decomposition\n";
  for (int n = 1; n <= degree_max; ++n) {
    const bool comm = commutator_check(n);
    bool central = true;
    for (const auto& f : fields) central = central && operators_commute(casimir(), f, n);
    const bool ladder = check_ladder(weight_ladder(n));
    bool eigen = true;
    std::string lambda = "-";
    try {
      lambda = verify_casimir_eigen(n).lambda.to_string();
    } catch (const VerificationError& e) {
      eigen = false;
      if (first_failure.empty()) first_failure = std::string("casimir: ") + e.what();
    }
    const bool decomp = decomposition_round_trips(n, seed);
    table << n << "  " << lambda << "  " << pass(comm) << "  " << pass(central) << "  " << pass(kappa_ok) << "  "
          << pass(ladder) << "  " << pass(eigen) << "  " << pass(decomp) << '\n';
    if (first_failure.empty()) {
      if (!comm) first_failure = "commutators failed at n=" + std::to_string(n);
      else if (!central) first_failure = "centrality failed at n=" + std::to_string(n);
      else if (!kappa_ok) first_failure = "kappa failed";
      else if (!ladder) first_failure = "ladder failed at n=" + std::to_string(n);
      else if (!decomp) first_failure = "decomposition failed at n=" + std::to_string(n);
    }
  }
  if (dump) {
    table << "eta* = " << casimir().to_string() << '\n'
          << "xi = " << xi().to_string() << '\n'
          << "zeta = " << zeta().to_string() << '\n'
          << "h = " << cartan_h().to_string() << '\n'
          << "e+ = " << raising().to_string() << '\n'
          << "e- = " << lowering().to_string() << '\n';
  }
  emit(out_path, out, [&](std::ostream& os) { os << table.str(); });
  if (!first_failure.empty()) {
    err << "verify-rep: " << first_failure << '\n';
    return kFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- identities

int cmd_identities(int n, const std::string& format, std::string basis_kind, std::uint64_t seed,
                   const std::string& out_path, std::ostream& out, std::ostream& err) {
  if (basis_kind.empty()) basis_kind = n <= 3 ? "example" : "ladder";
  if (basis_kind == "example" && n > 3) throw UsageError("--basis example is only available for degree 1..3");
  const HarmonicBasis basis = basis_kind == "example" ? example_basis(n)
                              : basis_kind == "random" ? random_real_basis(n, seed)
                                                       : real_harmonic_basis(n);
  const QuadraticIdentity identity = constant_quadratic_form(basis);
  emit(out_path, out, [&](std::ostream& os) {
    os << (format == "json" ? identity_to_json(identity) : identity_to_text(identity));
  });

  bool ok = true;
  auto report = [&](const std::string& name, bool passed, const std::string& detail = "") {
    err << "identities: " << name << ' ' << pass(passed) << (detail.empty() ? "" : " (" + detail + ")") << '\n';
    ok = ok && passed;
  };
  report("derived-identity", identity.verify());
  report("product-closure", s2_closure_check(basis));
  if (n <= 3) {
    const QuadraticIdentity ref = reference_identity(n);
    const Poly residual = ref.residual();
    report("reference-identity", residual.is_zero(), residual.is_zero() ? "" : "residual " + residual.to_string());
  }
  const double r = addition_theorem_residual(n, 100, seed);
  std::ostringstream detail;
  detail << std::setprecision(3) << "residual " << r;
  report("addition-theorem", r <= 1e-10, detail.str());
  return ok ? kOk : kFailure;
}

// ---------------------------------------------------------------- simulate

void require_real_phi(const RunConfig& cfg) {
  if (!cfg.phi.is_real()) throw ConfigError("phi: coefficients must be real");
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_path, const std::string& profile_out,
                 std::ostream& out) {
  require_real_phi(cfg);
  const ParameterGrid grid = build_grid(cfg);
  const Density density = build_density(cfg.density, grid);
  const Profile initial = build_profile(cfg.profile, grid);
  const OutputTrace trace = simulate(initial, grid, density, cfg.schedule, cfg.phi, cfg.dt);
  emit(out_path, out, [&](std::ostream& os) { write_trace_csv(os, trace); });
  if (!profile_out.empty()) {
    const Profile final_state = evolve_profile(initial, grid, cfg.schedule);
    emit(profile_out, out, [&](std::ostream& os) { write_profile_csv(os, grid, density, final_state); });
  }
  return kOk;
}

// ---------------------------------------------------------------- equivalence

ordered_json schedule_json(const ControlSchedule& s) {
  ordered_json arr = ordered_json::array();
  for (const Segment& seg : s.segments) arr.push_back({seg.tau, seg.u1, seg.u2});
  return arr;
}

int cmd_equivalence(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
  require_real_phi(cfg);
  const ParameterGrid grid = build_grid(cfg);
  const Density density_a = build_density(cfg.density, grid);
  const Profile profile_a = build_profile(cfg.profile, grid);
  const EquivalenceSpec& spec = cfg.equivalence;
  Density density_b = spec.density_b ? build_density(*spec.density_b, grid) : density_a;
  for (double& v : density_b.values) v *= spec.density_scale;
  Profile profile_b = spec.profile_b ? build_profile(*spec.profile_b, grid) : profile_a;
  if (spec.negate_profile) profile_b = profile_b.negated();

  EquivalenceOptions options;
  options.trials = spec.trials;
  options.seed = cfg.seed;
  options.tol = spec.tol;
  options.dt = cfg.dt;
  const EquivalenceVerdict v = output_equiv_test(profile_a, density_a, profile_b, density_b, grid, cfg.phi, options);

  ordered_json j;
  j["verdict"] = v.label();
  j["trials_run"] = v.trials_run;
  j["max_gap"] = v.max_gap;
  if (v.distinguished)
    j["witness"] = {{"schedule", schedule_json(v.schedule)}, {"time", v.time}, {"gap", v.gap}};
  else
    j["witness"] = nullptr;
  emit(out_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

// ---------------------------------------------------------------- reconstruct

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

void write_report(std::ostream& os, const ParameterGrid& grid, const Density& truth_density,
                  const Profile& truth_profile, const ReconstructionResult& res) {
  // With the antipodal ambiguity any global sign is an equally valid answer; report against the better one.
  double sign = 1.0;
  if (res.ambiguity == Ambiguity::AntipodalPair) {
    double plus = 0.0, minus = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (!res.defined[j]) continue;
      plus = std::max(plus, angle_between(res.profile_est.states[j], truth_profile.states[j]));
      minus = std::max(minus, angle_between(-res.profile_est.states[j], truth_profile.states[j]));
    }
    if (minus < plus) sign = -1.0;
  }
  os << "sigma1,sigma2,rho_true,rho_est,angle_error_rad\n" << std::setprecision(17);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    os << grid.nodes[j][0] << ',' << grid.nodes[j][1] << ',' << truth_density.values[j] << ','
       << res.density_est.values[j] << ',';
    if (res.defined[j])
      os << angle_between(sign * res.profile_est.states[j], truth_profile.states[j]);
    else
      os << "nan";
    os << '\n';
  }
}

int cmd_reconstruct(RunConfig cfg, const std::string& mode, const std::string& out_path,
                    const std::string& report_path, std::ostream& out, std::ostream& err) {
  require_real_phi(cfg);
  if (!mode.empty()) cfg.reconstruction.mode = parse_mode(mode);
  const ParameterGrid grid = build_grid(cfg);
  const Density density = build_density(cfg.density, grid);
  const Profile profile = build_profile(cfg.profile, grid);

  ReconstructionResult res;
  try {
    res = reconstruct(profile, density, grid, cfg.phi, cfg.reconstruction);
  } catch (const StageError& e) {
    err << "reconstruct: stage " << e.what() << '\n';
    return kFailure;
  }

  ordered_json j;
  j["mode"] = to_string(cfg.reconstruction.mode);
  j["ambiguity"] = to_string(res.ambiguity);
  j["density"] = res.density_est.values;
  ordered_json prof = ordered_json::array();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (res.defined[k]) {
      const Vec3& x = res.profile_est.states[k];
      prof.push_back({x[0], x[1], x[2]});
    } else {
      prof.push_back(nullptr);
    }
  }
  j["profile"] = prof;
  j["undefined_nodes"] = res.undefined_nodes;
  j["inconsistent_nodes"] = res.inconsistent_nodes;
  ordered_json words = ordered_json::array();
  for (const Word& w : res.words) words.push_back(word_to_string(w));
  j["words"] = words;
  ordered_json diag = ordered_json::object();
  for (const auto& [k, v] : res.diagnostics) diag[k] = v;
  if (!diag.contains("gram_condition")) diag["gram_condition"] = nullptr;
  j["diagnostics"] = diag;
  emit(out_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (!report_path.empty())
    emit(report_path, out, [&](std::ostream& os) { write_report(os, grid, density, profile, res); });
  return kOk;
}

// ---------------------------------------------------------------- addition-check

int cmd_addition_check(int n, int samples, std::uint64_t seed, double tol, const std::string& out_path,
                       std::ostream& out, std::ostream& err) {
  const double residual = addition_theorem_residual(n, samples, seed);
  const double at_one = legendre(n, 1.0);
  const bool ok = residual <= tol && std::abs(at_one - 1.0) <= 1e-12;
  emit(out_path, out, [&](std::ostream& os) {
    os << std::setprecision(17) << "n=" << n << " samples=" << samples << " residual=" << residual
       << " legendre_at_one=" << at_one << ' ' << pass(ok) << '\n';
  });
  if (!ok) err << "addition-check: residual " << residual << " exceeds " << tol << '\n';
  return ok ? kOk : kFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact algebra, simulation and reconstruction for Bloch spin ensembles", "blochobs"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out_path, config_path;
  auto common = [&](CLI::App* sub, bool with_config) {
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out", out_path, "Output path (default: standard output)");
    if (with_config) sub->add_option("--config", config_path, "JSON config")->required();
  };

  int degree_max = 3;
  bool dump = false;
  auto* verify = app.add_subcommand("verify-rep", "Exact checks of the operator algebra on P_n and H_n");
  verify->add_option("--degree-max", degree_max, "Largest degree checked")
      ->check(CLI::Range(1, kCommutatorDegreeCap));
  verify->add_flag("--dump", dump, "Print the operator expressions");
  common(verify, false);

  int degree = 1;
  std::string format = "json", basis_kind;
  auto* ids = app.add_subcommand("identities", "Constant quadratic identity on a real basis of H_n");
  ids->add_option("--degree", degree, "Degree n")->required()->check(CLI::Range(1, 12));
  ids->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  ids->add_option("--basis", basis_kind, "ladder, example or random (default: example for n <= 3)")
      ->check(CLI::IsMember({"ladder", "example", "random"}));
  common(ids, false);

  std::string profile_out;
  auto* sim = app.add_subcommand("simulate", "Output trace of one schedule");
  sim->add_option("--profile-out", profile_out, "Final profile snapshot CSV");
  common(sim, true);

  auto* eq = app.add_subcommand("equivalence", "Random-schedule output equivalence test");
  common(eq, true);

  std::string mode, report_path;
  auto* rec = app.add_subcommand("reconstruct", "Recover density and profile");
  rec->add_option("--mode", mode, "oracle-psi, oracle-moments or measured-moments")
      ->check(CLI::IsMember({"oracle-psi", "oracle-moments", "measured-moments"}));
  rec->add_option("--report", report_path, "Comparison CSV against the truth");
  common(rec, true);

  int add_degree = 1, samples = 100;
  double tol = 1e-10;
  auto* add = app.add_subcommand("addition-check", "Addition theorem residual on random sphere points");
  add->add_option("--degree", add_degree, "Degree n")->required()->check(CLI::Range(1, 30));
  add->add_option("--samples", samples, "Number of random pairs")->check(CLI::PositiveNumber);
  add->add_option("--tol", tol, "Pass threshold");
  common(add, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const std::uint64_t s = seed.value_or(1);
    if (verify->parsed()) return cmd_verify_rep(degree_max, dump, s, out_path, out, err);
    if (ids->parsed()) return cmd_identities(degree, format, basis_kind, s, out_path, out, err);
    if (add->parsed()) return cmd_addition_check(add_degree, samples, s, tol, out_path, out, err);

    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    const std::string target = output_path(out_path, cfg);
    if (sim->parsed()) return cmd_simulate(cfg, target, profile_out, out);
    if (eq->parsed()) return cmd_equivalence(cfg, target, out);
    if (rec->parsed()) return cmd_reconstruct(cfg, mode, target, report_path, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace blochobs
