#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blochobs/cli.hpp"
#include "blochobs/config.hpp"
#include "json.hpp"

using namespace blochobs;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "blochobs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("blochobs_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const char* kBaseConfig = R"({
  "box": {"a1": 0, "b1": 1, "a2": 0.5, "b2": 1.5},
  "grid": {"n1": 6, "n2": 6},
  "phi": {"degree": 2, "named": "x1x2"},
  "density": {"kind": "gaussian", "center": [0.5, 1.0], "sd": [0.5, 0.5]},
  "profile": {"kind": "spherical-linear"},
  "schedule": [[0.3, 1.0, -0.5], [0.4, 0.0, 2.0]],
  "dt": 0.1,
  "seed": 3,
  "equivalence": {"trials": 5}
})";

}  // namespace

TEST_CASE("verify-rep") {
  const Run r = run({"verify-rep", "--degree-max", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\n1  -2  ") != std::string::npos);
  CHECK(r.out.find("\n2  -6  ") != std::string::npos);
  CHECK(r.out.find("\n3  -12  ") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(run({"verify-rep", "--degree-max", "0"}).code == 2);
  const Run d = run({"verify-rep", "--degree-max", "1", "--dump"});
  CHECK(d.out.find("eta* = [00] + [11] + [22]") != std::string::npos);
}

TEST_CASE("identities n=1 and n=3 reproduce the golden files") {
  for (int n : {1, 3}) {
    const Run r = run({"identities", "--degree", std::to_string(n), "--format", "json"});
    CHECK(r.code == 0);
    CHECK(r.out == slurp(fs::path(BLOCHOBS_GOLDEN_DIR) / ("example1_n" + std::to_string(n) + ".json")));
  }
}

TEST_CASE("identities n=2 reports the reference identity as failing") {
  const Run r = run({"identities", "--degree", "2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("reference-identity FAIL") != std::string::npos);
  CHECK(r.err.find("derived-identity pass") != std::string::npos);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["coeffs"][2][2] == "3");
  CHECK(j["coeffs"][0][1] == "1/2");
}

TEST_CASE("identities on other bases") {
  CHECK(run({"identities", "--degree", "4"}).code == 0);
  CHECK(run({"identities", "--degree", "4", "--basis", "random", "--format", "text"}).code == 0);
  // The reference n=2 identity is checked whatever basis is emitted.
  CHECK(run({"identities", "--degree", "2", "--basis", "ladder"}).code == 1);
  CHECK(run({"identities", "--degree", "4", "--basis", "example"}).code == 2);
  CHECK(run({"identities", "--degree", "0"}).code == 2);
  CHECK(run({"identities", "--degree", "2", "--format", "xml"}).code == 2);
}

TEST_CASE("simulate with dt beyond the schedule samples both endpoints") {
  const fs::path cfg = write_file("sim.json", R"({
    "box": {"a1": 0, "b1": 1, "a2": 0.5, "b2": 1.5},
    "grid": {"n1": 4, "n2": 4},
    "phi": {"degree": 1, "named": "x3"},
    "schedule": [[0.5, 1.0, 0.0]],
    "dt": 10.0
  })");
  const Run r = run({"simulate", "--config", cfg.string()});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2);
  CHECK(r.out.rfind("t,y\n0,", 0) == 0);
}

TEST_CASE("simulate writes files and is deterministic") {
  const fs::path cfg = write_file("base.json", kBaseConfig);
  const fs::path a = scratch_dir() / "a.csv", b = scratch_dir() / "b.csv", snap = scratch_dir() / "snap.csv";
  CHECK(run({"simulate", "--config", cfg.string(), "--out", a.string(), "--profile-out", snap.string()}).code == 0);
  CHECK(run({"simulate", "--config", cfg.string(), "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(snap).rfind("sigma1,sigma2,weight,rho,x1,x2,x3\n", 0) == 0);
}

TEST_CASE("equivalence") {
  const fs::path self = write_file("self.json", kBaseConfig);
  const Run r = run({"equivalence", "--config", self.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "equivalent-so-far");
  CHECK(j["trials_run"] == 5);
  CHECK(j["witness"].is_null());

  auto scaled = nlohmann::json::parse(kBaseConfig);
  scaled["equivalence"]["density_scale"] = 1.01;
  const fs::path sc = write_file("scaled.json", scaled.dump());
  const auto k = nlohmann::json::parse(run({"equivalence", "--config", sc.string()}).out);
  CHECK(k["verdict"] == "distinguished");
  CHECK(k["witness"]["time"] == 0.0);

  CHECK(run({"equivalence", "--config", self.string()}).out == r.out);
}

TEST_CASE("reconstruct oracle-psi with an even observation") {
  const fs::path cfg = write_file("rec.json", kBaseConfig);
  const fs::path report = scratch_dir() / "report.csv";
  const Run r = run({"reconstruct", "--config", cfg.string(), "--mode", "oracle-psi", "--report", report.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ambiguity"] == "antipodal-pair");
  CHECK(j["density"].size() == 36);
  CHECK(j["profile"].size() == 36);
  CHECK(j["undefined_nodes"].empty());
  CHECK(j["diagnostics"].contains("gram_condition"));
  const std::string csv = slurp(report);
  CHECK(csv.rfind("sigma1,sigma2,rho_true,rho_est,angle_error_rad\n", 0) == 0);
  CHECK(run({"reconstruct", "--config", cfg.string(), "--mode", "oracle-psi"}).out == r.out);
  CHECK(run({"reconstruct", "--config", cfg.string(), "--mode", "bogus"}).code == 2);
}

TEST_CASE("reconstruct oracle-moments reports the Gram condition number") {
  auto cfg = nlohmann::json::parse(kBaseConfig);
  cfg["phi"] = nlohmann::json::parse(R"({"degree": 1, "coefficients": [[0, 0, 1, "2"]]})");
  cfg["reconstruction"] = nlohmann::json::parse(R"({"mode": "oracle-moments", "D": 3})");
  const fs::path p = write_file("mom.json", cfg.dump());
  const Run r = run({"reconstruct", "--config", p.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["mode"] == "oracle-moments");
  CHECK(j["diagnostics"]["gram_condition"].is_number());
  CHECK(j["ambiguity"] == "unique");
}

TEST_CASE("config errors exit 2") {
  auto bad = nlohmann::json::parse(kBaseConfig);
  bad["colour"] = "blue";
  CHECK(run({"simulate", "--config", write_file("unknown.json", bad.dump()).string()}).code == 2);

  auto nested = nlohmann::json::parse(kBaseConfig);
  nested["grid"]["n3"] = 2;
  const Run r = run({"simulate", "--config", write_file("nested.json", nested.dump()).string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown key 'n3'") != std::string::npos);

  auto wrong_degree = nlohmann::json::parse(kBaseConfig);
  wrong_degree["phi"]["degree"] = 3;
  CHECK(run({"simulate", "--config", write_file("deg.json", wrong_degree.dump()).string()}).code == 2);

  auto neg = nlohmann::json::parse(kBaseConfig);
  neg["schedule"] = nlohmann::json::parse("[[-0.1, 0, 0]]");
  CHECK(run({"simulate", "--config", write_file("neg.json", neg.dump()).string()}).code == 2);

  CHECK(run({"simulate", "--config", write_file("broken.json", "{not json").string()}).code == 2);
  CHECK(run({"simulate", "--config", (scratch_dir() / "missing.json").string()}).code == 2);
  CHECK(run({"simulate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("addition-check") {
  const Run r = run({"addition-check", "--degree", "3", "--samples", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);
  CHECK(run({"addition-check", "--degree", "3"}).out == r.out);
}

TEST_CASE("parse_config defaults and named observations") {
  const RunConfig cfg = parse_config(R"({"box": {"a1": 0, "b1": 2, "a2": 1, "b2": 2},
                                         "grid": {"n1": 3, "n2": 5}, "phi": {"degree": 1, "named": "x1"}})");
  CHECK(cfg.n1 == 3);
  CHECK(cfg.n2 == 5);
  CHECK(cfg.density.kind == "uniform");
  CHECK(cfg.profile.kind == "spherical-linear");
  CHECK(cfg.seed == 1);
  CHECK(cfg.phi == Poly::variable(1));
  CHECK_THROWS_AS(named_phi("x4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"n1": 3, "n2": 5}})"), ConfigError);
}
