#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "bnsswap/io.hpp"
#include "support.hpp"

using namespace bnsswap;
using io::json;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("bnsswap_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

struct Run {
  int code = -1;
  json report;
};

// Runs the CLI with stdout captured to a file; the report is parsed when it is JSON.
Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch_dir() / "stdout.json";
  const std::string cmd = env + " '" + std::string(BNSSWAP_CLI) + "' " + args + " > '" + out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  r.report = json::parse(in, nullptr, false);
  return r;
}

std::string fx(const std::string& name) { return "'" + testsupport::fixture(name) + "'"; }

}  // namespace

TEST_CASE("price with the fixture matrix", "[cli]") {
  const auto r = run("price --contract " + fx("trace_contract.json") + " --method fixture-omega --omega " +
                     fx("example_omega.json"));
  REQUIRE(r.code == 0);
  CHECK(r.report["schema"] == io::kReportSchema);
  CHECK(r.report["command"] == "price");
  CHECK_THAT(r.report["results"]["pricing"]["price"].get<double>(), WithinAbs(0.00435, 1e-5));
  CHECK(r.report.contains("wallTimeSeconds"));
}

TEST_CASE("reproduction mode", "[cli]") {
  const auto r = run("price --contract " + fx("eigen_contract.json") + " --method fixture-omega --omega " +
                     fx("example_omega.json") + " --reproduction " + fx("printed_basis.json"));
  REQUIRE(r.code == 0);
  const auto& rep = r.report["results"]["reproduction"];
  CHECK_THAT(rep["expectedMetric"].get<double>(), WithinAbs(0.0115, 2e-4));
  CHECK_THAT(rep["price"].get<double>(), WithinAbs(0.00145, 5e-5));
}

TEST_CASE("calibrate writes the stored parameter file", "[cli]") {
  const fs::path out = scratch_dir() / "params.json";
  const auto r = run("calibrate --prices " + fx("synthetic_prices_252.csv") + " --overrides " +
                     fx("example_overrides.json") + " --out '" + out.string() + "'");
  REQUIRE(r.code == 0);
  CHECK(io::params_from_json(io::read_json_file(out.string())) == testsupport::load_params("example_params.json"));
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run("price --contract " + fx("no_such.json") + " --method fixture-omega --omega " + fx("example_omega.json"))
            .code == 2);
  CHECK(run("price --contract " + fx("trace_contract.json") + " --method bogus").code == 2);
  CHECK(run("calibrate --prices " + fx("constant_prices.csv") + " --out '" + (scratch_dir() / "c.json").string() + "'")
            .code == 3);

  // target return outside the attainable interval
  const fs::path far = scratch_dir() / "far_contract.json";
  auto c = io::read_json_file(testsupport::fixture("eigen_contract.json"));
  c["targetReturn"] = 5.0;
  std::ofstream(far) << c.dump();
  CHECK(run("price --contract '" + far.string() + "' --method series --params " + fx("example_params.json")).code == 4);

  // tampered parameters
  const fs::path bad = scratch_dir() / "bad_params.json";
  auto p = io::read_json_file(testsupport::fixture("example_params.json"));
  p["lambda"] = -0.4;
  std::ofstream(bad) << p.dump();
  CHECK(run("price --contract " + fx("trace_contract.json") + " --method series --params '" + bad.string() + "'")
            .code == 2);
}

TEST_CASE("strike at the expected metric prices to zero", "[cli]") {
  const auto first = run("price --contract " + fx("trace_contract.json") + " --method approx --params " +
                         fx("base_params.json"));
  REQUIRE(first.code == 0);
  const double metric = first.report["results"]["pricing"]["expectedMetric"].get<double>();
  const fs::path atm = scratch_dir() / "atm_contract.json";
  auto c = io::read_json_file(testsupport::fixture("trace_contract.json"));
  c["strike"] = metric;
  std::ofstream(atm) << io::dump(c);
  const auto second = run("price --contract '" + atm.string() + "' --method approx --params " + fx("base_params.json"));
  REQUIRE(second.code == 0);
  CHECK(second.report["results"]["pricing"]["price"].get<double>() == 0.0);
}

TEST_CASE("verify is reproducible for a fixed seed", "[cli][stochastic]") {
  const std::string args = "verify --params " + fx("zero_params.json") + " --paths 40 --steps 30 --threads 2";
  const auto a = run(args, "BNSSWAP_SEED=99");
  const auto b = run(args, "BNSSWAP_SEED=99");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.report["seed"] == 99);
  CHECK(a.report["results"] == b.report["results"]);
  CHECK(a.report["results"]["pass"] == true);

  const std::string base = "verify --params " + fx("base_params.json") + " --paths 400 --steps 100 --seed 5";
  const auto c = run(base);
  const auto d = run(base + " --threads 3");
  REQUIRE(c.code == 0);
  CHECK(c.report["results"]["mc"] == d.report["results"]["mc"]);
}
