#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "bnsswap/errors.hpp"
#include "bnsswap/io.hpp"
#include "support.hpp"

using namespace bnsswap;
using io::json;

TEST_CASE("parameter files round trip", "[io]") {
  for (const char* name : {"example_params.json", "base_params.json", "zero_params.json"}) {
    const auto p = testsupport::load_params(name);
    const auto again = io::params_from_json(json::parse(io::dump(io::to_json(p))));
    CHECK(again == p);
  }
  auto p = testsupport::load_params("base_params.json");
  p.beta.mode = BetaMode::fixed;
  p.beta.b12 = 0.1;
  p.beta.b23 = 0.2;
  p.beta.b31 = 0.3;
  p.triple.z_star = levy::SubordinatorSpec::inverse_gaussian(2.0, 3.0);
  p.kmax = 5;
  const auto j = io::to_json(p);
  CHECK(j["schema"] == io::kParamsSchema);
  CHECK(io::params_from_json(json::parse(io::dump(j))) == p);
}

TEST_CASE("contracts and covariance matrices round trip", "[io]") {
  const auto c = io::contract_from_json(io::read_json_file(testsupport::fixture("eigen_contract.json")));
  CHECK(c.kind == SwapKind::max_eigenvalue);
  CHECK(c.target_return == 0.0007);
  const auto c2 = io::contract_from_json(json::parse(io::dump(io::to_json(c))));
  CHECK(c2.kind == c.kind);
  CHECK(c2.strike == c.strike);
  CHECK(c2.T == c.T);
  CHECK(c2.rate == c.rate);
  CHECK(c2.target_return == c.target_return);

  auto cov = io::cov_from_json(io::read_json_file(testsupport::fixture("example_omega.json")));
  CHECK(cov.method == Method::fixture);
  CHECK(cov.entries(2, 0) == 0.00082);
  cov.diagnostics[0][1].quadrature_error = 1.25e-12;
  const auto back = io::cov_from_json(json::parse(io::dump(io::to_json(cov))));
  CHECK(back.entries == cov.entries);
  CHECK(back.diagnostics[0][1].quadrature_error == 1.25e-12);
  CHECK(std::isnan(back.diagnostics[1][1].series_tail));
}

TEST_CASE("dump writes 17 significant digits and null for non-finite values", "[io]") {
  const json j = {{"x", 0.1}, {"n", std::numeric_limits<double>::quiet_NaN()}, {"i", 3}, {"v", {1.0, 2.5}}};
  const auto s = io::dump(j, 0);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"n\":null") != std::string::npos);
  CHECK(s.find("\"i\":3") != std::string::npos);
  CHECK(s.find("[1.0, 2.5]") != std::string::npos);
  const double third = 1.0 / 3.0;
  CHECK(json::parse(io::dump(json(third))).get<double>() == third);
  CHECK(io::dump(json(std::numeric_limits<double>::infinity())) == "null");
}

TEST_CASE("matrices accept rows or nine row-major values", "[io]") {
  const Eigen::Matrix3d a = io::matrix_from_json(json::parse("[[1,2,3],[4,5,6],[7,8,9]]"));
  const Eigen::Matrix3d b = io::matrix_from_json(json::parse("[1,2,3,4,5,6,7,8,9]"));
  CHECK(a == b);
  CHECK(a(1, 2) == 6.0);
  CHECK(io::matrix_from_json(io::matrix_to_json(a)) == a);
  CHECK_THROWS_AS(io::matrix_from_json(json::parse("[1,2,3]")), InputError);
  CHECK_THROWS_AS(io::matrix_from_json(json::parse("[[1,2],[3,4],[5,6]]")), InputError);
}

TEST_CASE("overrides", "[io]") {
  const auto o = io::overrides_from_json(json::parse(
      R"({"assets": [{"sigma0": 0.05}, {"mu": 0.01, "sigma0sq": 0.0004}, {}],
          "gamma": [[1, 0.1, 0.2], [0.1, 1, 0.3], [0.2, 0.3, 1]],
          "subordinators": {"zStar": {"family": "ig", "a": 1, "b": 2}},
          "kmax": 6})"));
  REQUIRE(o.assets[0].sigma0sq);
  CHECK(*o.assets[0].sigma0sq == 0.05 * 0.05);
  CHECK(*o.assets[1].mu == 0.01);
  CHECK(!o.assets[2].mu);
  CHECK(*o.g23 == 0.3);
  CHECK(*o.g31 == 0.2);
  REQUIRE(o.z_star);
  CHECK(o.z_star->family() == levy::Family::inverse_gaussian);
  CHECK(!o.z1);
  CHECK(*o.kmax == 6);
  CHECK(!o.lambda);
}

TEST_CASE("malformed input raises InputError", "[io]") {
  CHECK_THROWS_AS(io::read_json_file(testsupport::fixture("missing.json")), InputError);
  CHECK_THROWS_AS(io::read_json_file(testsupport::fixture("constant_prices.csv")), InputError);
  auto j = io::to_json(testsupport::load_params("example_params.json"));
  j.erase("lambda");
  CHECK_THROWS_AS(io::params_from_json(j), InputError);
  j = io::to_json(testsupport::load_params("example_params.json"));
  j["lambda"] = "fast";
  CHECK_THROWS_AS(io::params_from_json(j), InputError);
  j = io::to_json(testsupport::load_params("example_params.json"));
  j["subordinators"]["z1"]["a"] = -1.0;
  CHECK_THROWS_AS(io::params_from_json(j), InputError);
  j["subordinators"]["z1"] = {{"family", "stable"}, {"a", 1.0}, {"b", 1.0}};
  CHECK_THROWS_AS(io::params_from_json(j), InputError);
  CHECK_THROWS_AS(io::cov_from_json(json::parse(R"({"entries": [1,2,3,4,5,6,7,8,9]})")), InputError);
  CHECK_THROWS_AS(io::contract_from_json(json::parse(R"({"kind": "trace", "strike": 0.01, "T": -1, "rate": 0})")),
                  InputError);
  CHECK_THROWS_AS(io::contract_from_json(json::parse(R"({"kind": "swap", "strike": 0.01, "T": 1, "rate": 0})")),
                  InputError);
  CHECK_THROWS_AS(io::reproduction_from_json(json::parse(R"({"P": [1,0,0,0,1,0,0,0,1], "F": [1, 2]})")), InputError);
}
