#include <catch_amalgamated.hpp>

#include <cmath>

#include "bnsswap/errors.hpp"
#include "bnsswap/io.hpp"
#include "bnsswap/pricing.hpp"
#include "support.hpp"

using namespace bnsswap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExpectedCovMatrix fixture_omega() {
  return io::cov_from_json(io::read_json_file(testsupport::fixture("example_omega.json")));
}

SwapContract contract(const std::string& name) {
  return io::contract_from_json(io::read_json_file(testsupport::fixture(name)));
}

const Eigen::Vector3d kMu(-0.0038, 0.0317, -0.0002);

}  // namespace

TEST_CASE("trace swap on the fixture matrix", "[pricing]") {
  const auto omega = fixture_omega();
  const auto c = contract("trace_contract.json");
  const auto r = price_trace(omega, c);
  CHECK_THAT(r.expected_metric, WithinRel(0.00736 + 0.00498 + 0.00217, 1e-14));
  CHECK_THAT(r.discount, WithinRel(std::exp(-0.00014 * 252), 1e-15));
  CHECK_THAT(r.price, WithinAbs(0.00435, 1e-5));
  CHECK(r.method == "fixture");
}

TEST_CASE("strike at the expected metric prices to zero", "[pricing]") {
  const auto omega = fixture_omega();
  auto c = contract("trace_contract.json");
  c.strike = price_trace(omega, c).expected_metric;
  CHECK(price_trace(omega, c).price == 0.0);

  auto e = contract("eigen_contract.json");
  e.strike = price_eigenvalue(omega, kMu, e).expected_metric;
  CHECK(price_eigenvalue(omega, kMu, e).price == 0.0);
}

TEST_CASE("max-eigenvalue swap with the computed basis", "[pricing]") {
  const auto omega = fixture_omega();
  const auto c = contract("eigen_contract.json");
  const auto r = price_eigenvalue(omega, kMu, c);
  REQUIRE(r.weights);
  REQUIRE(r.basis);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(omega.entries);
  CHECK(r.expected_metric <= es.eigenvalues().maxCoeff());
  CHECK(r.expected_metric >= es.eigenvalues().minCoeff());
  CHECK(r.expected_metric >= r.weights->other_lambda);
  CHECK_THAT(r.price, WithinRel(r.discount * (r.expected_metric - c.strike), 1e-15));
  const auto& w = r.weights->w;
  CHECK(std::abs(w.sum() - 1.0) < 1e-12);
  CHECK(std::abs(kMu.dot(w) - c.target_return) < 1e-12);
  CHECK(std::abs(w.norm() - 1.0) < 1e-12);
}

TEST_CASE("reproduction mode with the printed basis", "[pricing]") {
  const auto omega = fixture_omega();
  const auto c = contract("eigen_contract.json");
  const auto basis = io::reproduction_from_json(io::read_json_file(testsupport::fixture("printed_basis.json")));
  const auto r = price_eigenvalue_reproduction(omega, basis, c);
  CHECK_THAT(r.expected_metric, WithinAbs(0.0115, 2e-4));
  CHECK_THAT(r.price, WithinAbs(0.00145, 5e-5));
  CHECK(r.method == "fixture+reproduction");
  REQUIRE(r.reproduction_weights);
  const Eigen::Vector3d w = basis.P * basis.F;
  CHECK(r.reproduction_weights->isApprox(w));
  CHECK_THAT(r.expected_metric, WithinRel(w.dot(omega.entries * w), 1e-15));
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].find("not orthogonal") != std::string::npos);
}

TEST_CASE("contract validation", "[pricing]") {
  const auto omega = fixture_omega();
  auto c = contract("trace_contract.json");
  CHECK_THROWS_AS(price_eigenvalue(omega, kMu, c), ArgumentError);
  c.T = 0.0;
  CHECK_THROWS_AS(price_trace(omega, c), ArgumentError);
  CHECK(swap_kind_from_string("eigenvalue") == SwapKind::max_eigenvalue);
  CHECK_THROWS_AS(swap_kind_from_string("variance"), ArgumentError);

  auto e = contract("eigen_contract.json");
  e.target_return = 1.0;
  CHECK_THROWS_AS(price_eigenvalue(omega, kMu, e), InfeasibleTargetError);
}
