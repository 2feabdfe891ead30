#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bnsswap/errors.hpp"
#include "bnsswap/optimize.hpp"

using namespace bnsswap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Eigen::Vector3d kMu(-0.0038, 0.0317, -0.0002);

// The two unit vectors with mu'w = k and 1'w = 1, from the line p + s n with n = mu x 1.
std::pair<Eigen::Vector3d, Eigen::Vector3d> feasible_points(const Eigen::Vector3d& mu, double k) {
  Eigen::Matrix<double, 2, 3> At;
  At.row(0) = mu.transpose();
  At.row(1) = Eigen::RowVector3d::Ones();
  const Eigen::Vector3d p = At.transpose() * (At * At.transpose()).inverse() * Eigen::Vector2d(k, 1.0);
  const Eigen::Vector3d n = mu.cross(Eigen::Vector3d::Ones()).normalized();
  // |p + s n|^2 = 1 with p orthogonal to n
  const double s = std::sqrt(std::max(0.0, 1.0 - p.squaredNorm()));
  return {p + s * n, p - s * n};
}

Eigen::Matrix3d random_spd(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix3d B;
  for (int i = 0; i < 9; ++i) B(i / 3, i % 3) = g(rng);
  return B * B.transpose() + 0.01 * Eigen::Matrix3d::Identity();
}

}  // namespace

TEST_CASE("QR of [mu 1] matches Gram-Schmidt", "[optimize]") {
  const auto b = qr_constraint_basis(kMu, 0.0007);
  const double n = kMu.norm();
  const double r01 = kMu.sum() / n;
  CHECK_THAT(b.R(0, 0), WithinRel(n, 1e-13));
  CHECK_THAT(b.R(0, 1), WithinRel(r01, 1e-13));
  CHECK_THAT(b.R(1, 1), WithinRel(std::sqrt(3.0 - r01 * r01), 1e-13));
  CHECK(b.R(1, 0) == 0.0);
  const Eigen::Vector3d p0 = kMu / n;
  const Eigen::Vector3d p1 = (Eigen::Vector3d::Ones() - r01 * p0) / std::sqrt(3.0 - r01 * r01);
  CHECK((b.P.col(0) - p0).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((b.P.col(1) - p1).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((b.P.col(2) - p0.cross(p1)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(((b.P.transpose() * b.P) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((b.P.leftCols<2>() * b.R - b.A()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THAT(b.P.determinant(), WithinAbs(1.0, 1e-14));
}

TEST_CASE("rounded published factors", "[optimize]") {
  const auto b = qr_constraint_basis(kMu, 0.0007);
  CHECK_THAT(b.R(0, 0), WithinAbs(0.0319, 5e-4));
  CHECK_THAT(b.R(0, 1), WithinAbs(0.8676, 5e-4));
  CHECK_THAT(b.R(1, 1), WithinAbs(1.4991, 5e-4));
  const auto fw = feasible_weights(b, Eigen::Matrix3d::Identity());
  CHECK_THAT(fw.q(0), WithinAbs(0.0219, 5e-4));
  CHECK_THAT(fw.q(1), WithinAbs(0.6543, 5e-4));
  CHECK_THAT(fw.rmag, WithinAbs(0.7559, 5e-4));
}

TEST_CASE("zero first mean gives the hand-derived factors", "[optimize]") {
  // mu = (0, m2, m3): R00 = |mu|, R01 = (m2 + m3)/|mu|
  const Eigen::Vector3d mu(0.0, 0.3, -0.1);
  const auto b = qr_constraint_basis(mu, 0.05);
  const double n = std::sqrt(0.1);
  CHECK_THAT(b.R(0, 0), WithinRel(n, 1e-14));
  CHECK_THAT(b.R(0, 1), WithinRel(0.2 / n, 1e-14));
  CHECK_THAT(b.R(1, 1), WithinRel(std::sqrt(3.0 - 0.04 / 0.1), 1e-14));
  CHECK_THAT(b.P(0, 0), WithinAbs(0.0, 1e-15));
  // q = R^{-T} (k, 1)
  const auto fw = feasible_weights(b, Eigen::Matrix3d::Identity());
  CHECK_THAT(fw.q(0), WithinRel(0.05 / n, 1e-14));
  CHECK_THAT(fw.q(1), WithinRel((1.0 - b.R(0, 1) * fw.q(0)) / b.R(1, 1), 1e-14));
}

TEST_CASE("feasible weights pick the larger of the two feasible points", "[optimize]") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Vector3d mu(g(rng), g(rng), g(rng));
    const auto [lo, hi] = attainable_targets(qr_constraint_basis(mu, 0.0).R);
    std::uniform_real_distribution<double> uk(lo, hi);
    const double k = uk(rng);
    const Eigen::Matrix3d omega = random_spd(rng);
    const auto b = qr_constraint_basis(mu, k);
    const auto fw = feasible_weights(b, omega);
    const auto [a, c] = feasible_points(mu, k);
    const double best = std::max(a.dot(omega * a), c.dot(omega * c));
    const double worst = std::min(a.dot(omega * a), c.dot(omega * c));
    CHECK_THAT(fw.lambda_value, WithinRel(best, 1e-8));
    CHECK_THAT(fw.other_lambda, WithinRel(worst, 1e-8));
    CHECK(std::abs(mu.dot(fw.w) - k) < 1e-10);
    CHECK(std::abs(fw.w.sum() - 1.0) < 1e-10);
    CHECK(std::abs(fw.w.squaredNorm() - 1.0) < 1e-10);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("scaling omega scales lambda and keeps the weights", "[optimize]") {
  std::mt19937_64 rng(3);
  const Eigen::Matrix3d omega = random_spd(rng);
  const auto b = qr_constraint_basis(kMu, 0.0007);
  const auto f1 = feasible_weights(b, omega);
  const auto f2 = feasible_weights(b, 7.0 * omega);
  CHECK_THAT(f2.lambda_value, WithinRel(7.0 * f1.lambda_value, 1e-14));
  CHECK((f1.w - f2.w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("infeasible and degenerate constraints", "[optimize]") {
  const auto R = qr_constraint_basis(kMu, 0.0).R;
  const auto [lo, hi] = attainable_targets(R);
  CHECK(lo < 0.0);
  CHECK(hi > 0.0);
  // at the boundary |q| = 1
  const auto edge = feasible_weights(qr_constraint_basis(kMu, hi), Eigen::Matrix3d::Identity());
  CHECK(edge.rmag < 1e-6);
  try {
    feasible_weights(qr_constraint_basis(kMu, 2.0 * hi), Eigen::Matrix3d::Identity());
    FAIL("expected InfeasibleTargetError");
  } catch (const InfeasibleTargetError& e) {
    CHECK_THAT(e.k_min(), WithinRel(lo, 1e-12));
    CHECK_THAT(e.k_max(), WithinRel(hi, 1e-12));
    CHECK(std::string(e.what()).find("attainable") != std::string::npos);
  }
  CHECK_THROWS_AS(qr_constraint_basis(Eigen::Vector3d(0.02, 0.02, 0.02), 0.02), ConstraintDegeneracyError);
  CHECK_THROWS_AS(qr_constraint_basis(Eigen::Vector3d::Zero(), 0.0), ConstraintDegeneracyError);
  CHECK_THROWS_AS(qr_constraint_basis(Eigen::Vector3d(1, std::nan(""), 0), 0.0), ArgumentError);
}

TEST_CASE("quadratic value", "[optimize]") {
  const Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
  const Eigen::Vector3d F(1, 2, 3);
  Eigen::Matrix3d omega = Eigen::Matrix3d::Zero();
  omega.diagonal() << 1, 10, 100;
  CHECK(quadratic_value(P, F, omega) == 1 + 40 + 900);
}
