#include "bnsswap/optimize.hpp"

#include <cmath>
#include <limits>

#include "bnsswap/errors.hpp"

namespace bnsswap {

namespace {
constexpr double kFeasibilitySlack = 1e-12;
}

Eigen::Matrix<double, 3, 2> ConstraintBasis::A() const {
  Eigen::Matrix<double, 3, 2> a;
  a.col(0) = mu;
  a.col(1) = Eigen::Vector3d::Ones();
  return a;
}

ConstraintBasis qr_constraint_basis(const Eigen::Vector3d& mu, double k) {
  if (!mu.allFinite() || !std::isfinite(k)) throw ArgumentError("mu and k must be finite");
  ConstraintBasis basis;
  basis.mu = mu;
  basis.b = Eigen::Vector2d(k, 1.0);
  const Eigen::Matrix<double, 3, 2> A = basis.A();

  Eigen::HouseholderQR<Eigen::Matrix<double, 3, 2>> qr(A);
  Eigen::Matrix3d P = qr.householderQ();
  Eigen::Matrix2d R = qr.matrixQR().topRows<2>().triangularView<Eigen::Upper>();

  const double scale = A.norm();
  if (!(std::abs(R(0, 0)) > 1e-12 * scale) || !(std::abs(R(1, 1)) > 1e-12 * scale)) {
    throw ConstraintDegeneracyError(
        "constraint matrix [mu 1] is rank deficient: mu is proportional to the ones vector");
  }
  for (int c = 0; c < 2; ++c) {
    if (R(c, c) < 0.0) {
      R.row(c) *= -1.0;
      P.col(c) *= -1.0;
    }
  }
  if (P.determinant() < 0.0) P.col(2) *= -1.0;
  basis.P = P;
  basis.R = R;
  return basis;
}

ConstraintBasis make_basis(const Eigen::Matrix3d& P, const Eigen::Matrix2d& R,
                           const Eigen::Vector3d& mu, double k) {
  ConstraintBasis basis;
  basis.P = P;
  basis.R = R;
  basis.mu = mu;
  basis.b = Eigen::Vector2d(k, 1.0);
  return basis;
}

double quadratic_value(const Eigen::Matrix3d& P, const Eigen::Vector3d& F,
                       const Eigen::Matrix3d& omega) {
  const Eigen::Vector3d w = P * F;
  return w.dot(omega * w);
}

std::pair<double, double> attainable_targets(const Eigen::Matrix2d& R) {
  // |q|^2 = k^2/R00^2 + (1 - R01 k / R00)^2 / R11^2 <= 1
  const double r00 = R(0, 0), r01 = R(0, 1), r11 = R(1, 1);
  const double a = 1.0 / (r00 * r00) + r01 * r01 / (r00 * r00 * r11 * r11);
  const double b = -2.0 * r01 / (r00 * r11 * r11);
  const double c = 1.0 / (r11 * r11) - 1.0;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double sq = std::sqrt(disc);
  return {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)};
}

FeasibleWeights feasible_weights(const ConstraintBasis& basis, const Eigen::Matrix3d& omega) {
  if (!omega.allFinite()) throw ArgumentError("omega must be finite");
  FeasibleWeights out;
  out.q = basis.R.transpose().triangularView<Eigen::Lower>().solve(basis.b);
  const double q2 = out.q.squaredNorm();
  if (q2 > 1.0 + kFeasibilitySlack) {
    const auto [lo, hi] = attainable_targets(basis.R);
    throw InfeasibleTargetError(basis.b(0), lo, hi);
  }
  out.rmag = std::sqrt(std::max(0.0, 1.0 - q2));

  Eigen::Vector3d plus(out.q(0), out.q(1), out.rmag);
  Eigen::Vector3d minus(out.q(0), out.q(1), -out.rmag);
  const double lp = quadratic_value(basis.P, plus, omega);
  const double lm = quadratic_value(basis.P, minus, omega);
  const bool take_plus = lp >= lm;
  out.F = take_plus ? plus : minus;
  out.sign = take_plus ? 1 : -1;
  out.w = basis.P * out.F;
  out.lambda_value = take_plus ? lp : lm;
  out.other_lambda = take_plus ? lm : lp;
  return out;
}

}  // namespace bnsswap
