#pragma once

#include <Eigen/Dense>

namespace bnsswap {

/// QR factorisation of A = [mu 1] with P orthogonal and R upper triangular.
/// P.col(0..1) span the constraints; P.col(2) is the unit normal.
struct ConstraintBasis {
  Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  Eigen::Vector3d mu = Eigen::Vector3d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d(0.0, 1.0);  // (k, 1)

  Eigen::Matrix<double, 3, 2> A() const;
};

struct FeasibleWeights {
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  double rmag = 0.0;
  Eigen::Vector3d F = Eigen::Vector3d::Zero();
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  double lambda_value = 0.0;
  int sign = 1;  // sign of F(2) that was selected
  double other_lambda = 0.0;  // value for the other sign
};

/// Householder QR of [mu 1], signs normalised so diag(R) >= 0 and det(P) = +1.
/// Throws ConstraintDegeneracyError if mu is (numerically) proportional to the ones vector.
ConstraintBasis qr_constraint_basis(const Eigen::Vector3d& mu, double k);

/// Basis from given factors (used for fixtures and tests); no orthogonality check.
ConstraintBasis make_basis(const Eigen::Matrix3d& P, const Eigen::Matrix2d& R,
                           const Eigen::Vector3d& mu, double k);

/// q = R^{-T} b, rmag = sqrt(1 - |q|^2); both signs of F(2) are tried and the one with the
/// larger w' Omega w is returned. Throws InfeasibleTargetError if |q| > 1.
FeasibleWeights feasible_weights(const ConstraintBasis& basis, const Eigen::Matrix3d& omega);

/// w' Omega w for the given F and P.
double quadratic_value(const Eigen::Matrix3d& P, const Eigen::Vector3d& F,
                       const Eigen::Matrix3d& omega);

/// Range of k for which |q| <= 1, given R.
std::pair<double, double> attainable_targets(const Eigen::Matrix2d& R);

}  // namespace bnsswap
