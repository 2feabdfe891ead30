#pragma once

#include <functional>

#include <Eigen/Dense>

namespace bnsswap {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Adaptive composite Simpson on [a, b]. Panels are bisected until the local error
/// estimate |S2 - S1| / 15 is below the panel's share of tol (or at rounding level).
/// Throws NumericalError, carrying the best value, if max_depth is exceeded; also throws
/// once max_evaluations integrand calls have been spent.
QuadratureResult quadrature(const std::function<double(double)>& f, double a, double b, double tol,
                            int max_depth = 50, long max_evaluations = 2000000);

struct VectorQuadratureResult {
  Eigen::VectorXd value;
  Eigen::VectorXd error_estimate;
  long evaluations = 0;
};

/// Same for a vector-valued integrand; a panel is accepted when the summed absolute
/// component errors meet the tolerance.
VectorQuadratureResult quadrature_vector(const std::function<Eigen::VectorXd(double)>& f, double a,
                                         double b, double tol, int max_depth = 50,
                                         long max_evaluations = 2000000);

}  // namespace bnsswap
