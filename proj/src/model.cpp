#include "bnsswap/model.hpp"

#include <cmath>
#include <sstream>

#include "bnsswap/errors.hpp"

namespace bnsswap {

namespace {
void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}
}  // namespace

std::vector<std::string> ModelParams::validate() const {
  std::vector<std::string> warnings;
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  require(std::isfinite(T) && T > 0.0, "horizon T must be positive");
  require(std::isfinite(r), "rate r must be finite");
  require(kmax >= 1 && kmax <= levy::kMaxOrder / 2, "kmax must lie in 1..20");
  for (int i = 0; i < 3; ++i) {
    const auto& a = assets[i];
    require(std::isfinite(a.mu), "asset mu must be finite");
    require(std::isfinite(a.sigma0sq) && a.sigma0sq >= 0.0, "sigma0sq must be nonnegative");
    require(std::isfinite(a.rho), "rho must be finite");
    if (a.rho > 0.0) {
      warnings.push_back("asset " + std::to_string(i + 1) +
                         " has positive leverage rho; accepted as given");
    }
  }
  require(gamma.allFinite(), "gamma must be finite");
  for (int i = 0; i < 3; ++i) {
    require(std::abs(gamma(i, i) - 1.0) < 1e-12, "gamma must have unit diagonal");
    for (int j = 0; j < i; ++j) {
      require(std::abs(gamma(i, j) - gamma(j, i)) < 1e-12, "gamma must be symmetric");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gamma);
  require(eig.eigenvalues().minCoeff() >= -1e-10, "gamma must be positive semidefinite");
  try {
    triple.validate();
  } catch (const ArgumentError& e) {
    throw ParameterError(e.what());
  }
  if (beta.mode == BetaMode::fixed) {
    for (const auto& p : kPairs) {
      const double b = beta_for(p[0], p[1]);
      require(std::isfinite(b) && b > 0.0, "beta bounds must be positive");
      require(b * b >= std::max(assets[p[0]].sigma0sq, assets[p[1]].sigma0sq),
              "beta_ij^2 must be at least max(sigma_i0^2, sigma_j0^2)");
    }
  }
  return warnings;
}

double ModelParams::beta_for(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == 0 && j == 1) return beta.b12;
  if (i == 1 && j == 2) return beta.b23;
  if (i == 0 && j == 2) return beta.b31;
  throw ArgumentError("beta is defined for distinct asset pairs only");
}

double ModelParams::default_beta(int i, int j) const {
  const double k2 = levy::cumulant(triple.z1, 2);
  const double b2 =
      std::max(assets[i].sigma0sq, assets[j].sigma0sq) + 10.0 * k2 / (2.0 * lambda);
  return std::sqrt(b2);
}

bool ModelParams::operator==(const ModelParams& o) const {
  return assets == o.assets && lambda == o.lambda && gamma == o.gamma && triple == o.triple &&
         r == o.r && T == o.T && beta == o.beta && kmax == o.kmax;
}

}  // namespace bnsswap
