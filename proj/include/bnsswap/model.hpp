#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnsswap/levy.hpp"

namespace bnsswap {

struct AssetParams {
  double mu = 0.0;        // expected return per day
  double sigma0sq = 0.0;  // initial variance
  double rho = 0.0;       // leverage on Z^1 jumps

  bool operator==(const AssetParams&) const = default;
};

/// How the series route picks the normalising constant beta^4 of sigma_i^2 sigma_j^2.
enum class BetaMode {
  adaptive,  // beta_t^4 = E[sigma_i^2 sigma_j^2] at each t
  fixed      // constant beta_ij, read as an upper bound for the variances
};

struct BetaBounds {
  BetaMode mode = BetaMode::adaptive;
  // beta_ij (not squared) for the pairs (1,2), (2,3), (3,1); used in fixed mode.
  double b12 = 0.0;
  double b23 = 0.0;
  double b31 = 0.0;

  bool operator==(const BetaBounds&) const = default;
};

/// Three-asset BNS parameter set. Time unit is the trading day; asset indices are 0-based.
struct ModelParams {
  std::array<AssetParams, 3> assets{};
  double lambda = 0.0;
  Eigen::Matrix3d gamma = Eigen::Matrix3d::Identity();
  levy::CorrelatedTriple triple;
  double r = 0.0;
  double T = 252.0;
  BetaBounds beta;
  int kmax = 8;

  /// Throws ParameterError on invalid values; returns non-fatal warnings.
  std::vector<std::string> validate() const;

  /// beta_ij for the pair in fixed mode.
  double beta_for(int i, int j) const;

  /// Default fixed bound: beta^2 = max(sigma_i0^2, sigma_j0^2) + 10 kappa^1_2 / (2 lambda).
  double default_beta(int i, int j) const;

  bool operator==(const ModelParams& o) const;
};

/// Convenience: all pairs (i < j) in the order (0,1), (1,2), (0,2).
inline constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {1, 2}, {0, 2}}};

}  // namespace bnsswap
