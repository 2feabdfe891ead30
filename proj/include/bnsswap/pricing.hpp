#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnsswap/covariance.hpp"
#include "bnsswap/optimize.hpp"

namespace bnsswap {

enum class SwapKind { trace, max_eigenvalue };

std::string to_string(SwapKind k);
SwapKind swap_kind_from_string(const std::string& name);

struct SwapContract {
  SwapKind kind = SwapKind::trace;
  double strike = 0.0;         // variance units
  double T = 252.0;            // days
  double rate = 0.0;           // per day
  double target_return = 0.0;  // k, max-eigenvalue swaps only

  void validate() const;
  double discount() const;
};

/// Externally supplied basis for reproduction mode: w = P F, taken verbatim.
struct ReproductionBasis {
  Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
  Eigen::Vector3d F = Eigen::Vector3d::Zero();
};

struct PricingResult {
  double price = 0.0;
  double expected_metric = 0.0;  // E[tr Omega] or lambda(E[Omega])
  double discount = 1.0;
  std::string method;
  double stderr = kNotApplicable;  // price standard error for Monte Carlo
  std::optional<ConstraintBasis> basis;
  std::optional<FeasibleWeights> weights;
  std::optional<Eigen::Vector3d> reproduction_weights;
  std::vector<std::string> notes;
};

/// e^{-rT} (tr Omega - K).
PricingResult price_trace(const ExpectedCovMatrix& cov, const SwapContract& contract);

/// e^{-rT} (lambda - K) with lambda = w' Omega w at the feasible weights maximising it.
PricingResult price_eigenvalue(const ExpectedCovMatrix& cov, const Eigen::Vector3d& mu,
                               const SwapContract& contract);

/// Reproduction mode: lambda = (P F)' Omega (P F) with P, F taken as given.
PricingResult price_eigenvalue_reproduction(const ExpectedCovMatrix& cov,
                                            const ReproductionBasis& basis,
                                            const SwapContract& contract);

}  // namespace bnsswap
