#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bnsswap/covariance.hpp"
#include "bnsswap/model.hpp"
#include "bnsswap/pricing.hpp"

namespace bnsswap::mc {

/// What simulate() keeps per path.
enum class Record {
  summary,   // realized covariation only
  terminal,  // plus sigma^2(T) and X(T)
  full       // plus trajectories on the grid and subordinator increments
};

struct SimulationConfig {
  std::int64_t n_paths = 100000;
  int n_steps = 2520;
  std::uint64_t seed = 20240601;
  bool antithetic = false;  // pairs of paths share jumps and use negated Gaussian shocks
  int threads = 0;          // 0: hardware concurrency
  Record record = Record::summary;

  void validate() const;
};

struct PathRecord {
  Eigen::Matrix3d realized = Eigen::Matrix3d::Zero();  // (1/T) [X^i, X^j]_T
  std::array<double, 3> sigma2_T{};
  std::array<double, 3> x_T{};
  std::vector<std::array<double, 3>> sigma2;  // grid values, full record only
  std::vector<std::array<double, 3>> x;
  std::vector<std::array<double, 3>> dz;      // increments of Z^1, Z*, Z** per step
};

struct PathBundle {
  std::vector<double> times;  // grid, full record only
  std::vector<PathRecord> paths;
};

/// Per-entry mean and standard error of (1/T) [X^i, X^j]_T.
struct Summary {
  Eigen::Matrix3d mean = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d stderr = Eigen::Matrix3d::Zero();
  std::int64_t n_samples = 0;  // independent samples (pairs count once in antithetic mode)
};

/// Seed of the random stream for one path (or antithetic pair).
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// Simulates the three-asset system on a uniform grid over [0, T]. Each step draws
/// increments of Z^1, Z*, Z** over lambda*dt. Each increment either lands as one jump at a
/// uniform time inside the step or enters at a constant rate over the step; the lump
/// probability kappa2 / (kappa2 + kappa1^2 lambda dt) matches the within-step spread of the
/// subordinator. Variances are integrated exactly between events.
PathBundle simulate(const ModelParams& params, const SimulationConfig& config);

/// Streaming version of simulate() that keeps only the summary statistics.
Summary summarize(const ModelParams& params, const SimulationConfig& config);

ExpectedCovMatrix mc_expected_cov(const ModelParams& params, const SimulationConfig& config);

/// Monte Carlo swap price. Max-eigenvalue weights come from the Monte Carlo mean matrix and are
/// then held fixed, so the payoff per path is w' Omega_path w.
PricingResult mc_price(const ModelParams& params, const SwapContract& contract,
                       const SimulationConfig& config);

/// Coupled step-halving study: each path is simulated on n_steps and on 2 n_steps with shared
/// randomness, so the difference isolates discretisation bias.
struct GridBias {
  Eigen::Matrix3d coarse = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d fine = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d fine_stderr = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d difference = Eigen::Matrix3d::Zero();  // fine - coarse
  Eigen::Matrix3d difference_stderr = Eigen::Matrix3d::Zero();
  std::int64_t n_samples = 0;
};

GridBias grid_bias(const ModelParams& params, const SimulationConfig& config);

}  // namespace bnsswap::mc
