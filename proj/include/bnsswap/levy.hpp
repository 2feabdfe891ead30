#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

namespace bnsswap {

// Per-path random stream used throughout the Monte Carlo code.
using RandomStream = std::mt19937_64;

namespace levy {

// Highest cumulant/moment order supported by the closed forms below.
inline constexpr int kMaxOrder = 40;

enum class Family { gamma, inverse_gaussian, zero };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Unit-time law of a Levy subordinator.
///
/// Gamma(a, b): shape a, rate b, so Z_1 has mean a/b and CGF a*log(b/(b-theta)).
/// InverseGaussian(a, b): a = delta, b = gamma in the IG(delta, gamma) convention,
///   CGF delta*(gamma - sqrt(gamma^2 - 2 theta)); Z_1 has mean a/b and variance a/b^3.
///   Over time dt the increment is IG with mean a*dt/b and shape (a*dt)^2.
/// Zero: the identically zero process.
class SubordinatorSpec {
 public:
  SubordinatorSpec() = default;  // Zero

  static SubordinatorSpec gamma(double shape, double rate);
  static SubordinatorSpec inverse_gaussian(double delta, double gamma);
  static SubordinatorSpec zero();

  Family family() const noexcept { return family_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  /// Law of s * Z for s > 0 (Gamma rate b / s; IG (a sqrt(s), b / sqrt(s))).
  SubordinatorSpec scaled(double s) const;

  bool operator==(const SubordinatorSpec&) const = default;

 private:
  SubordinatorSpec(Family f, double a, double b);

  Family family_ = Family::zero;
  double a_ = 0.0;
  double b_ = 0.0;
};

/// n-th cumulant of Z_1, 1 <= n <= kMaxOrder.
double cumulant(const SubordinatorSpec& spec, int n);

/// Cumulants kappa_1..kappa_n (index 0 holds kappa_1).
std::vector<double> cumulants(const SubordinatorSpec& spec, int n);

/// log E[exp(theta Z_1)]. Throws DomainError past the pole.
double cgf(const SubordinatorSpec& spec, double theta);

/// Supremum of the CGF domain (+inf for Zero). Gamma excludes the bound, IG includes it.
double cgf_domain_bound(const SubordinatorSpec& spec);

/// Draw of Z_dt.
double sample_increment(const SubordinatorSpec& spec, double dt, RandomStream& rng);

/// E[sum of squared jumps over an interval of length dt | increment over that interval].
/// Gamma uses the exact conditional expectation; IG returns an unbiased estimate.
double jump_square_sum(const SubordinatorSpec& spec, double increment, double dt);

/// Z^1 drives all three variances; Z^2 = r2 Z^1 + sqrt(1-r2^2) Z*, Z^3 = r3 Z^1 + sqrt(1-r3^2) Z**.
struct CorrelatedTriple {
  double r2 = 0.0;
  double r3 = 0.0;
  SubordinatorSpec z1;
  SubordinatorSpec z_star;
  SubordinatorSpec z_star_star;

  void validate() const;

  /// Loading of asset i's driver on Z^1 (1, r2, r3).
  double loading(int asset) const;
  /// Loading of asset i's driver on its own independent component (0, s2, s3).
  double own_loading(int asset) const;
  /// Own independent component of asset i (Zero for asset 0).
  const SubordinatorSpec& own_component(int asset) const;

  /// n-th cumulant of asset i's driver (asset in 0..2).
  double derived_cumulant(int asset, int n) const;
  std::vector<double> derived_cumulants(int asset, int n) const;

  bool operator==(const CorrelatedTriple&) const = default;
};

struct IncrementPair {
  double dz2;
  double dz3;
};

IncrementPair correlated_increments(const CorrelatedTriple& triple, double dz1, double dz_star,
                                    double dz_star_star);

struct VolCorrelations {
  double rho12;
  double rho13;
  double rho23;
};

/// Correlations of the squared-volatility processes, constant in time.
VolCorrelations stationary_vol_correlations(const CorrelatedTriple& triple);

}  // namespace levy
}  // namespace bnsswap

namespace bnsswap::levy {

/// Repeated draws of Z_dt for a fixed (spec, dt); caches distribution parameters.
class IncrementSampler {
 public:
  IncrementSampler(const SubordinatorSpec& spec, double dt);
  double operator()(RandomStream& rng);

 private:
  Family family_;
  std::gamma_distribution<double> gamma_;
  double ig_mean_ = 0.0;
  double ig_shape_ = 0.0;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace bnsswap::levy
