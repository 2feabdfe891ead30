#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnsswap/model.hpp"
#include "bnsswap/moments.hpp"

namespace bnsswap {

enum class Method { series, approx, mc, fixture };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// Jump contribution to the variance legs.
///   consistent:  rho_i^2 lambda kappa^1_2, the same expectation as the off-diagonal term.
///   per_horizon: rho_i^2 lambda kappa^1_2 / T.
enum class JumpTermConvention { consistent, per_horizon };

/// How E[(sigma_i^2 sigma_j^2)^p] is built for the series route.
///   positive: expansion into independent nonnegative parts; no cancellation, any r2, r3.
///   n_terms:  the N-term decomposition (products of shifted moments); needs r2 > 0, r3 < 1.
enum class SeriesForm { positive, n_terms };

/// Where the series route stops.
///   fixed:         always sums k = 0..kmax.
///   smallest_term: sums up to kmax but stops before the first term whose magnitude exceeds its
///                  predecessor (k >= 3), the usual truncation for an asymptotic series.
/// expected_cov_series applies the rule to the time-integrated terms.
enum class SeriesTruncation { fixed, smallest_term };

struct CovarianceOptions {
  double rel_tol = 1e-10;  // quadrature tolerance relative to T times the integrand scale
  JumpTermConvention jump = JumpTermConvention::consistent;
  SeriesForm form = SeriesForm::positive;
  SeriesTruncation truncation = SeriesTruncation::smallest_term;
  moments::ShiftNormalization shift = moments::ShiftNormalization::derived;
  double tail_warning = 1e-6;  // series tail relative to the entry that triggers a warning
};

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

struct EntryDiagnostics {
  double quadrature_error = kNotApplicable;
  double series_tail = kNotApplicable;  // bound on the truncated series' contribution
  double series_tail_t0 = kNotApplicable;  // |last term| / |sum| of the integrand at t = 0
  int series_order = -1;  // last retained series order, -1 if not a series entry
  double stderr = kNotApplicable;
};

struct EntryResult {
  double value = 0.0;
  EntryDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

/// Expected covariance matrix of log-returns per unit time.
struct ExpectedCovMatrix {
  Eigen::Matrix3d entries = Eigen::Matrix3d::Zero();
  Method method = Method::series;
  std::array<std::array<EntryDiagnostics, 3>, 3> diagnostics{};
  std::vector<std::string> warnings;
};

/// (1/T) int_0^T E[sigma_i^2(t)] dt plus the jump term; the time average is in closed form.
EntryResult expected_var_leg(int i, const ModelParams& params, const CovarianceOptions& options = {});

/// gamma_ij/T int_0^T E[sigma_i sigma_j](t) dt + rho_i rho_j lambda kappa^1_2 with
/// E[sigma_i sigma_j] from the truncated binomial series of sqrt(1 + x).
EntryResult expected_cov_series(int i, int j, const ModelParams& params,
                                const CovarianceOptions& options = {});

/// Same with E[sigma_i sigma_j] ~ sqrt(m) - v / (8 m^{3/2}), m = E[sigma_i^2 sigma_j^2],
/// v = Var[sigma_i^2 sigma_j^2].
EntryResult expected_cov_approx(int i, int j, const ModelParams& params,
                                const CovarianceOptions& options = {});

/// Diagonal from expected_var_leg, off-diagonals from the requested analytic route.
ExpectedCovMatrix expected_cov_matrix(const ModelParams& params, Method method,
                                      const CovarianceOptions& options = {});

/// Series coefficients C(1/2, k), k = 0..n, via c_k = c_{k-1} (3/2 - k) / k.
std::vector<double> sqrt_series_coefficients(int n);

/// Moments E[(sigma_i^2 sigma_j^2)^p], p = 0..max_power, by the selected form.
std::vector<double> product_power_moments(const ModelParams& params, int i, int j, double t,
                                          int max_power, const CovarianceOptions& options = {});

struct SeriesValue {
  double value = 0.0;  // approximation of E[sigma_i(t) sigma_j(t)]
  double tail = 0.0;   // |last retained term|
  int last_order = 0;  // order of the last retained term
};

/// Terms beta^2 c_k E[x^k], k = 0..kmax, of the series for E[sigma_i sigma_j](t),
/// with x = sigma_i^2 sigma_j^2 / beta^4 - 1.
Eigen::VectorXd series_terms(int i, int j, double t, const ModelParams& params,
                             const CovarianceOptions& options = {});

/// Sums terms according to the truncation rule.
SeriesValue truncate_series(const Eigen::VectorXd& terms, SeriesTruncation truncation);

/// Series integrand E[sigma_i sigma_j](t) at a single time.
SeriesValue series_integrand(int i, int j, double t, const ModelParams& params,
                             const CovarianceOptions& options = {});

struct ProductStats {
  double mean = 0.0;      // E[sigma_i^2 sigma_j^2]
  double variance = 0.0;  // Var[sigma_i^2 sigma_j^2]
};

/// Mean and variance of sigma_i^2 sigma_j^2 at time t from moments, variances and covariances of
/// the driver integral and the independent own components.
ProductStats product_stats(int i, int j, double t, const ModelParams& params);

/// sqrt(m) - v / (8 m^{3/2}) at a single time.
double approx_integrand(int i, int j, double t, const ModelParams& params);

}  // namespace bnsswap
