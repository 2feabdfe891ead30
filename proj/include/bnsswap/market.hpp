#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnsswap/levy.hpp"
#include "bnsswap/model.hpp"

namespace bnsswap::market {

struct ReturnSeries {
  std::string asset_id;
  std::vector<std::string> dates;  // ISO, ascending
  std::vector<double> prices;
  std::vector<double> returns;  // prices[t+1] / prices[t] - 1

  static ReturnSeries from_prices(std::string asset_id, std::vector<std::string> dates,
                                  std::vector<double> prices);
};

struct DescriptiveStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double ci95_half_width = 0.0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
  double median = 0.0;
  double std_dev = 0.0;
};

/// Reads a CSV with header date,asset1,asset2,asset3. Rows with an empty or NA field are
/// dropped; dates are sorted ascending. Throws InputError on unreadable files, malformed rows,
/// nonpositive prices, duplicate dates or fewer than two usable rows.
std::array<ReturnSeries, 3> load_prices(const std::string& csv_path);

/// Same, from CSV text.
std::array<ReturnSeries, 3> parse_prices(const std::string& csv_text, const std::string& source = "<input>");

/// Unbiased sample statistics of the return series; ci95HalfWidth = 1.96 sd / sqrt(n).
DescriptiveStats descriptive_stats(const ReturnSeries& series);
DescriptiveStats descriptive_stats(const std::vector<double>& values);

/// Every field is optional; a present field replaces the estimate.
struct AssetOverrides {
  std::optional<double> mu;
  std::optional<double> sigma0sq;
  std::optional<double> rho;
};

struct Overrides {
  std::array<AssetOverrides, 3> assets{};
  std::optional<double> lambda;
  std::optional<double> g12, g23, g31;
  std::optional<double> r2, r3;
  std::optional<levy::SubordinatorSpec> z1, z_star, z_star_star;
  std::optional<double> r;
  std::optional<double> T;
  std::optional<BetaBounds> beta;
  std::optional<int> kmax;
};

/// Moment estimators:
///   mu_i = mean return, sigma_i0^2 = sample variance, gamma_ij = return correlation,
///   r2, r3 from the correlation of squared returns inverted through the stationary
///   squared-volatility correlation (clamped to [0, 1]),
///   lambda = -log(acf_1) of squared returns averaged over assets (acf clamped to [1e-4, 0.9999]).
/// rho, r and the subordinators default to 0, 0 and Gamma(1, 1).
ModelParams estimate_params(const std::array<ReturnSeries, 3>& series, const Overrides& overrides = {});

/// Sample Pearson correlation; throws EstimationError if either input has zero variance.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Lag-1 sample autocorrelation; throws EstimationError for zero variance.
double autocorrelation_lag1(const std::vector<double>& x);

}  // namespace bnsswap::market
