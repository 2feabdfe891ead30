#include "bnsswap/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "bnsswap/errors.hpp"

namespace bnsswap::market {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_missing(const std::string& f) {
  const auto l = lower(f);
  return l.empty() || l == "na" || l == "nan" || l == "null";
}

bool valid_iso_date(const std::string& d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
  }
  const int month = std::stoi(d.substr(5, 2));
  const int day = std::stoi(d.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

std::vector<double> squares(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * x[i];
  return out;
}

// r such that the stationary corr(sigma_1^2, sigma_j^2) equals rho, given q = kappa_own_2 / kappa^1_2
double invert_vol_correlation(double rho, const levy::SubordinatorSpec& z1,
                              const levy::SubordinatorSpec& own) {
  rho = std::clamp(rho, 0.0, 1.0);
  const double k1 = levy::cumulant(z1, 2);
  const double ko = levy::cumulant(own, 2);
  if (!(k1 > 0.0) || !(ko > 0.0)) return rho;
  const double q = ko / k1;
  const double r2 = rho * rho * q / (1.0 - rho * rho + rho * rho * q);
  return std::clamp(std::sqrt(r2), 0.0, 1.0);
}

}  // namespace

ReturnSeries ReturnSeries::from_prices(std::string asset_id, std::vector<std::string> dates,
                                       std::vector<double> prices) {
  if (dates.size() != prices.size()) throw InputError("dates and prices differ in length");
  ReturnSeries s{std::move(asset_id), std::move(dates), std::move(prices), {}};
  for (double p : s.prices) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InputError("prices must be positive");
  }
  if (s.prices.size() >= 2) {
    s.returns.resize(s.prices.size() - 1);
    for (std::size_t t = 0; t + 1 < s.prices.size(); ++t) s.returns[t] = s.prices[t + 1] / s.prices[t] - 1.0;
  }
  return s;
}

std::array<ReturnSeries, 3> parse_prices(const std::string& csv_text, const std::string& source) {
  std::istringstream is(csv_text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split(line);
    break;
  }
  if (header.size() != 4 || lower(header[0]) != "date") {
    throw InputError(source + ": expected header date,asset1,asset2,asset3");
  }
  std::map<std::string, std::array<double, 3>> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (f.size() != 4) throw InputError(where + ": expected 4 fields, got " + std::to_string(f.size()));
    if (!valid_iso_date(f[0])) throw InputError(where + ": invalid ISO date '" + f[0] + "'");
    if (std::any_of(f.begin() + 1, f.end(), is_missing)) continue;
    std::array<double, 3> prices{};
    for (int a = 0; a < 3; ++a) {
      const auto& s = f[a + 1];
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError(where + ": cannot parse price '" + s + "'");
      }
      if (!(v > 0.0) || !std::isfinite(v)) throw InputError(where + ": nonpositive price " + s);
      prices[a] = v;
    }
    if (!rows.emplace(f[0], prices).second) throw InputError(where + ": duplicate date " + f[0]);
  }
  if (rows.size() < 2) throw InputError(source + ": fewer than two usable rows");

  std::vector<std::string> dates;
  std::array<std::vector<double>, 3> prices;
  for (const auto& [date, p] : rows) {
    dates.push_back(date);
    for (int a = 0; a < 3; ++a) prices[a].push_back(p[a]);
  }
  std::array<ReturnSeries, 3> out;
  for (int a = 0; a < 3; ++a) out[a] = ReturnSeries::from_prices(header[a + 1], dates, std::move(prices[a]));
  return out;
}

std::array<ReturnSeries, 3> load_prices(const std::string& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw InputError("cannot open price file '" + csv_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_prices(ss.str(), csv_path);
}

DescriptiveStats descriptive_stats(const std::vector<double>& values) {
  if (values.size() < 2) throw ArgumentError("descriptive statistics need at least two values");
  DescriptiveStats s;
  s.n = values.size();
  s.mean = mean_of(values);
  s.std_dev = std::sqrt(variance_of(values));
  const double rn = std::sqrt(static_cast<double>(s.n));
  s.std_error = s.std_dev / rn;
  s.ci95_half_width = 1.96 * s.std_dev / rn;
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.range = s.max - s.min;
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

DescriptiveStats descriptive_stats(const ReturnSeries& series) { return descriptive_stats(series.returns); }

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw EstimationError("correlation needs two equal-length series");
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw EstimationError("correlation undefined for a zero-variance series");
  return sab / std::sqrt(saa * sbb);
}

double autocorrelation_lag1(const std::vector<double>& x) {
  if (x.size() < 3) throw EstimationError("autocorrelation needs at least three observations");
  const double m = mean_of(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - m) * (x[i] - m);
    if (i + 1 < x.size()) num += (x[i] - m) * (x[i + 1] - m);
  }
  if (!(den > 0.0)) throw EstimationError("autocorrelation undefined for a zero-variance series");
  return num / den;
}

ModelParams estimate_params(const std::array<ReturnSeries, 3>& series, const Overrides& ov) {
  const std::size_t n = series[0].returns.size();
  for (const auto& s : series) {
    if (s.returns.size() != n) throw EstimationError("return series are not aligned");
  }
  if (n < 2) throw EstimationError("at least two returns are needed");

  ModelParams p;
  p.triple.z1 = ov.z1.value_or(levy::SubordinatorSpec::gamma(1.0, 1.0));
  p.triple.z_star = ov.z_star.value_or(levy::SubordinatorSpec::gamma(1.0, 1.0));
  p.triple.z_star_star = ov.z_star_star.value_or(levy::SubordinatorSpec::gamma(1.0, 1.0));

  for (int i = 0; i < 3; ++i) {
    const auto& r = series[i].returns;
    const auto& o = ov.assets[i];
    p.assets[i].mu = o.mu ? *o.mu : mean_of(r);
    p.assets[i].sigma0sq = o.sigma0sq ? *o.sigma0sq : variance_of(r);
    p.assets[i].rho = o.rho.value_or(0.0);
  }

  auto est_corr = [&](const std::optional<double>& o, int i, int j) {
    if (o) return *o;
    try {
      return correlation(series[i].returns, series[j].returns);
    } catch (const EstimationError& e) {
      throw EstimationError("gamma_" + std::to_string(i + 1) + std::to_string(j + 1) + ": " + e.what());
    }
  };
  const double g12 = est_corr(ov.g12, 0, 1);
  const double g23 = est_corr(ov.g23, 1, 2);
  const double g31 = est_corr(ov.g31, 2, 0);
  p.gamma << 1.0, g12, g31, g12, 1.0, g23, g31, g23, 1.0;

  auto est_r = [&](const std::optional<double>& o, int j, const levy::SubordinatorSpec& own) {
    if (o) return *o;
    try {
      const double rho = correlation(squares(series[0].returns), squares(series[j].returns));
      return invert_vol_correlation(rho, p.triple.z1, own);
    } catch (const EstimationError& e) {
      throw EstimationError("r" + std::to_string(j + 1) + ": " + e.what());
    }
  };
  p.triple.r2 = est_r(ov.r2, 1, p.triple.z_star);
  p.triple.r3 = est_r(ov.r3, 2, p.triple.z_star_star);

  if (ov.lambda) {
    p.lambda = *ov.lambda;
  } else {
    double acf = 0.0;
    for (int i = 0; i < 3; ++i) {
      try {
        acf += autocorrelation_lag1(squares(series[i].returns));
      } catch (const EstimationError& e) {
        throw EstimationError(std::string("lambda: ") + e.what());
      }
    }
    acf = std::clamp(acf / 3.0, 1e-4, 0.9999);
    p.lambda = -std::log(acf);
  }
  p.r = ov.r.value_or(0.0);
  p.T = ov.T.value_or(252.0);
  if (ov.beta) p.beta = *ov.beta;
  p.kmax = ov.kmax.value_or(8);
  p.validate();
  return p;
}

}  // namespace bnsswap::market
