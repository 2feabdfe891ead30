#include "bnsswap/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnsswap/errors.hpp"
#include "bnsswap/quadrature.hpp"

namespace bnsswap {

namespace {

void check_pair(int i, int j) {
  if (i < 0 || j < 0 || i > 2 || j > 2 || i == j) {
    throw ArgumentError("covariance pair needs two distinct asset indices in 0..2");
  }
}

double jump_term(int i, int j, const ModelParams& params) {
  return params.assets[i].rho * params.assets[j].rho * params.lambda *
         levy::cumulant(params.triple.z1, 2);
}

// (1/T) int_0^T f, with a tolerance scaled to the size of f
QuadratureResult average(const std::function<double(double)>& f, const ModelParams& params,
                         double rel_tol) {
  const double T = params.T;
  const double scale = std::max({std::abs(f(0.0)), std::abs(f(0.5 * T)), std::abs(f(T)),
                                 std::numeric_limits<double>::min()});
  auto q = quadrature(f, 0.0, T, rel_tol * T * scale);
  q.value /= T;
  q.error_estimate /= T;
  return q;
}

// The variances are linear in (sigma_0^2, Z), so scaling both by s scales sigma_i^2 sigma_j^2 by
// s^2. Product moments are formed at the scale where E[sigma_i^2] E[sigma_j^2] is about 1, which
// keeps high powers away from underflow once the initial variance has decayed.
struct Rescaled {
  ModelParams params;
  double s = 1.0;
};

Rescaled rescaled_for_pair(const ModelParams& params, int i, int j, double t) {
  const double mi = moments::variance_moments(params, i, t, 1)[1];
  const double mj = moments::variance_moments(params, j, t, 1)[1];
  Rescaled out{params, 1.0};
  if (!(mi > 0.0) || !(mj > 0.0)) return out;
  const double s = 1.0 / std::sqrt(mi * mj);
  if (!std::isfinite(s)) return out;
  out.s = s;
  for (auto& a : out.params.assets) a.sigma0sq *= s;
  auto& tr = out.params.triple;
  tr.z1 = tr.z1.scaled(s);
  tr.z_star = tr.z_star.scaled(s);
  tr.z_star_star = tr.z_star_star.scaled(s);
  const double rs = std::sqrt(s);
  out.params.beta.b12 *= rs;
  out.params.beta.b23 *= rs;
  out.params.beta.b31 *= rs;
  return out;
}

std::string pair_name(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

std::vector<double> n_term_moments(const ModelParams& params, int i, int j, double t, int P,
                                   moments::ShiftNormalization shift) {
  using moments::binomial;
  using moments::Scaling;
  if (i > j) std::swap(i, j);
  std::vector<double> out(P + 1, 0.0);
  out[0] = 1.0;
  const auto& tr = params.triple;
  if (i == 0) {
    const double rj = tr.loading(j);
    const double sj = tr.own_loading(j);
    for (int p = 1; p <= P; ++p) {
      double s = 0.0;
      for (int u = 0; u <= p; ++u) {
        s += binomial(p, u) * std::pow(rj, u) * std::pow(sj, p - u) *
             moments::n_term_pair(p, u, t, params, 0, j, shift, Scaling::decayed);
      }
      out[p] = s;
    }
    return out;
  }
  // pair (2,3): sum over the binomial indices of both factors
  const double r2 = tr.r2;
  const double r3 = tr.r3;
  const double s2 = tr.own_loading(1);
  const double s3 = tr.own_loading(2);
  if (!(r2 > 0.0)) throw SingularConfigurationError("N-term series for pair (2,3) needs r2 > 0");
  for (int p = 1; p <= P; ++p) {
    double s = 0.0;
    for (int a = 0; a <= p; ++a) {
      for (int b = 0; b <= p; ++b) {
        const int w = std::max(0, a - b);
        const int u = b + w;
        const int v = a - w;
        s += binomial(p, a) * binomial(p, b) * std::pow(r3 / r2, b) * std::pow(s2, p - a) *
             std::pow(s3, p - b) * moments::n_term_23(p, u, v, w, t, params, Scaling::decayed);
      }
    }
    out[p] = s;
  }
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::series:
      return "series";
    case Method::approx:
      return "approx";
    case Method::mc:
      return "mc";
    case Method::fixture:
      return "fixture";
  }
  return "series";
}

Method method_from_string(const std::string& name) {
  if (name == "series") return Method::series;
  if (name == "approx") return Method::approx;
  if (name == "mc") return Method::mc;
  if (name == "fixture") return Method::fixture;
  throw ArgumentError("unknown method '" + name + "'");
}

std::vector<double> sqrt_series_coefficients(int n) {
  if (n < 0) throw ArgumentError("series order must be nonnegative");
  std::vector<double> c(n + 1);
  c[0] = 1.0;
  for (int k = 1; k <= n; ++k) c[k] = c[k - 1] * (1.5 - k) / k;
  return c;
}

std::vector<double> product_power_moments(const ModelParams& params, int i, int j, double t,
                                          int max_power, const CovarianceOptions& options) {
  check_pair(i, j);
  if (options.form == SeriesForm::positive) return moments::product_moments(params, i, j, t, max_power);
  return n_term_moments(params, i, j, t, max_power, options.shift);
}

Eigen::VectorXd series_terms(int i, int j, double t, const ModelParams& params,
                             const CovarianceOptions& options) {
  const int K = params.kmax;
  Eigen::VectorXd terms = Eigen::VectorXd::Zero(K + 1);
  check_pair(i, j);
  const auto [sp, s] = rescaled_for_pair(params, i, j, t);
  const auto M = product_power_moments(sp, i, j, t, K, options);
  double beta4;
  if (params.beta.mode == BetaMode::adaptive) {
    beta4 = M[1];
  } else {
    const double b = sp.beta_for(i, j);
    beta4 = b * b * b * b;
  }
  if (!(beta4 > 0.0)) return terms;
  // moments of x = P / beta^4 - 1
  std::vector<double> scaled(K + 1);
  for (int p = 0; p <= K; ++p) scaled[p] = M[p] / std::pow(beta4, p);
  const auto c = sqrt_series_coefficients(K);
  const double beta2 = std::sqrt(beta4);
  for (int k = 0; k <= K; ++k) {
    double mu = 0.0;
    for (int p = 0; p <= k; ++p) {
      const double sign = (k - p) % 2 == 0 ? 1.0 : -1.0;
      mu += moments::binomial(k, p) * sign * scaled[p];
    }
    terms(k) = beta2 * c[k] * mu;
  }
  return terms / s;
}

SeriesValue truncate_series(const Eigen::VectorXd& terms, SeriesTruncation truncation) {
  SeriesValue out;
  double last = 0.0;
  int used = 0;
  for (int k = 0; k < terms.size(); ++k) {
    // asymptotic regime: terms started growing, stop at the smallest one
    if (truncation == SeriesTruncation::smallest_term && k >= 3 &&
        std::abs(terms(k)) > std::abs(last)) {
      break;
    }
    last = terms(k);
    out.value += last;
    used = k;
  }
  out.tail = std::abs(last);
  out.last_order = used;
  return out;
}

SeriesValue series_integrand(int i, int j, double t, const ModelParams& params,
                             const CovarianceOptions& options) {
  return truncate_series(series_terms(i, j, t, params, options), options.truncation);
}

ProductStats product_stats(int i, int j, double t, const ModelParams& params) {
  check_pair(i, j);
  const auto& tr = params.triple;
  const double decay = std::exp(-params.lambda * t);
  const auto y = moments::ExpIntegralMoments(tr.z1, params.lambda, t, 4, moments::Scaling::decayed);
  const auto oi =
      moments::ExpIntegralMoments(tr.own_component(i), params.lambda, t, 2, moments::Scaling::decayed);
  const auto oj =
      moments::ExpIntegralMoments(tr.own_component(j), params.lambda, t, 2, moments::Scaling::decayed);

  const double ai = decay * params.assets[i].sigma0sq;
  const double aj = decay * params.assets[j].sigma0sq;
  const double ri = tr.loading(i), rj = tr.loading(j);
  const double si = tr.own_loading(i), sj = tr.own_loading(j);

  // sigma_i^2 sigma_j^2 = sum_k a_k X_k over
  // X = (1, Y, Oj, Oi, Y^2, Y Oj, Y Oi, Oi Oj)
  const std::array<double, 8> a{ai * aj,      ai * rj + aj * ri, ai * sj, aj * si,
                                ri * rj,      ri * sj,           rj * si, si * sj};

  const double ey = y.moment(1), ey2 = y.moment(2), ey3 = y.moment(3), ey4 = y.moment(4);
  const double eoi = oi.moment(1), eoi2 = oi.moment(2);
  const double eoj = oj.moment(1), eoj2 = oj.moment(2);
  const double vy = y.cumulant(2);
  const double voi = oi.cumulant(2);
  const double voj = oj.cumulant(2);
  const double cov_y_y2 = ey3 - ey * ey2;

  const std::array<double, 8> mean{1.0, ey, eoj, eoi, ey2, ey * eoj, ey * eoi, eoi * eoj};
  std::array<std::array<double, 8>, 8> c{};
  c[1][1] = vy;
  c[2][2] = voj;
  c[3][3] = voi;
  c[4][4] = ey4 - ey2 * ey2;
  c[5][5] = ey2 * eoj2 - ey * ey * eoj * eoj;
  c[6][6] = ey2 * eoi2 - ey * ey * eoi * eoi;
  c[7][7] = eoi2 * eoj2 - eoi * eoi * eoj * eoj;
  c[1][4] = cov_y_y2;
  c[1][5] = eoj * vy;
  c[1][6] = eoi * vy;
  c[2][5] = ey * voj;
  c[2][7] = eoi * voj;
  c[3][6] = ey * voi;
  c[3][7] = eoj * voi;
  c[4][5] = eoj * cov_y_y2;
  c[4][6] = eoi * cov_y_y2;
  c[5][6] = eoj * eoi * vy;
  c[5][7] = ey * eoi * voj;
  c[6][7] = ey * eoj * voi;

  ProductStats out;
  for (int k = 0; k < 8; ++k) out.mean += a[k] * mean[k];
  for (int k = 1; k < 8; ++k) {
    out.variance += a[k] * a[k] * c[k][k];
    for (int l = k + 1; l < 8; ++l) out.variance += 2.0 * a[k] * a[l] * c[k][l];
  }
  return out;
}

double approx_integrand(int i, int j, double t, const ModelParams& params) {
  check_pair(i, j);
  const auto [sp, scale] = rescaled_for_pair(params, i, j, t);
  const auto s = product_stats(i, j, t, sp);
  if (!(s.mean > 0.0)) {
    if (s.mean == 0.0 && s.variance == 0.0) return 0.0;
    std::ostringstream os;
    os.precision(17);
    os << "E[sigma_i^2 sigma_j^2] = " << s.mean << " is not positive at t = " << t;
    throw NumericalError(os.str(), kNotApplicable, kNotApplicable);
  }
  return (std::sqrt(s.mean) - s.variance / (8.0 * s.mean * std::sqrt(s.mean))) / scale;
}

EntryResult expected_var_leg(int i, const ModelParams& params, const CovarianceOptions& options) {
  if (i < 0 || i > 2) throw ArgumentError("asset index must be 0, 1 or 2");
  params.validate();
  // E[sigma_i^2(t)] = e^{-lt} s0 + k1 (1 - e^{-lt}) averages in closed form;
  // w = 1 - (1 - e^{-x}) / x, by its Taylor series for small x
  const double x = params.lambda * params.T;
  const double w = x < 1e-3 ? x / 2.0 - x * x / 6.0 + x * x * x / 24.0 : 1.0 + std::expm1(-x) / x;
  const double mean = params.assets[i].sigma0sq * (1.0 - w) + params.triple.derived_cumulant(i, 1) * w;
  double jump = jump_term(i, i, params);
  if (options.jump == JumpTermConvention::per_horizon) jump /= params.T;
  EntryResult out;
  out.value = mean + jump;
  out.diagnostics.quadrature_error = 0.0;
  return out;
}

EntryResult expected_cov_series(int i, int j, const ModelParams& params,
                                const CovarianceOptions& options) {
  check_pair(i, j);
  params.validate();
  if (i > j) std::swap(i, j);
  EntryResult out;
  if (params.beta.mode == BetaMode::fixed) {
    const double b = params.beta_for(i, j);
    const double x0 = params.assets[i].sigma0sq * params.assets[j].sigma0sq / (b * b * b * b) - 1.0;
    if (!(std::abs(x0) < 1.0)) {
      out.warnings.push_back("series argument at t=0 for pair " + pair_name(i, j) +
                             " lies on |x| = 1; convergence is slow");
    }
  }
  const double g = params.gamma(i, j);
  const double T = params.T;
  // integrate each term separately, then truncate the integrated series
  const std::function<Eigen::VectorXd(double)> f = [&](double t) {
    return series_terms(i, j, t, params, options);
  };
  const auto f0 = f(0.0);
  const double scale = std::max({f0.cwiseAbs().sum(), f(0.5 * T).cwiseAbs().sum(),
                                 f(T).cwiseAbs().sum(), std::numeric_limits<double>::min()});
  const auto q = quadrature_vector(f, 0.0, T, options.rel_tol * T * scale);
  const auto s = truncate_series(q.value / T, options.truncation);
  const auto s0 = truncate_series(f0, options.truncation);

  out.value = g * s.value + jump_term(i, j, params);
  out.diagnostics.quadrature_error =
      std::abs(g) * q.error_estimate.head(s.last_order + 1).sum() / T;
  out.diagnostics.series_tail = std::abs(g) * s.tail;
  out.diagnostics.series_tail_t0 = s0.value != 0.0 ? s0.tail / std::abs(s0.value) : 0.0;
  out.diagnostics.series_order = s.last_order;
  if (out.diagnostics.series_tail > options.tail_warning * std::max(std::abs(out.value), 1e-300)) {
    std::ostringstream os;
    os.precision(3);
    os << "series tail for pair " << pair_name(i, j) << " is " << out.diagnostics.series_tail
       << " (order " << s.last_order << "), above the warning threshold";
    out.warnings.push_back(os.str());
  }
  return out;
}

EntryResult expected_cov_approx(int i, int j, const ModelParams& params,
                                const CovarianceOptions& options) {
  check_pair(i, j);
  params.validate();
  if (i > j) std::swap(i, j);
  const double g = params.gamma(i, j);
  auto f = [&](double t) { return approx_integrand(i, j, t, params); };
  const auto q = average(f, params, options.rel_tol);
  EntryResult out;
  out.value = g * q.value + jump_term(i, j, params);
  out.diagnostics.quadrature_error = std::abs(g) * q.error_estimate;
  return out;
}

ExpectedCovMatrix expected_cov_matrix(const ModelParams& params, Method method,
                                      const CovarianceOptions& options) {
  if (method != Method::series && method != Method::approx) {
    throw ArgumentError("expected_cov_matrix computes the series and approx routes only");
  }
  ExpectedCovMatrix out;
  out.method = method;
  out.warnings = params.validate();
  for (int i = 0; i < 3; ++i) {
    const auto e = expected_var_leg(i, params, options);
    out.entries(i, i) = e.value;
    out.diagnostics[i][i] = e.diagnostics;
  }
  for (const auto& p : kPairs) {
    const auto e = method == Method::series ? expected_cov_series(p[0], p[1], params, options)
                                            : expected_cov_approx(p[0], p[1], params, options);
    out.entries(p[0], p[1]) = out.entries(p[1], p[0]) = e.value;
    out.diagnostics[p[0]][p[1]] = out.diagnostics[p[1]][p[0]] = e.diagnostics;
    out.warnings.insert(out.warnings.end(), e.warnings.begin(), e.warnings.end());
  }
  return out;
}

}  // namespace bnsswap
