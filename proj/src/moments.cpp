#include "bnsswap/moments.hpp"

#include <array>
#include <cmath>
#include <string>

#include "bnsswap/errors.hpp"

namespace bnsswap::moments {

namespace {

constexpr int kMaxBinomial = 2 * levy::kMaxOrder + 2;

const std::vector<std::vector<double>>& pascal() {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<double>> t(kMaxBinomial + 1);
    for (int n = 0; n <= kMaxBinomial; ++n) {
      t[n].assign(n + 1, 1.0);
      for (int k = 1; k < n; ++k) t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
    }
    return t;
  }();
  return table;
}

void check_order(int n, int lo = 1) {
  if (n < lo || n > levy::kMaxOrder) {
    throw ArgumentError("moment order " + std::to_string(n) + " outside " + std::to_string(lo) +
                        ".." + std::to_string(levy::kMaxOrder));
  }
}

void check_time(double lambda, double t) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be positive");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("t must be nonnegative");
}

// powers x^0..x^n, with 0^0 = 1
std::vector<double> powers(double x, int n) {
  std::vector<double> out(n + 1, 1.0);
  for (int m = 1; m <= n; ++m) out[m] = out[m - 1] * x;
  return out;
}

}  // namespace

double binomial(int n, int k) {
  if (n < 0 || n > kMaxBinomial) throw ArgumentError("binomial order out of range");
  if (k < 0 || k > n) return 0.0;
  return pascal()[n][k];
}

std::vector<double> raw_moments_from_cumulants(std::span<const double> kappa) {
  const int n = static_cast<int>(kappa.size());
  std::vector<double> m(n + 1, 0.0);
  m[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += binomial(k - 1, j - 1) * kappa[j - 1] * m[k - j];
    m[k] = s;
  }
  return m;
}

std::vector<double> exp_integral_cumulants(std::span<const double> unit_cumulants, double lambda,
                                           double t, Scaling scaling) {
  check_time(lambda, t);
  std::vector<double> out(unit_cumulants.size());
  const double lt = lambda * t;
  for (std::size_t k = 0; k < unit_cumulants.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    // int_0^{lt} e^{n s} ds = (e^{n lt} - 1)/n; decayed by e^{-n lt}
    const double w = scaling == Scaling::raw ? std::expm1(n * lt) / n : -std::expm1(-n * lt) / n;
    out[k] = unit_cumulants[k] * w;
  }
  return out;
}

ExpIntegralMoments::ExpIntegralMoments(std::vector<double> unit_cumulants, double lambda, double t,
                                       int max_order, Scaling scaling)
    : max_order_(max_order), scaling_(scaling) {
  check_order(max_order, 0);
  if (static_cast<int>(unit_cumulants.size()) < max_order) {
    throw ArgumentError("not enough unit cumulants for the requested order");
  }
  unit_cumulants.resize(max_order);
  cumulants_ = exp_integral_cumulants(unit_cumulants, lambda, t, scaling);
  moments_ = raw_moments_from_cumulants(cumulants_);
  shift_factor_ = scaling == Scaling::raw ? 1.0 : std::exp(-lambda * t);
}

ExpIntegralMoments::ExpIntegralMoments(const levy::SubordinatorSpec& spec, double lambda, double t,
                                       int max_order, Scaling scaling)
    : ExpIntegralMoments(levy::cumulants(spec, std::max(max_order, 0)), lambda, t, max_order,
                         scaling) {}

double ExpIntegralMoments::cumulant(int n) const {
  if (n < 1 || n > max_order_) throw ArgumentError("cumulant order outside cached range");
  return cumulants_[n - 1];
}

double ExpIntegralMoments::moment(int n) const {
  if (n < 0 || n > max_order_) throw ArgumentError("moment order outside cached range");
  return moments_[n];
}

std::vector<double> ExpIntegralMoments::shifted_moments(double alpha) const {
  if (max_order_ == 0) return {1.0};
  // shifting B by a constant only moves the first cumulant; keeps all-positive recursions exact
  std::vector<double> k = cumulants_;
  k[0] += alpha * shift_factor_;
  return raw_moments_from_cumulants(k);
}

double ExpIntegralMoments::shifted_moment(double alpha, int k) const {
  if (k < 0 || k > max_order_) throw ArgumentError("moment order outside cached range");
  if (k == 0) return 1.0;
  return shifted_moments(alpha)[k];
}

double moment_Y(const levy::SubordinatorSpec& spec, double lambda, double t, int n,
                Scaling scaling) {
  check_order(n);
  return ExpIntegralMoments(spec, lambda, t, n, scaling).moment(n);
}

double moment_B(double alpha1, const levy::SubordinatorSpec& spec, double lambda, double t, int k,
                Scaling scaling) {
  check_order(k);
  return ExpIntegralMoments(spec, lambda, t, k, scaling).shifted_moment(alpha1, k);
}

double n_term_pair(int p, int u, double t, const ModelParams& params, int i, int j,
                   ShiftNormalization shift, Scaling scaling) {
  if (i > j) std::swap(i, j);
  if (i != 0 || (j != 1 && j != 2)) {
    throw ArgumentError("n_term_pair is defined for the asset pairs (1,2) and (3,1) only");
  }
  if (p < 0 || u < 0 || u > p) throw ArgumentError("n_term_pair needs 0 <= u <= p");
  if (p + u > levy::kMaxOrder) throw ArgumentError("n_term_pair order too large");
  const double rj = params.triple.loading(j);
  const double norm = shift == ShiftNormalization::derived ? std::sqrt(1.0 - rj * rj)
                                                           : std::sqrt(1.0 - rj);
  if (!(norm > 0.0)) {
    throw SingularConfigurationError("n_term_pair divides by sqrt(1 - r_j^2), which is zero for r_j = 1");
  }
  const double s1 = params.assets[0].sigma0sq;
  const double shift_j = (params.assets[j].sigma0sq - rj * s1) / norm;
  const double leg1 =
      p + u == 0 ? 1.0 : moment_B(s1, params.triple.z1, params.lambda, t, p + u, scaling);
  const double leg2 =
      p - u == 0
          ? 1.0
          : moment_B(shift_j, params.triple.own_component(j), params.lambda, t, p - u, scaling);
  return leg1 * leg2;
}

double n_term_23(int p, int u, int v, int w, double t, const ModelParams& params,
                 Scaling scaling) {
  if (!(0 <= v && v <= u && u <= p && 0 <= w && w <= u - v && p - v - w >= 0 && p - u + w >= 0)) {
    throw ArgumentError("n_term_23 needs 0 <= v <= u <= p and 0 <= w <= u - v");
  }
  if (u + v > levy::kMaxOrder || p > levy::kMaxOrder) throw ArgumentError("n_term_23 order too large");
  const double r2 = params.triple.r2;
  const double r3 = params.triple.r3;
  if (!(r2 > 0.0)) throw SingularConfigurationError("n_term_23 divides by r2, which is zero");
  const double s3 = std::sqrt(1.0 - r3 * r3);
  if (!(s3 > 0.0)) {
    throw SingularConfigurationError("n_term_23 divides by sqrt(1 - r3^2), which is zero for r3 = 1");
  }
  const double s20 = params.assets[1].sigma0sq;
  const double c = params.assets[2].sigma0sq - (r3 / r2) * s20;
  const int nf = u + v;
  const int ng = p - u + w;
  const int ns = p - v - w;
  const double f = nf == 0 ? 1.0 : moment_B(s20 / r2, params.triple.z1, params.lambda, t, nf, scaling);
  const double g = ng == 0 ? 1.0
                           : moment_B(c / s3, params.triple.z_star_star, params.lambda, t, ng, scaling);
  const double h = ns == 0 ? 1.0 : moment_Y(params.triple.z_star, params.lambda, t, ns, scaling);
  return std::pow(r2, nf) * f * g * h;
}

std::vector<double> variance_moments(const ModelParams& params, int i, double t, int max_order) {
  check_order(max_order, 0);
  ExpIntegralMoments m(params.triple.derived_cumulants(i, std::max(max_order, 1)), params.lambda, t,
                       max_order, Scaling::decayed);
  return m.shifted_moments(params.assets[i].sigma0sq);
}

std::vector<double> product_moments(const ModelParams& params, int i, int j, double t,
                                    int max_power) {
  if (i == j || i < 0 || j < 0 || i > 2 || j > 2) throw ArgumentError("product_moments needs i != j");
  if (max_power < 0 || 2 * max_power > levy::kMaxOrder) {
    throw ArgumentError("product_moments power out of range");
  }
  const auto& tr = params.triple;
  const int P = max_power;
  const double decay = std::exp(-params.lambda * t);

  // sigma_a^2 = A_a + s_a O_a with A_a = alpha_a + r_a Ytilde_1; all parts nonnegative
  const auto y1 = ExpIntegralMoments(tr.z1, params.lambda, t, std::max(2 * P, 0), Scaling::decayed)
                      .moments();
  const auto oi = ExpIntegralMoments(tr.own_component(i), params.lambda, t, P, Scaling::decayed)
                      .moments();
  const auto oj = ExpIntegralMoments(tr.own_component(j), params.lambda, t, P, Scaling::decayed)
                      .moments();
  const double ai = decay * params.assets[i].sigma0sq;
  const double aj = decay * params.assets[j].sigma0sq;
  const auto si = powers(tr.own_loading(i), P);
  const auto sj = powers(tr.own_loading(j), P);
  const auto ri = powers(tr.loading(i), P);
  const auto rj = powers(tr.loading(j), P);
  const auto ai_pow = powers(ai, P);
  const auto aj_pow = powers(aj, P);

  // coefficient vectors of A_i^a and A_j^b as polynomials in Ytilde_1
  auto poly = [&](const std::vector<double>& alpha_pow, const std::vector<double>& r_pow, int a) {
    std::vector<double> c(a + 1);
    for (int m = 0; m <= a; ++m) c[m] = binomial(a, m) * alpha_pow[a - m] * r_pow[m];
    return c;
  };
  std::vector<std::vector<double>> pi(P + 1), pj(P + 1);
  for (int a = 0; a <= P; ++a) {
    pi[a] = poly(ai_pow, ri, a);
    pj[a] = poly(aj_pow, rj, a);
  }
  // E[A_i^a A_j^b]
  std::vector<std::vector<double>> cross(P + 1, std::vector<double>(P + 1, 0.0));
  for (int a = 0; a <= P; ++a) {
    for (int b = 0; b <= P; ++b) {
      double s = 0.0;
      for (int m = 0; m <= a; ++m) {
        for (int n = 0; n <= b; ++n) s += pi[a][m] * pj[b][n] * y1[m + n];
      }
      cross[a][b] = s;
    }
  }
  std::vector<double> out(P + 1, 0.0);
  for (int p = 0; p <= P; ++p) {
    double s = 0.0;
    for (int a = 0; a <= p; ++a) {
      const double wa = binomial(p, a) * si[p - a] * oi[p - a];
      if (wa == 0.0) continue;
      for (int b = 0; b <= p; ++b) {
        s += wa * binomial(p, b) * sj[p - b] * oj[p - b] * cross[a][b];
      }
    }
    out[p] = s;
  }
  return out;
}

}  // namespace bnsswap::moments
