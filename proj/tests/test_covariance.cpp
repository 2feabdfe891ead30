#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <random>

#include "bnsswap/covariance.hpp"
#include "bnsswap/errors.hpp"
#include "bnsswap/moments.hpp"
#include "support.hpp"

using namespace bnsswap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelParams zero_model() { return testsupport::load_params("zero_params.json"); }
ModelParams base_model() { return testsupport::load_params("base_params.json"); }

// sign * 2 Catalan(k-1) / 4^k, built from integers
double binomial_half(int k) {
  if (k == 0) return 1.0;
  std::uint64_t cat = 1;  // Catalan(0)
  for (int m = 0; m < k - 1; ++m) cat = cat * 2 * (2 * m + 1) / (m + 2);
  const double mag = std::ldexp(2.0 * static_cast<double>(cat), -2 * k);
  return k % 2 == 1 ? mag : -mag;
}

// Draw of int_0^L e^{s - L} dZ_s by uniform placement within short cells.
double draw_decayed_integral(levy::IncrementSampler& draw, double L, int cells, RandomStream& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dh = L / cells;
  double y = 0.0;
  for (int c = 0; c < cells; ++c) y += std::exp((c + u(rng)) * dh - L) * draw(rng);
  return y;
}

}  // namespace

TEST_CASE("series coefficients are exactly C(1/2, k)", "[covariance]") {
  const auto c = sqrt_series_coefficients(12);
  CHECK(c[1] == 0.5);
  CHECK(c[2] == -0.125);
  CHECK(c[3] == 0.0625);
  for (int k = 0; k <= 12; ++k) CHECK(c[k] == binomial_half(k));
  CHECK_THROWS_AS(sqrt_series_coefficients(-1), ArgumentError);
}

TEST_CASE("zero subordinators reduce to the deterministic closed forms", "[covariance]") {
  const auto p = zero_model();
  const double lT = p.lambda * p.T;
  const double avg = -std::expm1(-lT) / lT;
  for (Method m : {Method::series, Method::approx}) {
    const auto cov = expected_cov_matrix(p, m);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double s0 = std::sqrt(p.assets[i].sigma0sq * p.assets[j].sigma0sq);
        INFO(to_string(m) << " entry " << i << j);
        // quadrature tolerance is relative to the peak integrand, ~1/(lambda T) of the average
        CHECK_THAT(cov.entries(i, j), WithinRel(p.gamma(i, j) * s0 * avg, 1e-9));
      }
    }
  }
}

TEST_CASE("expected covariance matrix structure", "[covariance]") {
  const auto p = base_model();
  for (Method m : {Method::series, Method::approx}) {
    const auto cov = expected_cov_matrix(p, m);
    CHECK(cov.method == m);
    CHECK((cov.entries - cov.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(cov.entries(i, i) > 0.0);
    for (const auto& w : cov.warnings) CHECK(w.find("series") == std::string::npos);
  }
  CHECK_THROWS_AS(expected_cov_matrix(p, Method::mc), ArgumentError);
  CHECK_THROWS_AS(expected_cov_series(1, 1, p), ArgumentError);
  CHECK(method_from_string(to_string(Method::approx)) == Method::approx);
}

TEST_CASE("variance leg equals the time average of E[sigma^2] plus the jump term", "[covariance]") {
  const auto p = base_model();
  const double l = p.lambda, T = p.T;
  const double k2 = levy::cumulant(p.triple.z1, 2);
  for (int i = 0; i < 3; ++i) {
    // (1/T) int_0^T (e^{-lt} s0 + k1 (1 - e^{-lt})) dt in closed form
    const double k1 = p.triple.derived_cumulant(i, 1);
    const double avg = -std::expm1(-l * T) / (l * T);
    const double expect = p.assets[i].sigma0sq * avg + k1 * (1.0 - avg);
    const double rho = p.assets[i].rho;
    const auto leg = expected_var_leg(i, p);
    CHECK_THAT(leg.value, WithinRel(expect + rho * rho * l * k2, 1e-9));
    CovarianceOptions o;
    o.jump = JumpTermConvention::per_horizon;
    CHECK_THAT(expected_var_leg(i, p, o).value, WithinRel(expect + rho * rho * l * k2 / T, 1e-9));
  }
}

TEST_CASE("off-diagonal diffusion part is linear in gamma", "[covariance]") {
  auto p = base_model();
  const double jump = p.assets[0].rho * p.assets[1].rho * p.lambda * levy::cumulant(p.triple.z1, 2);
  const double v1 = expected_cov_series(0, 1, p).value - jump;
  p.gamma(0, 1) = p.gamma(1, 0) = 2.0 * p.gamma(0, 1);
  const double v2 = expected_cov_series(0, 1, p).value - jump;
  CHECK_THAT(v2, WithinRel(2.0 * v1, 1e-12));
  // and increasing in gamma
  p.gamma(0, 1) = p.gamma(1, 0) = 0.3;
  CHECK(expected_cov_approx(0, 1, p).value > expected_cov_approx(0, 1, base_model()).value);
}

TEST_CASE("product stats agree with product moments", "[covariance]") {
  const auto p = base_model();
  for (double t : {0.0, 3.0, 40.0}) {
    for (auto [i, j] : kPairs) {
      const auto M = moments::product_moments(p, i, j, t, 2);
      const auto s = product_stats(i, j, t, p);
      CHECK_THAT(s.mean, WithinRel(M[1], 1e-12));
      CHECK(std::abs(s.variance - (M[2] - M[1] * M[1])) <= 1e-6 * M[2]);
      CHECK(s.variance >= 0.0);
    }
  }
}

TEST_CASE("N-term and positive forms give the same series", "[covariance]") {
  auto p = base_model();
  CovarianceOptions nt;
  nt.form = SeriesForm::n_terms;
  for (auto [i, j] : kPairs) {
    const auto a = product_power_moments(p, i, j, 7.5, 6);
    const auto b = product_power_moments(p, i, j, 7.5, 6, nt);
    for (int q = 0; q <= 6; ++q) CHECK_THAT(b[q], WithinRel(a[q], 1e-9));
  }
  // Near t = 0 the N-term form cancels catastrophically at high powers (negative shifts), so the
  // integrated comparison stays at low order.
  p.kmax = 4;
  for (auto [i, j] : kPairs) {
    CHECK_THAT(expected_cov_series(i, j, p, nt).value, WithinRel(expected_cov_series(i, j, p).value, 1e-8));
  }
  const auto a = product_power_moments(p, 1, 2, 0.0, 8);
  const auto b = product_power_moments(p, 1, 2, 0.0, 8, nt);
  CHECK(std::abs(b[8] / a[8] - 1.0) > 1e-3);
}

TEST_CASE("series integrand obeys Cauchy-Schwarz and matches sampling at fixed t", "[covariance][stochastic]") {
  const auto p = base_model();
  const double t = 2.0, L = p.lambda * t;
  for (auto [i, j] : kPairs) {
    for (double s : {0.0, 1.0, 10.0, 100.0}) {
      const double m = moments::product_moments(p, i, j, s, 1)[1];
      CHECK(series_integrand(i, j, s, p).value <= std::sqrt(m) * (1 + 1e-12));
      CHECK(approx_integrand(i, j, s, p) <= std::sqrt(m) * (1 + 1e-12));
    }
  }
  // sample sigma_i^2(t) = e^{-lt} s0 + r Yd + s Od from independent exp-integral draws
  RandomStream rng(31);
  const int cells = 40, n = 20000;
  levy::IncrementSampler d1(p.triple.z1, L / cells), d2(p.triple.z_star, L / cells);
  const double d = std::exp(-L);
  double acc = 0.0, acc2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double y = draw_decayed_integral(d1, L, cells, rng);
    const double o = draw_decayed_integral(d2, L, cells, rng);
    const double v1 = d * p.assets[0].sigma0sq + y;
    const double v2 = d * p.assets[1].sigma0sq + p.triple.r2 * y + p.triple.own_loading(1) * o;
    const double x = std::sqrt(v1 * v2);
    acc += x;
    acc2 += x * x;
  }
  const double mean = acc / n;
  const double se = std::sqrt((acc2 / n - mean * mean) / n);
  CHECK(std::abs(series_integrand(0, 1, t, p).value - mean) < 4.0 * se);
  CHECK(std::abs(approx_integrand(0, 1, t, p) - mean) < 4.0 * se);
}

TEST_CASE("series diagnostics and truncation", "[covariance]") {
  const auto p = base_model();
  const auto r = expected_cov_series(1, 2, p);
  CHECK(r.diagnostics.series_order >= 2);
  CHECK(r.diagnostics.series_order <= p.kmax);
  CHECK(std::isfinite(r.diagnostics.series_tail));
  CHECK(std::isfinite(r.diagnostics.quadrature_error));

  Eigen::VectorXd terms(6);
  terms << 1.0, 0.1, -0.01, 0.001, -0.002, 0.5;
  const auto fixed = truncate_series(terms, SeriesTruncation::fixed);
  CHECK_THAT(fixed.value, WithinAbs(1.589, 1e-15));
  CHECK(fixed.last_order == 5);
  const auto smallest = truncate_series(terms, SeriesTruncation::smallest_term);
  CHECK_THAT(smallest.value, WithinAbs(1.091, 1e-15));
  CHECK(smallest.last_order == 3);
  CHECK(smallest.tail == 0.001);
}

TEST_CASE("series survives strong decay of the initial variance", "[covariance]") {
  auto p = zero_model();
  p.lambda = 3.0;  // e^{-lambda T} underflows long before T
  const auto cov = expected_cov_matrix(p, Method::series);
  const double avg = 1.0 / (p.lambda * p.T);
  CHECK_THAT(cov.entries(0, 1), WithinRel(p.gamma(0, 1) * std::sqrt(p.assets[0].sigma0sq * p.assets[1].sigma0sq) * avg, 1e-9));
}
