#pragma once

#include <span>
#include <vector>

#include "bnsswap/levy.hpp"
#include "bnsswap/model.hpp"

namespace bnsswap::moments {

/// raw:     Y = int_0^{lambda t} e^s dV_s and B = alpha + Y.
/// decayed: e^{-lambda t} Y and e^{-lambda t} B, i.e. the variance-scale quantities.
///          Preferred for large lambda t, where raw moments overflow.
enum class Scaling { raw, decayed };

/// Normalisation of the second-leg shift in n_term_pair.
///   derived: (sigma_j0^2 - r_j sigma_10^2) / sqrt(1 - r_j^2), consistent with the model.
///   printed: same numerator over sqrt(1 - r_j).
enum class ShiftNormalization { derived, printed };

/// Raw moments m_0..m_n from cumulants kappa_1..kappa_n (kappa[0] = kappa_1), using
/// m_n = sum_{j=1..n} C(n-1, j-1) kappa_j m_{n-j}.
std::vector<double> raw_moments_from_cumulants(std::span<const double> kappa);

/// Binomial coefficient C(n, k) as a double (exact for the orders used here).
double binomial(int n, int k);

/// Cumulants of Y (or e^{-lambda t} Y) given unit-time cumulants of V.
std::vector<double> exp_integral_cumulants(std::span<const double> unit_cumulants, double lambda,
                                           double t, Scaling scaling = Scaling::raw);

/// Moments of Y = int_0^{lambda t} e^s dV_s and of shifted B = alpha + Y, cached to max_order.
class ExpIntegralMoments {
 public:
  ExpIntegralMoments(std::vector<double> unit_cumulants, double lambda, double t, int max_order = 4,
                     Scaling scaling = Scaling::raw);
  ExpIntegralMoments(const levy::SubordinatorSpec& spec, double lambda, double t, int max_order = 4,
                     Scaling scaling = Scaling::raw);

  int max_order() const noexcept { return max_order_; }
  Scaling scaling() const noexcept { return scaling_; }
  /// Multiplier applied to a shift alpha (1 for raw, e^{-lambda t} for decayed).
  double shift_factor() const noexcept { return shift_factor_; }

  double cumulant(int n) const;
  double moment(int n) const;
  /// E[B^k] with B = alpha + Y (times e^{-lambda t} in decayed scaling).
  double shifted_moment(double alpha, int k) const;
  /// E[B^0..B^max_order].
  std::vector<double> shifted_moments(double alpha) const;
  const std::vector<double>& moments() const noexcept { return moments_; }

 private:
  int max_order_;
  Scaling scaling_;
  double shift_factor_;
  std::vector<double> cumulants_;  // of Y, kappa_1..kappa_max
  std::vector<double> moments_;    // m_0..m_max
};

/// E[Y^n], n in 1..kMaxOrder.
double moment_Y(const levy::SubordinatorSpec& spec, double lambda, double t, int n,
                Scaling scaling = Scaling::raw);

/// E[(alpha1 + Y)^k], k in 1..kMaxOrder.
double moment_B(double alpha1, const levy::SubordinatorSpec& spec, double lambda, double t, int k,
                Scaling scaling = Scaling::raw);

/// N^{1j}(p, u) for the pairs (1,2) and (3,1) (0-based: {0,1} and {0,2}, either order):
/// E[B_1^{p+u}] E[B_j^{p-u}] with B_1 = sigma_10^2 + int e^s dZ^1 and
/// B_j = shift_j + int e^s dZ_own.
double n_term_pair(int p, int u, double t, const ModelParams& params, int i, int j,
                   ShiftNormalization shift = ShiftNormalization::derived,
                   Scaling scaling = Scaling::raw);

/// N^{23}(p, u, v, w) = r2^{u+v} E[(sigma_20^2/r2 + int e^s dZ^1)^{u+v}]
///   * E[(c/sqrt(1-r3^2) + int e^s dZ**)^{p-u+w}] * E[(int e^s dZ*)^{p-v-w}],
/// with c = sigma_30^2 - (r3/r2) sigma_20^2.
double n_term_23(int p, int u, int v, int w, double t, const ModelParams& params,
                 Scaling scaling = Scaling::raw);

/// E[(sigma_i^2(t))^n] for n = 0..max_order.
std::vector<double> variance_moments(const ModelParams& params, int i, double t, int max_order);

/// E[(sigma_i^2(t) sigma_j^2(t))^p] for p = 0..max_power, i != j.
/// Expands each variance into nonnegative independent parts, so every term is nonnegative.
std::vector<double> product_moments(const ModelParams& params, int i, int j, double t,
                                    int max_power);

}  // namespace bnsswap::moments
