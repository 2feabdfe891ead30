#include "bnsswap/levy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bnsswap/errors.hpp"

namespace bnsswap::levy {

namespace {

void check_order(int n) {
  if (n < 1 || n > kMaxOrder) {
    throw ArgumentError("cumulant order " + std::to_string(n) + " outside 1.." +
                        std::to_string(kMaxOrder));
  }
}

void check_asset(int asset) {
  if (asset < 0 || asset > 2) throw ArgumentError("asset index must be 0, 1 or 2");
}

// Michael-Schucany-Haas draw of an IG variate with the given mean and shape.
double draw_inverse_gaussian(double mean, double shape, std::normal_distribution<double>& normal,
                             std::uniform_real_distribution<double>& uniform, RandomStream& rng) {
  const double nu = normal(rng);
  const double phi = mean * nu * nu / (2.0 * shape);
  // mean * (1 + phi - sqrt(phi^2 + 2 phi)) rearranged to avoid cancellation for large phi
  const double x = mean / (1.0 + phi + std::sqrt(phi * (phi + 2.0)));
  if (uniform(rng) * (mean + x) <= mean) return x;
  return mean * mean / x;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::gamma:
      return "gamma";
    case Family::inverse_gaussian:
      return "ig";
    case Family::zero:
      return "zero";
  }
  return "zero";
}

Family family_from_string(const std::string& name) {
  if (name == "gamma") return Family::gamma;
  if (name == "ig") return Family::inverse_gaussian;
  if (name == "zero") return Family::zero;
  throw ArgumentError("unknown subordinator family '" + name + "' (expected gamma, ig or zero)");
}

SubordinatorSpec::SubordinatorSpec(Family f, double a, double b) : family_(f), a_(a), b_(b) {}

SubordinatorSpec SubordinatorSpec::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw ArgumentError("gamma subordinator needs shape > 0 and rate > 0");
  }
  return {Family::gamma, shape, rate};
}

SubordinatorSpec SubordinatorSpec::inverse_gaussian(double delta, double gamma) {
  if (!(delta > 0.0) || !(gamma > 0.0) || !std::isfinite(delta) || !std::isfinite(gamma)) {
    throw ArgumentError("inverse Gaussian subordinator needs a > 0 and b > 0");
  }
  return {Family::inverse_gaussian, delta, gamma};
}

SubordinatorSpec SubordinatorSpec::zero() { return {}; }

SubordinatorSpec SubordinatorSpec::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw ArgumentError("scale factor must be positive and finite");
  switch (family_) {
    case Family::gamma:
      return gamma(a_, b_ / s);
    case Family::inverse_gaussian:
      return inverse_gaussian(a_ * std::sqrt(s), b_ / std::sqrt(s));
    case Family::zero:
      break;
  }
  return {};
}

double cumulant(const SubordinatorSpec& spec, int n) {
  check_order(n);
  switch (spec.family()) {
    case Family::gamma: {
      // a (n-1)! / b^n
      double k = spec.a() / spec.b();
      for (int m = 1; m < n; ++m) k *= m / spec.b();
      return k;
    }
    case Family::inverse_gaussian: {
      // delta (2n-3)!! gamma^(1-2n)
      const double g2 = spec.b() * spec.b();
      double k = spec.a() / spec.b();
      for (int m = 1; m < n; ++m) k *= (2.0 * m - 1.0) / g2;
      return k;
    }
    case Family::zero:
      return 0.0;
  }
  return 0.0;
}

std::vector<double> cumulants(const SubordinatorSpec& spec, int n) {
  std::vector<double> out;
  out.reserve(n);
  for (int m = 1; m <= n; ++m) out.push_back(cumulant(spec, m));
  return out;
}

double cgf_domain_bound(const SubordinatorSpec& spec) {
  switch (spec.family()) {
    case Family::gamma:
      return spec.b();
    case Family::inverse_gaussian:
      return 0.5 * spec.b() * spec.b();
    case Family::zero:
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double cgf(const SubordinatorSpec& spec, double theta) {
  switch (spec.family()) {
    case Family::gamma:
      if (!(theta < spec.b())) {
        std::ostringstream os;
        os.precision(17);
        os << "gamma CGF requires theta < b = " << spec.b() << ", got " << theta;
        throw DomainError(os.str());
      }
      return -spec.a() * std::log1p(-theta / spec.b());
    case Family::inverse_gaussian: {
      const double bound = cgf_domain_bound(spec);
      if (!(theta <= bound)) {
        std::ostringstream os;
        os.precision(17);
        os << "inverse Gaussian CGF requires theta <= b^2/2 = " << bound << ", got " << theta;
        throw DomainError(os.str());
      }
      const double g = spec.b();
      // delta (g - sqrt(g^2 - 2 theta)) written without cancellation near 0
      return spec.a() * 2.0 * theta / (g + std::sqrt(g * g - 2.0 * theta));
    }
    case Family::zero:
      return 0.0;
  }
  return 0.0;
}

IncrementSampler::IncrementSampler(const SubordinatorSpec& spec, double dt) : family_(spec.family()) {
  if (!(dt > 0.0)) throw ArgumentError("increment length dt must be positive");
  if (family_ == Family::gamma) {
    gamma_ = std::gamma_distribution<double>(spec.a() * dt, 1.0 / spec.b());
  } else if (family_ == Family::inverse_gaussian) {
    ig_mean_ = spec.a() * dt / spec.b();
    ig_shape_ = spec.a() * dt * spec.a() * dt;
  }
}

double IncrementSampler::operator()(RandomStream& rng) {
  switch (family_) {
    case Family::gamma:
      return gamma_(rng);
    case Family::inverse_gaussian:
      return draw_inverse_gaussian(ig_mean_, ig_shape_, normal_, uniform_, rng);
    case Family::zero:
      return 0.0;
  }
  return 0.0;
}

double sample_increment(const SubordinatorSpec& spec, double dt, RandomStream& rng) {
  IncrementSampler sampler(spec, dt);
  return sampler(rng);
}

double jump_square_sum(const SubordinatorSpec& spec, double increment, double dt) {
  if (spec.family() == Family::zero) return 0.0;
  // c * g^2 with c = kappa2 dt / E[g^2]. For Gamma this is E[sum J^2 | g] = g^2 / (1 + a dt).
  const double k1 = cumulant(spec, 1);
  const double k2 = cumulant(spec, 2);
  return increment * increment / (1.0 + k1 * k1 * dt / k2);
}

void CorrelatedTriple::validate() const {
  if (!(r2 >= 0.0 && r2 <= 1.0) || !(r3 >= 0.0 && r3 <= 1.0)) {
    throw ArgumentError("subordinator correlations r2, r3 must lie in [0, 1]");
  }
}

double CorrelatedTriple::loading(int asset) const {
  check_asset(asset);
  return asset == 0 ? 1.0 : (asset == 1 ? r2 : r3);
}

double CorrelatedTriple::own_loading(int asset) const {
  check_asset(asset);
  if (asset == 0) return 0.0;
  const double r = asset == 1 ? r2 : r3;
  return std::sqrt(1.0 - r * r);
}

const SubordinatorSpec& CorrelatedTriple::own_component(int asset) const {
  check_asset(asset);
  static const SubordinatorSpec none;
  return asset == 0 ? none : (asset == 1 ? z_star : z_star_star);
}

double CorrelatedTriple::derived_cumulant(int asset, int n) const {
  check_order(n);
  const double r = loading(asset);
  const double s = own_loading(asset);
  double value = std::pow(r, n) * cumulant(z1, n);
  if (asset != 0) value += std::pow(s, n) * cumulant(own_component(asset), n);
  return value;
}

std::vector<double> CorrelatedTriple::derived_cumulants(int asset, int n) const {
  std::vector<double> out;
  out.reserve(n);
  for (int m = 1; m <= n; ++m) out.push_back(derived_cumulant(asset, m));
  return out;
}

IncrementPair correlated_increments(const CorrelatedTriple& triple, double dz1, double dz_star,
                                    double dz_star_star) {
  return {triple.r2 * dz1 + triple.own_loading(1) * dz_star,
          triple.r3 * dz1 + triple.own_loading(2) * dz_star_star};
}

VolCorrelations stationary_vol_correlations(const CorrelatedTriple& triple) {
  triple.validate();
  const double k1 = cumulant(triple.z1, 2);
  const double k2 = triple.derived_cumulant(1, 2);
  const double k3 = triple.derived_cumulant(2, 2);
  if (!(k2 > 0.0) || !(k3 > 0.0)) {
    throw DegenerateLawError("stationary correlations need positive variance for Z^2 and Z^3");
  }
  return {triple.r2 * std::sqrt(k1 / k2), triple.r3 * std::sqrt(k1 / k3),
          triple.r2 * triple.r3 * k1 / std::sqrt(k2 * k3)};
}

}  // namespace bnsswap::levy
