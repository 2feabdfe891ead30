#include "bnsswap/pricing.hpp"

#include <cmath>

#include "bnsswap/errors.hpp"

namespace bnsswap {

std::string to_string(SwapKind k) { return k == SwapKind::trace ? "trace" : "max_eigenvalue"; }

SwapKind swap_kind_from_string(const std::string& name) {
  if (name == "trace") return SwapKind::trace;
  if (name == "max_eigenvalue" || name == "eigenvalue") return SwapKind::max_eigenvalue;
  throw ArgumentError("unknown swap kind '" + name + "' (expected trace or max_eigenvalue)");
}

void SwapContract::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw ArgumentError("contract maturity T must be positive");
  if (!(strike >= 0.0) || !std::isfinite(strike)) throw ArgumentError("strike must be nonnegative");
  if (!std::isfinite(rate)) throw ArgumentError("rate must be finite");
  if (!std::isfinite(target_return)) throw ArgumentError("target return must be finite");
}

double SwapContract::discount() const { return std::exp(-rate * T); }

namespace {

PricingResult finish(double metric, const ExpectedCovMatrix& cov, const SwapContract& contract) {
  PricingResult out;
  out.discount = contract.discount();
  out.expected_metric = metric;
  out.price = out.discount * (metric - contract.strike);
  out.method = to_string(cov.method);
  return out;
}

void require_kind(const SwapContract& c, SwapKind kind) {
  c.validate();
  if (c.kind != kind) {
    throw ArgumentError("contract kind is " + to_string(c.kind) + ", expected " + to_string(kind));
  }
}

}  // namespace

PricingResult price_trace(const ExpectedCovMatrix& cov, const SwapContract& contract) {
  require_kind(contract, SwapKind::trace);
  return finish(cov.entries.trace(), cov, contract);
}

PricingResult price_eigenvalue(const ExpectedCovMatrix& cov, const Eigen::Vector3d& mu,
                               const SwapContract& contract) {
  require_kind(contract, SwapKind::max_eigenvalue);
  const auto basis = qr_constraint_basis(mu, contract.target_return);
  const auto fw = feasible_weights(basis, cov.entries);
  auto out = finish(fw.lambda_value, cov, contract);
  out.basis = basis;
  out.weights = fw;
  return out;
}

PricingResult price_eigenvalue_reproduction(const ExpectedCovMatrix& cov,
                                            const ReproductionBasis& basis,
                                            const SwapContract& contract) {
  require_kind(contract, SwapKind::max_eigenvalue);
  const Eigen::Vector3d w = basis.P * basis.F;
  auto out = finish(w.dot(cov.entries * w), cov, contract);
  out.method += "+reproduction";
  out.reproduction_weights = w;
  const double orth = (basis.P.transpose() * basis.P - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (orth > 1e-6) {
    out.notes.push_back("printed P is not orthogonal (max |P'P - I| = " + std::to_string(orth) +
                        "); weights satisfy neither w'w = 1 nor sum w = 1");
  }
  return out;
}

}  // namespace bnsswap
