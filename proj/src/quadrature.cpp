#include "bnsswap/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bnsswap/errors.hpp"

namespace bnsswap {

namespace {

using Vec = Eigen::VectorXd;

struct Simpson {
  const std::function<Vec(double)>& f;
  long max_evaluations;
  long evaluations = 0;
  bool depth_exceeded = false;
  Vec error;

  Vec eval(double x) {
    if (++evaluations > max_evaluations) {
      throw NumericalError("quadrature exceeded its evaluation budget; integrand is not resolvable",
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::infinity());
    }
    Vec y = f(x);
    if (!y.allFinite()) {
      std::ostringstream os;
      os.precision(17);
      os << "integrand is not finite at t = " << x;
      throw NumericalError(os.str(), std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::infinity());
    }
    return y;
  }

  Vec refine(double a, const Vec& fa, double m, const Vec& fm, double b, const Vec& fb,
             const Vec& whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Vec flm = eval(lm);
    const Vec frm = eval(rm);
    const Vec left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Vec right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Vec delta = left + right - whole;
    const double size = delta.cwiseAbs().sum();
    // accept at the tolerance, or once the difference is at rounding level
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         (left.cwiseAbs().sum() + right.cwiseAbs().sum());
    const bool converged = size <= 15.0 * tol || size <= noise;
    if (converged || depth <= 0) {
      if (!converged) depth_exceeded = true;
      error += delta.cwiseAbs() / 15.0;
      return left + right + delta / 15.0;
    }
    return refine(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           refine(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

VectorQuadratureResult quadrature_vector(const std::function<Eigen::VectorXd(double)>& f, double a,
                                         double b, double tol, int max_depth,
                                         long max_evaluations) {
  if (!(b >= a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ArgumentError("quadrature needs a finite interval with a <= b");
  }
  if (!(tol > 0.0)) throw ArgumentError("quadrature tolerance must be positive");

  Simpson s{f, max_evaluations, 0, false, Vec()};
  Vec f0 = s.eval(a);
  VectorQuadratureResult out;
  out.value = Vec::Zero(f0.size());
  out.error_estimate = Vec::Zero(f0.size());
  if (a == b) {
    out.evaluations = 1;
    return out;
  }
  s.error = Vec::Zero(f0.size());

  // a few fixed initial panels so a smooth-looking coarse sample cannot hide a transient
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  double x0 = a;
  for (int k = 0; k < kPanels; ++k) {
    const double x2 = k + 1 == kPanels ? b : a + (k + 1) * h;
    const double x1 = 0.5 * (x0 + x2);
    const Vec f1 = s.eval(x1);
    const Vec f2 = s.eval(x2);
    const Vec whole = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
    out.value += s.refine(x0, f0, x1, f1, x2, f2, whole, tol / kPanels, max_depth);
    x0 = x2;
    f0 = f2;
  }
  out.error_estimate = s.error;
  out.evaluations = s.evaluations;
  if (s.depth_exceeded) {
    std::ostringstream os;
    os.precision(17);
    os << "quadrature exceeded max depth " << max_depth << "; best value " << out.value.sum()
       << ", error estimate " << s.error.sum();
    throw NumericalError(os.str(), out.value.sum(), s.error.sum());
  }
  return out;
}

QuadratureResult quadrature(const std::function<double(double)>& f, double a, double b, double tol,
                            int max_depth, long max_evaluations) {
  const std::function<Vec(double)> g = [&f](double x) {
    Vec v(1);
    v(0) = f(x);
    return v;
  };
  const auto r = quadrature_vector(g, a, b, tol, max_depth, max_evaluations);
  return {r.value(0), r.error_estimate(0), r.evaluations};
}

}  // namespace bnsswap
