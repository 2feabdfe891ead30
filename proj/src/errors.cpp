#include "bnsswap/errors.hpp"

#include <sstream>

namespace bnsswap {

NumericalError::NumericalError(const std::string& what, double best_value, double achieved_error)
    : Error(what), best_value_(best_value), achieved_error_(achieved_error) {}

namespace {
std::string infeasible_message(double k, double k_min, double k_max) {
  std::ostringstream os;
  os.precision(17);
  os << "target return k = " << k << " is not attainable with unit-norm fully invested weights; "
     << "attainable interval is [" << k_min << ", " << k_max << "]";
  return os.str();
}
}  // namespace

InfeasibleTargetError::InfeasibleTargetError(double k, double k_min, double k_max)
    : Error(infeasible_message(k, k_min, k_max)), k_min_(k_min), k_max_(k_max) {}

}  // namespace bnsswap
