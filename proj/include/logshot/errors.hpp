#ifndef LOGSHOT_ERRORS_HPP
#define LOGSHOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace logshot {

// Raised when an algorithm fails to reach its accuracy target (quadrature
// that does not converge, a covariance factorization that stays indefinite
// after regularization, ...).  Distinct from std::domain_error /
// std::invalid_argument, which signal bad inputs; callers that map errors to
// process exit codes rely on this distinction.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace logshot

#endif  // LOGSHOT_ERRORS_HPP
