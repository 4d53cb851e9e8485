#ifndef LOGSHOT_KERNELS_HPP
#define LOGSHOT_KERNELS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace logshot {

enum class KernelFamily { Logarithmic, Polynomial };

// Response kernel applied to each arrival: the weight a shot that arrived at
// time u contributes to the process value at time t >= u.
//
//   Logarithmic: (log(t/u))_+^beta   -- weight depends only on the ratio t/u,
//                                       so paths are invariant under time
//                                       rescaling of both arguments.
//   Polynomial:  (t - u)_+^beta      -- classical comparator; weight depends
//                                       only on the lag t - u.
//
// beta must lie strictly inside (0, 1/2); the endpoints change the scaling
// regime and are rejected.
class Kernel {
 public:
  Kernel(KernelFamily family, double beta) : family_(family), beta_(beta) {
    if (!(beta > 0.0) || !(beta < 0.5)) {
      throw std::domain_error("Kernel: beta must lie in the open interval (0, 0.5)");
    }
  }

  static Kernel logarithmic(double beta) { return Kernel(KernelFamily::Logarithmic, beta); }
  static Kernel polynomial(double beta) { return Kernel(KernelFamily::Polynomial, beta); }

  // Kernel value g(t, u) for an arrival at u observed at t.  Requires
  // positive arguments; returns 0 whenever the shot has not started yet
  // (t <= u for the polynomial family, t/u <= 1 for the logarithmic one).
  double operator()(double t, double u) const {
    if (!(t > 0.0) || !(u > 0.0)) {
      throw std::domain_error("Kernel: evaluation requires positive times");
    }
    if (family_ == KernelFamily::Logarithmic) {
      const double r = std::log(t / u);
      return r > 0.0 ? std::pow(r, beta_) : 0.0;
    }
    const double lag = t - u;
    return lag > 0.0 ? std::pow(lag, beta_) : 0.0;
  }

  KernelFamily family() const { return family_; }
  double beta() const { return beta_; }

  std::string id() const {
    return (family_ == KernelFamily::Logarithmic ? std::string("log(beta=")
                                                 : std::string("poly(beta=")) +
           std::to_string(beta_) + ")";
  }

 private:
  KernelFamily family_;
  double beta_;
};

}  // namespace logshot

#endif  // LOGSHOT_KERNELS_HPP
