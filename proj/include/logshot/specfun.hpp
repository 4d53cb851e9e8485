#ifndef LOGSHOT_SPECFUN_HPP
#define LOGSHOT_SPECFUN_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "logshot/errors.hpp"
#include "logshot/quadrature.hpp"

namespace logshot {

namespace detail {

inline bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

constexpr double kPi = 3.14159265358979323846;

}  // namespace detail

// log Gamma(x) for x > 0, via the Lanczos approximation (g = 7, 9 terms)
// with the reflection formula below 0.5.  Accurate to ~1e-14 relative.
inline double ln_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("ln_gamma: argument must be positive");
  static const double c[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,    12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x); sin(pi x) > 0 on (0, 0.5).
    return std::log(detail::kPi / std::sin(detail::kPi * x)) - ln_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double series = c[0];
  for (int i = 1; i < 9; ++i) series += c[i] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * detail::kPi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

// Gamma(x) for non-integer x of either sign (reflection below zero).
// Positive integers are fine too; zero and negative integers are poles.
inline double gamma_signed(double x) {
  if (x > 0.0) return std::exp(ln_gamma(x));
  if (detail::is_integer(x)) throw std::domain_error("gamma_signed: pole at non-positive integer");
  return detail::kPi / (std::sin(detail::kPi * x) * std::exp(ln_gamma(1.0 - x)));
}

// 1 / Gamma(x), entire: zero at the poles of Gamma.
inline double reciprocal_gamma(double x) {
  if (x <= 0.0 && detail::is_integer(x)) return 0.0;
  return 1.0 / gamma_signed(x);
}

// Kummer confluent hypergeometric Phi(a, b; z) = sum_l (a)_l / (b)_l z^l / l!
// by direct term recursion.  Intended for moderate |z| (the series is entire
// but suffers cancellation for large negative z, which we never need).
inline double kummer_phi(double a, double b, double z, std::size_t max_terms = 10000) {
  if (b <= 0.0 && detail::is_integer(b)) {
    throw std::domain_error("kummer_phi: b must not be a non-positive integer");
  }
  double term = 1.0;
  double sum = 1.0;
  int small_streak = 0;
  for (std::size_t l = 0; l < max_terms; ++l) {
    term *= (a + static_cast<double>(l)) /
            ((b + static_cast<double>(l)) * (static_cast<double>(l) + 1.0)) * z;
    sum += term;
    if (std::fabs(term) <= 1e-16 * std::fabs(sum)) {
      if (++small_streak >= 2) return sum;
    } else {
      small_streak = 0;
    }
  }
  throw NumericalError("kummer_phi: series did not converge within term budget");
}

namespace detail {

// Tricomi Psi(a, b; z) for a > 0, z > 0 from the Laplace-type integral
//
//   Psi(a,b;z) = (1/Gamma(a)) int_0^inf e^{-s z} s^{a-1} (1+s)^{b-a-1} ds.
//
// Substituting w = s z concentrates the mass on w = O(a):
//
//   Psi(a,b;z) = z^{-a}/Gamma(a) int_0^inf e^{-w} w^{a-1} (1+w/z)^{b-a-1} dw,
//
// so the working domain is [0, ~45] regardless of z, with panels doubled
// outward until the remainder is negligible relative to the accumulated
// integral.  For a < 1 the endpoint factor w^{a-1} is removed exactly by a
// second substitution v = w^a (w^{a-1} dw = dv / a), leaving an integrand
// that is bounded with vanishing derivative at v = 0.  The integrand is
// positive throughout, so there is no cancellation and the adaptive
// Gauss-Kronrod tolerance translates directly into relative accuracy.
inline double tricomi_psi_integral(double a, double b, double z) {
  const double power = b - a - 1.0;
  const double first_panel = 45.0;
  double integral;
  if (a < 1.0) {
    const double inv_a = 1.0 / a;
    auto fv = [=](double v) {
      const double w = std::pow(v, inv_a);
      return std::exp(-w) * std::pow(1.0 + w / z, power);
    };
    integral = quad::integrate_to_infinity(fv, std::pow(first_panel, a)) * inv_a;
  } else {
    auto fw = [=](double w) {
      return std::exp(-w) * std::pow(w, a - 1.0) * std::pow(1.0 + w / z, power);
    };
    integral = quad::integrate_to_infinity(fw, first_panel);
  }
  return std::exp(-ln_gamma(a)) * std::pow(z, -a) * integral;
}

}  // namespace detail

// Tricomi confluent hypergeometric Psi(a, b; z) for z >= 0, on the parameter
// ranges this library needs.  Branches:
//
//   1. z = 0, b < 0:  Psi -> Gamma(1-b) / Gamma(a-b+1)            (limit)
//   2. a > 0, z > 0:  Laplace integral (see above)
//   3. a <= 0, z > 0: Psi(a,b;z) = z^{1-b} Psi(a+1-b, 2-b; z), which has a
//      positive first parameter whenever b < 1 + a; the integral then applies.
//
// Combinations outside these branches (z = 0 with b >= 0, or a <= 0 with
// a + 1 - b <= 0) are rejected with std::domain_error.
inline double tricomi_psi(double a, double b, double z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z)) {
    throw std::domain_error("tricomi_psi: arguments must be finite");
  }
  if (z < 0.0) throw std::domain_error("tricomi_psi: z must be non-negative");
  if (z == 0.0) {
    if (b < 0.0) {
      const double denom = a - b + 1.0;
      if (denom <= 0.0 && detail::is_integer(denom)) return 0.0;
      return std::exp(ln_gamma(1.0 - b)) * reciprocal_gamma(denom);
    }
    throw std::domain_error("tricomi_psi: z = 0 requires b < 0");
  }
  if (a == 0.0) return 1.0;  // Psi(0, b; z) == 1 identically
  if (a > 0.0) return detail::tricomi_psi_integral(a, b, z);
  const double a2 = a + 1.0 - b;
  if (a2 <= 0.0) {
    throw std::domain_error("tricomi_psi: a <= 0 supported only when a + 1 - b > 0");
  }
  return std::pow(z, 1.0 - b) * detail::tricomi_psi_integral(a2, 2.0 - b, z);
}

// Series representation of Psi in terms of two Kummer functions,
//
//   Psi(a,b;z) = Gamma(1-b)/Gamma(a-b+1) Phi(a,b;z)
//              + Gamma(b-1)/Gamma(a) z^{1-b} Phi(a-b+1, 2-b; z),
//
// valid for non-integer b.  Kept as an independent cross-check of the
// integral evaluation; prefer tricomi_psi() for production use (the series
// loses accuracy as z grows).
inline double tricomi_psi_series(double a, double b, double z) {
  if (detail::is_integer(b)) {
    throw std::domain_error("tricomi_psi_series: b must not be an integer");
  }
  if (!(z > 0.0)) throw std::domain_error("tricomi_psi_series: z must be positive");
  const double coef1 = gamma_signed(1.0 - b) * reciprocal_gamma(a - b + 1.0);
  const double coef2 = gamma_signed(b - 1.0) * reciprocal_gamma(a);
  double result = 0.0;
  if (coef1 != 0.0) result += coef1 * kummer_phi(a, b, z);
  if (coef2 != 0.0) result += coef2 * std::pow(z, 1.0 - b) * kummer_phi(a - b + 1.0, 2.0 - b, z);
  return result;
}

// d/dz Psi(a, b; z) = -a Psi(a+1, b+1; z).  For a = 0 the derivative is
// identically zero (Psi(0,b;z) == 1).
inline double tricomi_psi_derivative(double a, double b, double z) {
  if (a == 0.0) return 0.0;
  return -a * tricomi_psi(a + 1.0, b + 1.0, z);
}

}  // namespace logshot

#endif  // LOGSHOT_SPECFUN_HPP
