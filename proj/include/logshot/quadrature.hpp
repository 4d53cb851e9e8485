#ifndef LOGSHOT_QUADRATURE_HPP
#define LOGSHOT_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "logshot/errors.hpp"

namespace logshot {
namespace quad {

// 15-point Kronrod rule with embedded 7-point Gauss rule (classic QUADPACK
// dqk15 constants).  Nodes are symmetric about the midpoint and never touch
// the interval endpoints, so integrable endpoint singularities are safe to
// evaluate.
namespace detail {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double kronrod;  // 15-point estimate
  double err;      // |kronrod - gauss|, used as the local error proxy
};

template <typename F>
PanelResult kronrod15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {resk * half, std::fabs((resk - resg) * half)};
}

struct Interval {
  double a, b, value, err;
  bool operator<(const Interval& o) const { return err < o.err; }
};

}  // namespace detail

// Globally adaptive integration of f over [a, b]: repeatedly bisect the
// interval with the largest local error until the total error estimate meets
// max(abs_tol, rel_tol * |integral|), or the interval budget is exhausted.
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-12,
                 double abs_tol = 0.0, std::size_t max_intervals = 4000) {
  if (a == b) return 0.0;
  std::priority_queue<detail::Interval> heap;
  auto first = detail::kronrod15(f, a, b);
  heap.push({a, b, first.kronrod, first.err});
  double total = first.kronrod;
  double total_err = first.err;
  std::size_t n = 1;
  // NaN poisons every comparison below (all come out false), so reject it
  // explicitly rather than returning it as a converged answer.
  if (!std::isfinite(total) || !std::isfinite(total_err)) {
    throw NumericalError("quad::integrate: integrand produced a non-finite value");
  }
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (n >= max_intervals || heap.empty()) {
      throw NumericalError("quad::integrate: failed to converge to requested tolerance");
    }
    const detail::Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval is at floating-point resolution; accept its estimate as-is.
      total_err -= worst.err;
      continue;
    }
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    if (!std::isfinite(left.kronrod) || !std::isfinite(right.kronrod)) {
      throw NumericalError("quad::integrate: integrand produced a non-finite value");
    }
    total += left.kronrod + right.kronrod - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push({worst.a, mid, left.kronrod, left.err});
    heap.push({mid, worst.b, right.kronrod, right.err});
    ++n;
  }
  return total;
}

// Integration over [0, inf) for integrands that decay at least exponentially
// beyond `first_panel`: integrate [0, first_panel] adaptively, then keep
// doubling panels outward until a panel contributes less than `tail_rel`
// of the accumulated value.
template <typename F>
double integrate_to_infinity(const F& f, double first_panel, double rel_tol = 1e-12,
                             double tail_rel = 1e-16, int max_panels = 48) {
  double acc = integrate(f, 0.0, first_panel, rel_tol);
  double lo = first_panel;
  for (int p = 0; p < max_panels; ++p) {
    const double hi = 2.0 * lo;
    const double piece = integrate(f, lo, hi, rel_tol, std::fabs(acc) * tail_rel);
    acc += piece;
    if (std::fabs(piece) <= std::fabs(acc) * tail_rel) return acc;
    lo = hi;
  }
  throw NumericalError("quad::integrate_to_infinity: tail did not become negligible");
}

}  // namespace quad
}  // namespace logshot

#endif  // LOGSHOT_QUADRATURE_HPP
