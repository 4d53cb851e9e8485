#ifndef LOGSHOT_HFBM_HPP
#define LOGSHOT_HFBM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "logshot/rng.hpp"
#include "logshot/shotnoise.hpp"
#include "logshot/specfun.hpp"

namespace logshot {

// Normalization constant c_alpha = 2^{1-alpha} sqrt(pi) / Gamma(alpha/2).
// By the Legendre duplication formula this equals Gamma((alpha+1)/2) /
// Gamma(alpha), which is the combination the shot-noise covariances produce.
inline double c_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("c_alpha: alpha must be positive");
  return std::pow(2.0, 1.0 - alpha) * std::sqrt(detail::kPi) * std::exp(-ln_gamma(alpha / 2.0));
}

// Parameters of the log-scale-invariant Gaussian process B(t) with
// covariance
//   Cov(B(s), B(t)) = c_alpha min(s,t) Psi((1-alpha)/2, 1-alpha; log(max/min)),
//   Var(B(t)) = t,
// self-similar of index 1/2, for alpha in (0,1) u (1,2).  alpha = 1 is the
// ordinary Brownian case with covariance min(s,t); it is excluded from the
// main constructor and available through the brownian() factory instead.
class HfbmParams {
 public:
  explicit HfbmParams(double alpha) : alpha_(alpha), brownian_(false) {
    if (!(alpha > 0.0) || !(alpha < 2.0) || alpha == 1.0) {
      throw std::domain_error("HfbmParams: alpha must lie in (0,1) or (1,2)");
    }
  }

  static HfbmParams brownian() {
    HfbmParams p;
    return p;
  }

  double alpha() const {
    if (brownian_) throw std::logic_error("HfbmParams: Brownian case has no alpha");
    return alpha_;
  }
  bool is_brownian() const { return brownian_; }

 private:
  HfbmParams() : alpha_(1.0), brownian_(true) {}
  double alpha_;
  bool brownian_;
};

// Covariance Cov(B(s), B(t)) for s, t > 0.  Symmetric in its arguments; the
// diagonal is exactly t.
inline double hfbm_cov(const HfbmParams& params, double s, double t) {
  if (!(s > 0.0) || !(t > 0.0)) throw std::domain_error("hfbm_cov: times must be positive");
  if (params.is_brownian()) return std::min(s, t);
  if (s == t) return t;
  const double lo = std::min(s, t);
  const double hi = std::max(s, t);
  const double alpha = params.alpha();
  return c_alpha(alpha) * lo *
         tricomi_psi((1.0 - alpha) / 2.0, 1.0 - alpha, std::log(hi / lo));
}

// Increment variance rho(s, t) = E[(B(t) - B(s))^2] for 0 <= s <= t,
// with B(0) = 0:  rho(0, t) = t and rho(s, t) = t + s - 2 Cov(s, t).
inline double increment_variance(const HfbmParams& params, double s, double t) {
  if (!(s >= 0.0) || !(t >= s)) {
    throw std::domain_error("increment_variance: need 0 <= s <= t");
  }
  if (t == 0.0) return 0.0;
  if (s == 0.0) return t;
  return t + s - 2.0 * hfbm_cov(params, s, t);
}

// Dense symmetric covariance matrix on a strictly increasing positive grid,
// stored row-major, together with its (regularized, if needed) lower
// Cholesky factor.  Construction fails with NumericalError if the matrix
// stays indefinite after the jitter ladder -- that would indicate a bug, the
// covariance function is positive semi-definite by construction.
struct CovMatrix {
  std::vector<double> grid;
  std::vector<double> entries;         // n x n, row-major
  std::vector<double> cholesky_lower;  // n x n, row-major, lower triangle
  double jitter = 0.0;                 // diagonal regularization actually used

  std::size_t size() const { return grid.size(); }
  double at(std::size_t i, std::size_t j) const { return entries[i * grid.size() + j]; }
};

namespace detail {

// Plain lower Cholesky; returns false if a pivot is not positive.
inline bool try_cholesky(const std::vector<double>& a, std::size_t n, std::vector<double>& lower) {
  lower.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) sum -= lower[i * n + k] * lower[j * n + k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        lower[i * n + i] = std::sqrt(sum);
      } else {
        lower[i * n + j] = sum / lower[j * n + j];
      }
    }
  }
  return true;
}

}  // namespace detail

// Build the covariance matrix on `grid` and factor it.  A leading grid time
// of exactly 0 is not allowed here (B(0) = 0 deterministically); sample_hfbm
// handles that case by augmentation.
inline CovMatrix cov_matrix(const HfbmParams& params, const std::vector<double>& grid) {
  detail::validate_grid(grid);
  if (!(grid.front() > 0.0)) {
    throw std::invalid_argument("cov_matrix: grid times must be strictly positive");
  }
  const std::size_t n = grid.size();
  CovMatrix cov;
  cov.grid = grid;
  cov.entries.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    cov.entries[i * n + i] = grid[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double v = hfbm_cov(params, grid[j], grid[i]);
      cov.entries[i * n + j] = v;
      cov.entries[j * n + i] = v;
    }
  }
  // Jitter ladder: exact factorization first, then two regularized retries.
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += cov.entries[i * n + i];
  const double scale = trace / static_cast<double>(n);
  const double ladder[3] = {0.0, 1e-14 * scale, 1e-12 * scale};
  std::vector<double> work = cov.entries;
  for (double jitter : ladder) {
    for (std::size_t i = 0; i < n; ++i) work[i * n + i] = cov.entries[i * n + i] + jitter;
    if (detail::try_cholesky(work, n, cov.cholesky_lower)) {
      cov.jitter = jitter;
      return cov;
    }
  }
  throw NumericalError("cov_matrix: covariance is not positive definite after regularization");
}

// Exact Gaussian sampling of the process on `grid` (which may start at 0):
// values = L z with z i.i.d. standard normal, path m seeded by (seed, m).
inline std::vector<SamplePath> sample_hfbm(const HfbmParams& params,
                                           const std::vector<double>& grid,
                                           std::size_t ensemble_size, std::uint64_t seed,
                                           unsigned threads = 0) {
  detail::validate_grid(grid);
  if (ensemble_size == 0) throw std::invalid_argument("sample_hfbm: ensemble_size must be >= 1");
  const bool has_zero = grid.front() == 0.0;
  std::vector<double> positive(grid.begin() + (has_zero ? 1 : 0), grid.end());
  const CovMatrix cov = cov_matrix(params, positive);
  const std::size_t n = positive.size();
  std::vector<SamplePath> paths(ensemble_size);
  detail::run_indexed(ensemble_size, threads, [&](std::size_t m) {
    SplitRng rng(seed, m);
    std::vector<double> z(n);
    for (auto& v : z) v = rng.normal();
    SamplePath& path = paths[m];
    path.grid = grid;
    path.values.assign(grid.size(), 0.0);
    const std::size_t offset = has_zero ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= i; ++k) acc += cov.cholesky_lower[i * n + k] * z[k];
      path.values[i + offset] = acc;
    }
    path.meta.kernel_id = params.is_brownian()
                              ? std::string("brownian")
                              : "hfbm(alpha=" + std::to_string(params.alpha()) + ")";
    path.meta.seed = seed;
    path.meta.stream = m;
  });
  return paths;
}

}  // namespace logshot

#endif  // LOGSHOT_HFBM_HPP
