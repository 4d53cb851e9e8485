#ifndef LOGSHOT_ANALYSIS_HPP
#define LOGSHOT_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "logshot/hfbm.hpp"
#include "logshot/kernels.hpp"
#include "logshot/noise.hpp"
#include "logshot/quadrature.hpp"
#include "logshot/shotnoise.hpp"
#include "logshot/specfun.hpp"

namespace logshot {

namespace detail {

inline void check_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 0.5)) {
    throw std::domain_error("beta must lie in the open interval (0, 0.5)");
  }
}

inline void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
}

inline void order_times(double& s, double& t) {
  if (!(s > 0.0) || !(t > 0.0)) throw std::domain_error("times must be positive");
  if (s > t) std::swap(s, t);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Closed-form covariances of the logarithmic-kernel shot noise
//   S(t) = sum_{T_j <= t} (log(t/T_j))^beta R_j,
// which all reduce to Tricomi Psi evaluations.  Arguments may be passed in
// either order; both must be positive.
// ---------------------------------------------------------------------------

// Constant mark variance K2: Cov(S(s), S(t)) =
//   Gamma(beta+1) s K2 lambda Psi(-beta, -2 beta; log(t/s)),  s <= t.
// The diagonal reduces to Var(S(t)) = lambda K2 Gamma(2 beta + 1) t.
inline double cov_closed_form_independent(double beta, double lambda, double k2, double s,
                                          double t) {
  detail::check_beta(beta);
  detail::check_lambda(lambda);
  if (!(k2 > 0.0)) throw std::domain_error("cov_closed_form_independent: k2 must be positive");
  detail::order_times(s, t);
  return std::exp(ln_gamma(beta + 1.0)) * s * k2 * lambda *
         tricomi_psi(-beta, -2.0 * beta, std::log(t / s));
}

// Mark variance K2(u) = K + u^{-gamma}, gamma in [0, 1):
//   Cov = Gamma(beta+1) s lambda [ K Psi(-beta,-2beta; L)
//         + (1-gamma)^{-2beta-1} s^{-gamma} Psi(-beta,-2beta; (1-gamma) L) ].
inline double cov_closed_form_powerlaw(double beta, double lambda, double K, double gamma,
                                       double s, double t) {
  detail::check_beta(beta);
  detail::check_lambda(lambda);
  if (!(K > 0.0)) throw std::domain_error("cov_closed_form_powerlaw: K must be positive");
  if (!(gamma >= 0.0) || !(gamma < 1.0)) {
    throw std::domain_error("cov_closed_form_powerlaw: gamma must lie in [0, 1)");
  }
  detail::order_times(s, t);
  const double L = std::log(t / s);
  const double a = -beta, b = -2.0 * beta;
  return std::exp(ln_gamma(beta + 1.0)) * s * lambda *
         (K * tricomi_psi(a, b, L) +
          std::pow(1.0 - gamma, -2.0 * beta - 1.0) * std::pow(s, -gamma) *
              tricomi_psi(a, b, (1.0 - gamma) * L));
}

// Mark variance K2(u) = K - gamma log u (positive over the support (0, s]):
//   Cov = Gamma(beta+1) lambda s (K - gamma log s) Psi(-beta, -2beta; L)
//       + Gamma(beta+2) lambda s gamma Psi(-beta, -2beta-1; L).
inline double cov_closed_form_logdecay(double beta, double lambda, double K, double gamma,
                                       double s, double t) {
  detail::check_beta(beta);
  detail::check_lambda(lambda);
  if (!(K > 0.0)) throw std::domain_error("cov_closed_form_logdecay: K must be positive");
  if (!(gamma > 0.0)) throw std::domain_error("cov_closed_form_logdecay: gamma must be positive");
  detail::order_times(s, t);
  if (!(K - gamma * std::log(s) > 0.0)) {
    throw std::domain_error(
        "cov_closed_form_logdecay: variance profile is not positive over the support");
  }
  const double L = std::log(t / s);
  return std::exp(ln_gamma(beta + 1.0)) * lambda * s * (K - gamma * std::log(s)) *
             tricomi_psi(-beta, -2.0 * beta, L) +
         std::exp(ln_gamma(beta + 2.0)) * lambda * s * gamma *
             tricomi_psi(-beta, -2.0 * beta - 1.0, L);
}

// Polynomial-kernel covariance, evaluated numerically:
//   Cov(X(s), X(t)) = lambda K2 int_0^s (s-x)^beta (t-x)^beta dx,  s <= t.
// No closed form is used; the integral (substituted y = s - x to put the
// weak singularity at the origin) is integrated adaptively.
inline double cov_poly_numeric(double beta, double lambda, double k2, double s, double t) {
  detail::check_beta(beta);
  detail::check_lambda(lambda);
  if (!(k2 > 0.0)) throw std::domain_error("cov_poly_numeric: k2 must be positive");
  detail::order_times(s, t);
  const double d = t - s;
  auto f = [=](double y) { return std::pow(y, beta) * std::pow(d + y, beta); };
  return lambda * k2 * quad::integrate(f, 0.0, s, 1e-12);
}

// Direct adaptive quadrature of the base covariance integral
//   Cov(S(s), S(t)) = lambda int_0^s (log(s/x))^beta (log(t/x))^beta K2(x) dx
// for the logarithmic kernel and an arbitrary mark-variance profile
// (substitution x = s e^{-w} maps it onto [0, inf) with exponential decay).
// This is the reference every closed form above is checked against, and the
// way to get covariances for profiles without a closed form.
inline double cov_quadrature(const NoiseModel& noise, double beta, double lambda, double s,
                             double t) {
  detail::check_beta(beta);
  detail::check_lambda(lambda);
  detail::order_times(s, t);
  if (s > noise.admissible_horizon()) {
    throw std::domain_error("cov_quadrature: s exceeds the noise model's validity horizon");
  }
  const double L = std::log(t / s);
  auto f = [&noise, beta, s, L](double w) {
    return std::pow(w, beta) * std::pow(L + w, beta) * noise.k2(s * std::exp(-w)) *
           std::exp(-w);
  };
  // First panel sized for the slowest decay in play (power-law profiles
  // contribute e^{-(1-gamma) w}).
  double first_panel = 45.0;
  if (noise.variant() == NoiseModel::Variant::PowerLaw && noise.param_gamma() > 0.0) {
    first_panel = 45.0 / (1.0 - noise.param_gamma());
  }
  return lambda * s * quad::integrate_to_infinity(f, first_panel);
}

// ---------------------------------------------------------------------------
// Ensemble estimators
// ---------------------------------------------------------------------------

struct EstimatorReport {
  std::string quantity;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::optional<double> target;
  std::optional<double> z_score;  // (estimate - target) / std_error
};

namespace detail {

inline std::size_t grid_index_of(const SamplePath& path, double time) {
  for (std::size_t i = 0; i < path.grid.size(); ++i) {
    const double g = path.grid[i];
    if (std::fabs(g - time) <= 1e-9 * std::max(1.0, std::fabs(time))) return i;
  }
  throw std::invalid_argument("requested time is not a grid point of the ensemble");
}

inline void check_common_grid(const std::vector<SamplePath>& paths) {
  if (paths.size() < 2) throw std::invalid_argument("ensemble must contain at least 2 paths");
  for (const auto& p : paths) {
    if (p.grid.size() != paths.front().grid.size()) {
      throw std::invalid_argument("ensemble paths do not share a common grid");
    }
  }
}

}  // namespace detail

// Unbiased sample covariance of the path values at grid times s and t, with
// the Monte Carlo standard error of the estimate.  When a target is given,
// the z-score (estimate - target) / std_error is filled in.
inline EstimatorReport empirical_cov(const std::vector<SamplePath>& paths, double s, double t,
                                     std::optional<double> target = std::nullopt) {
  detail::check_common_grid(paths);
  const std::size_t is = detail::grid_index_of(paths.front(), s);
  const std::size_t it = detail::grid_index_of(paths.front(), t);
  const std::size_t m = paths.size();
  double mean_s = 0.0, mean_t = 0.0;
  for (const auto& p : paths) {
    mean_s += p.values[is];
    mean_t += p.values[it];
  }
  mean_s /= static_cast<double>(m);
  mean_t /= static_cast<double>(m);
  // Products of deviations; their spread gives the standard error.
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& p : paths) {
    const double prod = (p.values[is] - mean_s) * (p.values[it] - mean_t);
    sum += prod;
    sum_sq += prod * prod;
  }
  const double estimate = sum / static_cast<double>(m - 1);
  const double prod_mean = sum / static_cast<double>(m);
  const double prod_var = std::max(0.0, sum_sq / static_cast<double>(m) - prod_mean * prod_mean);
  EstimatorReport report;
  report.quantity = "cov(" + std::to_string(s) + "," + std::to_string(t) + ")";
  report.estimate = estimate;
  report.std_error = std::sqrt(prod_var / static_cast<double>(m));
  report.n_samples = m;
  if (target) {
    report.target = target;
    report.z_score = (estimate - *target) / report.std_error;
  }
  return report;
}

struct MarginalMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double variance_std_error = 0.0;  // MC standard error of the variance estimate
};

inline MarginalMoments empirical_moments(const std::vector<SamplePath>& paths,
                                         std::size_t grid_index) {
  detail::check_common_grid(paths);
  if (grid_index >= paths.front().grid.size()) {
    throw std::invalid_argument("empirical_moments: grid index out of range");
  }
  const double m = static_cast<double>(paths.size());
  double mean = 0.0;
  for (const auto& p : paths) mean += p.values[grid_index];
  mean /= m;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const auto& p : paths) {
    const double d = p.values[grid_index] - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= m;
  m3 /= m;
  m4 /= m;
  MarginalMoments out;
  out.mean = mean;
  out.variance = m2 * m / (m - 1.0);
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  out.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  // Var(sample variance) = (mu4 - sigma^4 (M-3)/(M-1)) / M.
  const double var_of_var = std::max(0.0, (m4 - m2 * m2 * (m - 3.0) / (m - 1.0)) / m);
  out.variance_std_error = std::sqrt(var_of_var);
  return out;
}

// Variance of the ensemble at a given grid time, with target comparison.
inline EstimatorReport empirical_variance(const std::vector<SamplePath>& paths, double t,
                                          std::optional<double> target = std::nullopt) {
  const std::size_t idx = detail::grid_index_of(paths.front(), t);
  const MarginalMoments mm = empirical_moments(paths, idx);
  EstimatorReport report;
  report.quantity = "var(" + std::to_string(t) + ")";
  report.estimate = mm.variance;
  report.std_error = mm.variance_std_error;
  report.n_samples = paths.size();
  if (target) {
    report.target = target;
    report.z_score = (mm.variance - *target) / mm.variance_std_error;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Autocorrelation and quadratic variation
// ---------------------------------------------------------------------------

// Corr(S(t), S(t+tau)) for the constant-variance logarithmic-kernel process:
//   (Gamma(beta+1)/Gamma(2beta+1)) (1+tau/t)^{-1/2} Psi(-beta,-2beta; log(1+tau/t)).
// Depends on (t, tau) only through tau/t and equals 1 at tau = 0.
inline double autocorrelation_closed_form(double beta, double t, double tau) {
  detail::check_beta(beta);
  if (!(t > 0.0)) throw std::domain_error("autocorrelation_closed_form: t must be positive");
  if (!(tau >= 0.0)) throw std::domain_error("autocorrelation_closed_form: tau must be >= 0");
  const double ratio = tau / t;
  return std::exp(ln_gamma(beta + 1.0) - ln_gamma(2.0 * beta + 1.0)) /
         std::sqrt(1.0 + ratio) *
         tricomi_psi(-beta, -2.0 * beta, std::log1p(ratio));
}

// Expected quadratic variation sum_{k=1}^n E[(S(t_k) - S(t_{k-1}))^2] on the
// uniform grid t_k = T k / n, for constant mark variance k2.
//
//   logarithmic: E[dS^2] = lambda k2 [ Gamma(2b+1)(t+s)
//                                      - 2 Gamma(b+1) s Psi(-b,-2b; log(t/s)) ]
//   polynomial:  E[dX^2] = Var(t) + Var(s) - 2 Cov(s,t) with
//                Var(t) = lambda k2 t^{2b+1} / (2b+1) and Cov from
//                cov_poly_numeric.
inline double expected_qv(KernelFamily family, double beta, double lambda, double k2, double T,
                          std::size_t n) {
  detail::check_beta(beta);
  detail::check_lambda(lambda);
  if (!(k2 > 0.0)) throw std::domain_error("expected_qv: k2 must be positive");
  if (!(T > 0.0)) throw std::domain_error("expected_qv: T must be positive");
  if (n == 0) throw std::invalid_argument("expected_qv: n must be >= 1");
  const double h = T / static_cast<double>(n);
  double total = 0.0;
  if (family == KernelFamily::Logarithmic) {
    const double g2 = std::exp(ln_gamma(2.0 * beta + 1.0));
    const double g1 = std::exp(ln_gamma(beta + 1.0));
    total = g2 * h;  // first increment: Var(S(t_1))
    for (std::size_t k = 2; k <= n; ++k) {
      const double t = h * static_cast<double>(k);
      const double s = h * static_cast<double>(k - 1);
      const double z = std::log(static_cast<double>(k) / static_cast<double>(k - 1));
      total += g2 * (t + s) - 2.0 * g1 * s * tricomi_psi(-beta, -2.0 * beta, z);
    }
    return lambda * k2 * total;
  }
  const double p = 2.0 * beta + 1.0;
  total = lambda * k2 * std::pow(h, p) / p;  // first increment
  for (std::size_t k = 2; k <= n; ++k) {
    const double t = h * static_cast<double>(k);
    const double s = h * static_cast<double>(k - 1);
    const double var_sum = lambda * k2 * (std::pow(t, p) + std::pow(s, p)) / p;
    total += var_sum - 2.0 * cov_poly_numeric(beta, lambda, k2, s, t);
  }
  return total;
}

// Realized quadratic variation of one path on its (uniform) grid.
inline double empirical_qv(const SamplePath& path) {
  if (path.grid.size() < 2) throw std::invalid_argument("empirical_qv: need at least 2 points");
  const double h = path.grid[1] - path.grid[0];
  for (std::size_t i = 1; i < path.grid.size(); ++i) {
    const double step = path.grid[i] - path.grid[i - 1];
    if (std::fabs(step - h) > 1e-9 * std::max(1.0, std::fabs(h))) {
      throw std::invalid_argument("empirical_qv: grid is not uniform");
    }
  }
  double total = 0.0;
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    const double d = path.values[i] - path.values[i - 1];
    total += d * d;
  }
  return total;
}

// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_loglog_slope: need matching vectors of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::domain_error("fit_loglog_slope: data must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Scaling-limit diagnostics
// ---------------------------------------------------------------------------

// Diagnostics of the normalized process at one time stretch c: empirical
// covariance matrix on the grid, its distance to the limit covariance, and
// the marginal shape statistics that should vanish as c grows.
struct ScaleDiagnostics {
  double c = 0.0;
  std::vector<double> cov;  // n x n, row-major
  double max_abs_distance = 0.0;
  double frobenius_distance = 0.0;
  std::vector<double> skewness;
  std::vector<double> excess_kurtosis;
};

struct ConvergenceReport {
  double alpha = 0.0;
  double lambda = 0.0;
  std::string noise_id;
  std::size_t ensemble_size = 0;
  std::uint64_t seed = 0;
  std::vector<double> grid;
  std::vector<double> target_cov;  // n x n limit covariance, row-major
  std::vector<ScaleDiagnostics> per_scale;
};

// Simulate the normalized scaled process at each requested stretch c and
// compare its empirical covariance to the limit covariance matrix.
//
// Hypotheses checked up front: alpha in (1, 2); the mark variance K2 is
// bounded with a positive limit (profiles that blow up near zero or have no
// limit are rejected); the mark law has bounded kurtosis ratio (always true
// for the laws on offer).
inline ConvergenceReport convergence_report(double alpha, double lambda, const NoiseModel& noise,
                                            const std::vector<double>& grid,
                                            const std::vector<double>& scales, std::size_t M,
                                            std::uint64_t seed, unsigned threads = 0) {
  if (!(alpha > 1.0) || !(alpha < 2.0)) {
    throw std::domain_error("convergence_report: alpha must lie in (1, 2)");
  }
  detail::check_lambda(lambda);
  detail::validate_grid(grid);
  if (!(grid.front() > 0.0)) {
    throw std::invalid_argument("convergence_report: grid times must be positive");
  }
  if (scales.empty()) throw std::invalid_argument("convergence_report: scales must be non-empty");
  for (double c : scales) {
    if (!(c >= 1.0)) throw std::domain_error("convergence_report: scales must be >= 1");
  }
  if (M < 2) throw std::invalid_argument("convergence_report: need at least 2 paths");
  const auto K = noise.limit_variance();
  if (!K || !(*K > 0.0) || !noise.bounded_variance()) {
    throw std::domain_error(
        "convergence_report: noise must have bounded variance with a positive limit");
  }

  const std::size_t n = grid.size();
  ConvergenceReport report;
  report.alpha = alpha;
  report.lambda = lambda;
  report.noise_id = noise.id();
  report.ensemble_size = M;
  report.seed = seed;
  report.grid = grid;
  report.target_cov = cov_matrix(HfbmParams(alpha), grid).entries;

  for (double c : scales) {
    SimConfig config{Kernel::logarithmic((alpha - 1.0) / 2.0), noise, lambda, grid,
                     seed,                                     M,     alpha,  c};
    const std::vector<SamplePath> paths = simulate_ensemble(config, threads);
    ScaleDiagnostics diag;
    diag.c = c;
    diag.cov.assign(n * n, 0.0);
    std::vector<double> mean(n, 0.0);
    for (const auto& p : paths) {
      for (std::size_t i = 0; i < n; ++i) mean[i] += p.values[i];
    }
    for (auto& v : mean) v /= static_cast<double>(M);
    for (const auto& p : paths) {
      for (std::size_t i = 0; i < n; ++i) {
        const double di = p.values[i] - mean[i];
        for (std::size_t j = 0; j <= i; ++j) {
          diag.cov[i * n + j] += di * (p.values[j] - mean[j]);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        diag.cov[i * n + j] /= static_cast<double>(M - 1);
        diag.cov[j * n + i] = diag.cov[i * n + j];
      }
    }
    double frob = 0.0, max_abs = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
      const double d = diag.cov[k] - report.target_cov[k];
      frob += d * d;
      max_abs = std::max(max_abs, std::fabs(d));
    }
    diag.max_abs_distance = max_abs;
    diag.frobenius_distance = std::sqrt(frob);
    diag.skewness.resize(n);
    diag.excess_kurtosis.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const MarginalMoments mm = empirical_moments(paths, i);
      diag.skewness[i] = mm.skewness;
      diag.excess_kurtosis[i] = mm.excess_kurtosis;
    }
    report.per_scale.push_back(std::move(diag));
  }
  return report;
}

}  // namespace logshot

#endif  // LOGSHOT_ANALYSIS_HPP
