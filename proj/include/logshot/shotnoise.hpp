#ifndef LOGSHOT_SHOTNOISE_HPP
#define LOGSHOT_SHOTNOISE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "logshot/kernels.hpp"
#include "logshot/noise.hpp"
#include "logshot/rng.hpp"
#include "logshot/specfun.hpp"

namespace logshot {

// Poisson arrival epochs on (0, horizon] with i.i.d. marks attached later.
struct ArrivalSet {
  double lambda = 0.0;
  double horizon = 0.0;
  std::vector<double> epochs;  // strictly increasing, in (0, horizon]
  std::vector<double> marks;   // empty until attach_marks(); then one per epoch
};

struct PathMeta {
  std::string kernel_id;
  std::string noise_id;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::optional<double> scale_c;  // set for scaled-regime paths
};

// One realized trajectory sampled on a fixed grid.
struct SamplePath {
  std::vector<double> grid;
  std::vector<double> values;
  PathMeta meta;
};

// Simulation request: kernel + marks + rate + evaluation grid.  When `alpha`
// is set the run is in the scaling regime: the kernel must be logarithmic
// with beta = (alpha-1)/2, and `scale_c` gives the time-stretch factor c of
// the normalized process S(c t) / sqrt(c K lambda Gamma(alpha)).
struct SimConfig {
  Kernel kernel;
  NoiseModel noise;
  double lambda = 1.0;
  std::vector<double> grid;
  std::uint64_t seed = 20240;
  std::size_t ensemble_size = 1;
  std::optional<double> alpha;
  std::optional<double> scale_c;
};

namespace detail {

inline void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("grid must be non-empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw std::invalid_argument("grid points must be finite");
    if (grid[i] < 0.0) throw std::invalid_argument("grid points must be non-negative");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }
  if (!(grid.back() > 0.0)) throw std::invalid_argument("grid must reach a positive time");
}

// Run fn(0), ..., fn(n-1) across up to `threads` workers (0 = hardware
// concurrency).  Each index is processed exactly once and writes only its
// own output slot, so results do not depend on the worker count.
template <typename Fn>
void run_indexed(std::size_t n, unsigned threads, const Fn& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned use = threads == 0 ? hw : threads;
  use = static_cast<unsigned>(std::min<std::size_t>(use, n));
  if (use <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(use);
  for (unsigned t = 0; t < use; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Homogeneous Poisson arrivals: cumulative sums of exponential(lambda) gaps,
// truncated at the horizon.  Marks are left empty.
inline ArrivalSet simulate_arrivals(double lambda, double horizon, SplitRng& rng) {
  if (!(lambda > 0.0)) throw std::domain_error("simulate_arrivals: lambda must be positive");
  if (!(horizon > 0.0)) throw std::domain_error("simulate_arrivals: horizon must be positive");
  ArrivalSet out;
  out.lambda = lambda;
  out.horizon = horizon;
  double t = rng.exponential(lambda);
  while (t <= horizon) {
    out.epochs.push_back(t);
    t += rng.exponential(lambda);
  }
  return out;
}

// Draw one mark per epoch from the noise model, in epoch order.
inline void attach_marks(ArrivalSet& arrivals, const NoiseModel& noise, SplitRng& rng) {
  if (!arrivals.marks.empty()) {
    throw std::invalid_argument("attach_marks: marks are already attached");
  }
  arrivals.marks.reserve(arrivals.epochs.size());
  for (double u : arrivals.epochs) arrivals.marks.push_back(noise.sample(u, rng));
}

// Evaluate the shot-noise path S(t) = sum_{T_j <= t} g(t, T_j) R_j on the
// grid.  Cost is O(#grid x #arrivals); the arrival prefix relevant to each
// grid point is located by binary search.  A grid point at t = 0 is fine and
// evaluates to 0 (no arrivals can precede it).
inline SamplePath evaluate_path(const ArrivalSet& arrivals, const Kernel& kernel,
                                const std::vector<double>& grid) {
  detail::validate_grid(grid);
  if (arrivals.marks.size() != arrivals.epochs.size()) {
    throw std::invalid_argument("evaluate_path: marks are not attached");
  }
  if (grid.back() > arrivals.horizon) {
    throw std::domain_error("evaluate_path: grid extends beyond the simulated horizon");
  }
  const bool log_family = kernel.family() == KernelFamily::Logarithmic;
  const double beta = kernel.beta();
  std::vector<double> log_epochs;
  if (log_family) {
    log_epochs.reserve(arrivals.epochs.size());
    for (double u : arrivals.epochs) log_epochs.push_back(std::log(u));
  }
  SamplePath path;
  path.grid = grid;
  path.values.resize(grid.size(), 0.0);
  path.meta.kernel_id = kernel.id();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const auto end = std::upper_bound(arrivals.epochs.begin(), arrivals.epochs.end(), t);
    const std::size_t count = static_cast<std::size_t>(end - arrivals.epochs.begin());
    double acc = 0.0;
    if (log_family) {
      const double log_t = std::log(t > 0.0 ? t : 1.0);  // t = 0 has count = 0
      for (std::size_t j = 0; j < count; ++j) {
        const double r = log_t - log_epochs[j];
        if (r > 0.0) acc += std::pow(r, beta) * arrivals.marks[j];
      }
    } else {
      for (std::size_t j = 0; j < count; ++j) {
        const double lag = t - arrivals.epochs[j];
        if (lag > 0.0) acc += std::pow(lag, beta) * arrivals.marks[j];
      }
    }
    if (!std::isfinite(acc)) throw NumericalError("evaluate_path: non-finite path value");
    path.values[i] = acc;
  }
  return path;
}

namespace detail {

inline void validate_config(const SimConfig& config) {
  if (!(config.lambda > 0.0)) throw std::domain_error("SimConfig: lambda must be positive");
  validate_grid(config.grid);
  if (config.ensemble_size == 0) throw std::invalid_argument("SimConfig: ensemble_size must be >= 1");
  if (config.scale_c && !config.alpha) {
    throw std::invalid_argument("SimConfig: scale_c requires alpha");
  }
  if (config.alpha) {
    const double alpha = *config.alpha;
    if (!(alpha > 1.0) || !(alpha < 2.0)) {
      throw std::domain_error("SimConfig: alpha must lie in (1, 2)");
    }
    if (config.kernel.family() != KernelFamily::Logarithmic) {
      throw std::invalid_argument("SimConfig: the scaling regime uses the logarithmic kernel");
    }
    if (std::fabs(config.kernel.beta() - (alpha - 1.0) / 2.0) > 1e-12) {
      throw std::invalid_argument("SimConfig: kernel beta must equal (alpha - 1)/2");
    }
  }
  if (config.scale_c && !(*config.scale_c >= 1.0)) {
    throw std::domain_error("SimConfig: scale_c must be >= 1");
  }
  const double c = config.scale_c ? *config.scale_c : 1.0;
  if (c * config.grid.back() > config.noise.admissible_horizon()) {
    throw std::domain_error("SimConfig: simulation horizon exceeds the noise model's validity");
  }
}

}  // namespace detail

// One path of the normalized scaled process
//   S(c t) / sqrt(c K lambda Gamma(alpha)),   K = lim K2,
// evaluated at the (unscaled) grid times.  Arrivals live on (0, c * max(grid)].
inline SamplePath simulate_scaled(const SimConfig& config, SplitRng& rng) {
  detail::validate_config(config);
  if (!config.alpha || !config.scale_c) {
    throw std::invalid_argument("simulate_scaled: config must set alpha and scale_c");
  }
  const auto K = config.noise.limit_variance();
  if (!K || !(*K > 0.0)) {
    throw std::domain_error("simulate_scaled: noise model must have a positive variance limit");
  }
  const double c = *config.scale_c;
  ArrivalSet arrivals = simulate_arrivals(config.lambda, c * config.grid.back(), rng);
  attach_marks(arrivals, config.noise, rng);
  std::vector<double> scaled_grid;
  scaled_grid.reserve(config.grid.size());
  for (double t : config.grid) scaled_grid.push_back(c * t);
  SamplePath path = evaluate_path(arrivals, config.kernel, scaled_grid);
  const double norm =
      std::sqrt(c * (*K) * config.lambda * std::exp(ln_gamma(*config.alpha)));
  for (double& v : path.values) v /= norm;
  path.grid = config.grid;
  path.meta.noise_id = config.noise.id();
  path.meta.seed = config.seed;
  path.meta.scale_c = c;
  return path;
}

// Ensemble of independent paths.  Path m uses its own generator derived from
// (seed, m), so the ensemble is reproducible bit-for-bit regardless of the
// worker count and regardless of which paths are generated first.
inline std::vector<SamplePath> simulate_ensemble(const SimConfig& config, unsigned threads = 0) {
  detail::validate_config(config);
  std::vector<SamplePath> paths(config.ensemble_size);
  const bool scaled = config.alpha && config.scale_c;
  detail::run_indexed(config.ensemble_size, threads, [&](std::size_t m) {
    SplitRng rng(config.seed, m);
    if (scaled) {
      paths[m] = simulate_scaled(config, rng);
    } else {
      ArrivalSet arrivals = simulate_arrivals(config.lambda, config.grid.back(), rng);
      attach_marks(arrivals, config.noise, rng);
      paths[m] = evaluate_path(arrivals, config.kernel, config.grid);
      paths[m].meta.noise_id = config.noise.id();
      paths[m].meta.seed = config.seed;
    }
    paths[m].meta.stream = m;
  });
  return paths;
}

}  // namespace logshot

#endif  // LOGSHOT_SHOTNOISE_HPP
