// logshot: command-line front end for the shot-noise / scaling-limit library.
//
// Subcommands:
//   simulate   sample paths of the shot-noise process (optionally paired
//              logarithmic/polynomial paths on shared arrivals and marks)
//   cov        closed-form covariances vs Monte Carlo estimates
//   qv         expected and realized quadratic variation across grid
//              refinements, with log-log slope fits
//   limit      scaling-limit diagnostics: empirical covariance of the
//              normalized process against the limit covariance
//   hfbm       exact Gaussian samples of the limit process, plus an
//              increment-variance property checker
//
// Exit codes: 0 success, 2 invalid configuration or I/O failure,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "logshot/logshot.hpp"

namespace {

using nlohmann::json;
using namespace logshot;

// ---------------------------------------------------------------------------
// Small parsing helpers
// ---------------------------------------------------------------------------

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": cannot parse '" + text + "' as a number");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw std::invalid_argument(what + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = text.find(sep, begin);
    parts.push_back(text.substr(begin, end == std::string::npos ? end : end - begin));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return parts;
}

// Grid specification "start:stop:points" -> inclusive linear grid.
std::vector<double> parse_grid_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) {
    throw std::invalid_argument("--grid expects start:stop:points, got '" + spec + "'");
  }
  const double start = parse_number(parts[0], "--grid start");
  const double stop = parse_number(parts[1], "--grid stop");
  const double points_raw = parse_number(parts[2], "--grid points");
  const std::size_t points = static_cast<std::size_t>(points_raw);
  if (points_raw != static_cast<double>(points) || points == 0) {
    throw std::invalid_argument("--grid points must be a positive integer");
  }
  if (start < 0.0) throw std::invalid_argument("--grid start must be >= 0");
  if (points == 1) {
    if (stop != start) {
      throw std::invalid_argument("--grid with a single point needs start == stop");
    }
    return {start};
  }
  if (!(stop > start)) throw std::invalid_argument("--grid needs stop > start");
  std::vector<double> grid(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = start + step * static_cast<double>(i);
  grid.back() = stop;
  return grid;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) {
    values.push_back(parse_number(part, what));
  }
  return values;
}

std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> values;
  for (double v : parse_double_list(text, what)) {
    const auto n = static_cast<std::size_t>(v);
    if (static_cast<double>(n) != v || n == 0) {
      throw std::invalid_argument(what + ": entries must be positive integers");
    }
    values.push_back(n);
  }
  return values;
}

NoiseLaw parse_law(const std::string& text) {
  if (text == "gaussian") return NoiseLaw::Gaussian;
  if (text == "rademacher") return NoiseLaw::Rademacher;
  throw std::invalid_argument("noise law must be 'gaussian' or 'rademacher', got '" + text + "'");
}

// Noise mini-grammar: variant:key=value,...
//   gaussian-const:<K2>      constant conditional variance, Gaussian marks
//   rademacher-const:<K2>    constant conditional variance, +-sqrt(K2) marks
//   powerlaw:K=..,gamma=..[,law=..]          K2(u) = K + u^{-gamma}
//   bounded-powerlaw:K=..,gamma=..[,law=..]  K2(u) = K + (1+u)^{-gamma}
//   logdecay:K=..,gamma=..[,law=..]          K2(u) = K - gamma log(u)
// The log-decay validity horizon is taken from the simulation context.
NoiseModel parse_noise(const std::string& spec, double horizon) {
  const std::size_t colon = spec.find(':');
  const std::string variant = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (variant == "gaussian-const" || variant == "rademacher-const") {
    if (rest.empty()) throw std::invalid_argument("--noise " + variant + " needs a K2 value");
    const double k2 = parse_number(rest, "--noise K2");
    return NoiseModel::independent(
        k2, variant == "gaussian-const" ? NoiseLaw::Gaussian : NoiseLaw::Rademacher);
  }
  if (variant != "powerlaw" && variant != "bounded-powerlaw" && variant != "logdecay") {
    throw std::invalid_argument("unknown noise variant '" + variant + "'");
  }
  std::optional<double> K, gamma;
  NoiseLaw law = NoiseLaw::Gaussian;
  if (!rest.empty()) {
    for (const auto& pair : split(rest, ',')) {
      const std::size_t eq = pair.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--noise expects key=value pairs, got '" + pair + "'");
      }
      const std::string key = pair.substr(0, eq);
      const std::string value = pair.substr(eq + 1);
      if (key == "K") {
        K = parse_number(value, "--noise K");
      } else if (key == "gamma") {
        gamma = parse_number(value, "--noise gamma");
      } else if (key == "law") {
        law = parse_law(value);
      } else {
        throw std::invalid_argument("unknown noise parameter '" + key + "'");
      }
    }
  }
  if (!K || !gamma) {
    throw std::invalid_argument("--noise " + variant + " needs K=.. and gamma=..");
  }
  if (variant == "powerlaw") return NoiseModel::power_law(*K, *gamma, law);
  if (variant == "bounded-powerlaw") return NoiseModel::bounded_power_law(*K, *gamma, law);
  return NoiseModel::log_decay(*K, *gamma, horizon, law);
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

void emit_output(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("LOGSHOT_OUT_DIR")) {
      path = std::filesystem::path(dir) / path;
    }
  }
  io::write_file_atomic(path, content);
}

std::string fd(double v) { return io::format_double(v); }

struct CommonOpts {
  std::uint64_t seed = 20240;
  std::string out;
  std::string format = "csv";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--seed", o.seed,
                  "RNG seed; every run is a pure function of (flags, seed)")
      ->capture_default_str();
  cmd->add_option("--out", o.out,
                  "output file (written atomically; honors LOGSHOT_OUT_DIR for relative "
                  "paths); defaults to standard output");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--threads", o.threads,
                  "worker-thread cap for ensembles (0 = hardware concurrency); results "
                  "are independent of this setting")
      ->capture_default_str();
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
  CommonOpts common;
  std::string kernel = "log";
  double beta = 0.25;
  double lambda = 1.0;
  std::string noise = "gaussian-const:1";
  std::string grid_spec;
  std::size_t paths = 1;
  bool compare_poly = false;
  double alpha = 0.0;
  double scale = 0.0;
  bool has_alpha = false, has_scale = false, has_beta = false;
};

int run_simulate(const SimulateOpts& o) {
  const std::vector<double> grid = parse_grid_spec(o.grid_spec);
  if (o.has_alpha != o.has_scale) {
    throw std::invalid_argument("--alpha and --scale must be given together");
  }
  // In the rescaled regime beta is pinned to (alpha-1)/2; fill it in when the
  // user did not spell it out.
  const double beta = (o.has_alpha && !o.has_beta) ? (o.alpha - 1.0) / 2.0 : o.beta;
  const double horizon = (o.has_scale ? o.scale : 1.0) * grid.back();
  const NoiseModel noise = parse_noise(o.noise, horizon);
  const Kernel kernel =
      o.kernel == "log" ? Kernel::logarithmic(beta) : Kernel::polynomial(beta);

  if (o.compare_poly) {
    if (o.kernel != "log") {
      throw std::invalid_argument("--compare-poly pairs a polynomial path with a logarithmic "
                                  "one; use --kernel log");
    }
    if (o.paths != 1) {
      throw std::invalid_argument("--compare-poly emits a single paired trajectory; --paths "
                                  "must be 1");
    }
    if (o.has_alpha) {
      throw std::invalid_argument("--compare-poly is not available in the rescaled regime");
    }
    // One set of arrivals and marks, two response functions: the pairing is
    // what makes the roughness contrast visible path by path.
    SplitRng rng(o.common.seed, 0);
    ArrivalSet arrivals = simulate_arrivals(o.lambda, grid.back(), rng);
    attach_marks(arrivals, noise, rng);
    const SamplePath log_path = evaluate_path(arrivals, kernel, grid);
    const SamplePath poly_path = evaluate_path(arrivals, Kernel::polynomial(beta), grid);
    if (o.common.format == "json") {
      json doc;
      doc["seed"] = o.common.seed;
      doc["lambda"] = o.lambda;
      doc["noise"] = noise.id();
      doc["beta"] = beta;
      doc["time"] = grid;
      doc["log_value"] = log_path.values;
      doc["poly_value"] = poly_path.values;
      emit_output(o.common.out, doc.dump(2) + "\n");
    } else {
      std::string csv = io::csv_row({"time", "log_value", "poly_value"});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv += io::csv_row({fd(grid[i]), fd(log_path.values[i]), fd(poly_path.values[i])});
      }
      emit_output(o.common.out, csv);
    }
    return 0;
  }

  SimConfig config{kernel,
                   noise,
                   o.lambda,
                   grid,
                   o.common.seed,
                   o.paths,
                   o.has_alpha ? std::optional<double>(o.alpha) : std::nullopt,
                   o.has_scale ? std::optional<double>(o.scale) : std::nullopt};
  const std::vector<SamplePath> paths = simulate_ensemble(config, o.common.threads);
  if (o.common.format == "json") {
    json doc;
    doc["seed"] = o.common.seed;
    doc["kernel"] = kernel.id();
    doc["noise"] = noise.id();
    doc["lambda"] = o.lambda;
    if (o.has_alpha) {
      doc["alpha"] = o.alpha;
      doc["scale"] = o.scale;
    }
    doc["time"] = grid;
    doc["paths"] = json::array();
    for (const auto& p : paths) doc["paths"].push_back(p.values);
    emit_output(o.common.out, doc.dump(2) + "\n");
  } else {
    std::vector<std::string> header = {"time"};
    for (std::size_t m = 0; m < paths.size(); ++m) header.push_back("path_" + std::to_string(m));
    std::string csv = io::csv_row(header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> row = {fd(grid[i])};
      for (const auto& p : paths) row.push_back(fd(p.values[i]));
      csv += io::csv_row(row);
    }
    emit_output(o.common.out, csv);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// cov
// ---------------------------------------------------------------------------

struct CovOpts {
  CommonOpts common;
  double beta = 0.25;
  double lambda = 1.0;
  std::string noise = "gaussian-const:1";
  std::string times_spec;
  std::size_t paths = 20000;
};

double closed_form_cov(const NoiseModel& noise, double beta, double lambda, double s, double t) {
  switch (noise.variant()) {
    case NoiseModel::Variant::IndependentConstant:
      return cov_closed_form_independent(beta, lambda, noise.param_K(), s, t);
    case NoiseModel::Variant::PowerLaw:
      return cov_closed_form_powerlaw(beta, lambda, noise.param_K(), noise.param_gamma(), s, t);
    case NoiseModel::Variant::LogDecay:
      return cov_closed_form_logdecay(beta, lambda, noise.param_K(), noise.param_gamma(), s, t);
    case NoiseModel::Variant::BoundedPowerLaw:
      break;
  }
  throw std::invalid_argument(
      "no closed covariance form for this noise profile; available for the constant, "
      "power-law and log-decay variance profiles");
}

int run_cov(const CovOpts& o) {
  std::vector<double> times = parse_double_list(o.times_spec, "--times");
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.empty()) throw std::invalid_argument("--times must name at least one time");
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("--times entries must be positive");
  }
  const NoiseModel noise = parse_noise(o.noise, times.back());
  if (o.paths < 2) throw std::invalid_argument("--paths must be >= 2 for covariance estimates");

  // Validate the closed form on every pair before simulating anything.
  std::vector<std::tuple<double, double, double>> pairs;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i; j < times.size(); ++j) {
      pairs.emplace_back(times[i], times[j],
                         closed_form_cov(noise, o.beta, o.lambda, times[i], times[j]));
    }
  }

  const Kernel kernel = Kernel::logarithmic(o.beta);
  SimConfig config{kernel,        noise,   o.lambda,     times,
                   o.common.seed, o.paths, std::nullopt, std::nullopt};
  const auto ensemble = simulate_ensemble(config, o.common.threads);

  json rows = json::array();
  std::string csv = io::csv_row({"s", "t", "closed_form", "mc_estimate", "std_error", "z"});
  for (const auto& [s, t, closed] : pairs) {
    const EstimatorReport rep = empirical_cov(ensemble, s, t, closed);
    csv += io::csv_row(
        {fd(s), fd(t), fd(closed), fd(rep.estimate), fd(rep.std_error), fd(*rep.z_score)});
    rows.push_back({{"s", s},
                    {"t", t},
                    {"closed_form", closed},
                    {"mc_estimate", rep.estimate},
                    {"std_error", rep.std_error},
                    {"z", *rep.z_score}});
  }
  if (o.common.format == "json") {
    json doc;
    doc["beta"] = o.beta;
    doc["lambda"] = o.lambda;
    doc["noise"] = noise.id();
    doc["paths"] = o.paths;
    doc["seed"] = o.common.seed;
    doc["rows"] = rows;
    emit_output(o.common.out, doc.dump(2) + "\n");
  } else {
    emit_output(o.common.out, csv);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// qv
// ---------------------------------------------------------------------------

struct QvOpts {
  CommonOpts common;
  double beta = 0.25;
  double lambda = 1.0;
  double k2 = 1.0;
  double T = 1.0;
  std::string n_spec;
  std::size_t paths = 200;
  std::string law = "gaussian";
  std::string mc_kernel = "log";
};

int run_qv(const QvOpts& o) {
  const std::vector<std::size_t> ns = parse_count_list(o.n_spec, "--n");
  const NoiseLaw law = parse_law(o.law);
  const KernelFamily mc_family =
      o.mc_kernel == "log" ? KernelFamily::Logarithmic : KernelFamily::Polynomial;
  const Kernel mc_kernel =
      mc_family == KernelFamily::Logarithmic ? Kernel::logarithmic(o.beta)
                                             : Kernel::polynomial(o.beta);
  if (o.paths < 2) throw std::invalid_argument("--paths must be >= 2");

  struct Row {
    std::size_t n;
    double expected_log, expected_poly, mc_mean, mc_se;
  };
  std::vector<Row> rows;
  for (std::size_t n : ns) {
    Row row;
    row.n = n;
    row.expected_log = expected_qv(KernelFamily::Logarithmic, o.beta, o.lambda, o.k2, o.T, n);
    row.expected_poly = expected_qv(KernelFamily::Polynomial, o.beta, o.lambda, o.k2, o.T, n);
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      grid[i] = o.T * static_cast<double>(i) / static_cast<double>(n);
    }
    SimConfig config{mc_kernel,     NoiseModel::independent(o.k2, law),
                     o.lambda,      grid,
                     o.common.seed, o.paths,
                     std::nullopt,  std::nullopt};
    const auto ensemble = simulate_ensemble(config, o.common.threads);
    double mean = 0.0, sq = 0.0;
    for (const auto& p : ensemble) {
      const double q = empirical_qv(p);
      mean += q;
      sq += q * q;
    }
    const double m = static_cast<double>(ensemble.size());
    mean /= m;
    row.mc_mean = mean;
    row.mc_se = std::sqrt(std::max(0.0, sq / m - mean * mean) / m);
    rows.push_back(row);
  }

  // Log-log slope fits of the expected columns against n (needs two or more
  // distinct refinement levels).
  std::optional<double> slope_log, slope_poly;
  if (ns.size() >= 2) {
    std::vector<double> xs, yl, yp;
    for (const Row& r : rows) {
      xs.push_back(static_cast<double>(r.n));
      yl.push_back(r.expected_log);
      yp.push_back(r.expected_poly);
    }
    slope_log = fit_loglog_slope(xs, yl);
    slope_poly = fit_loglog_slope(xs, yp);
  }

  if (o.common.format == "json") {
    json doc;
    doc["beta"] = o.beta;
    doc["lambda"] = o.lambda;
    doc["k2"] = o.k2;
    doc["T"] = o.T;
    doc["mc_kernel"] = o.mc_kernel;
    doc["mc_paths"] = o.paths;
    doc["seed"] = o.common.seed;
    doc["rows"] = json::array();
    for (const Row& r : rows) {
      doc["rows"].push_back({{"n", r.n},
                             {"expected_qv_log", r.expected_log},
                             {"expected_qv_poly", r.expected_poly},
                             {"mc_qv_mean", r.mc_mean},
                             {"mc_qv_stderr", r.mc_se}});
    }
    if (slope_log) doc["slope_expected_log"] = *slope_log;
    if (slope_poly) doc["slope_expected_poly"] = *slope_poly;
    emit_output(o.common.out, doc.dump(2) + "\n");
  } else {
    std::string csv;
    if (slope_log) {
      csv += "# slope_expected_log=" + fd(*slope_log) + "\n";
      csv += "# slope_expected_poly=" + fd(*slope_poly) + "\n";
    }
    csv += io::csv_row({"n", "expected_qv_log", "expected_qv_poly", "mc_qv_mean", "mc_qv_stderr"});
    for (const Row& r : rows) {
      csv += io::csv_row({std::to_string(r.n), fd(r.expected_log), fd(r.expected_poly),
                          fd(r.mc_mean), fd(r.mc_se)});
    }
    emit_output(o.common.out, csv);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// limit
// ---------------------------------------------------------------------------

struct LimitOpts {
  CommonOpts common;
  double alpha = 1.5;
  double lambda = 1.0;
  std::string noise = "bounded-powerlaw:K=1,gamma=0.5";
  std::string grid_spec;
  std::string scales_spec = "10,100,1000";
  std::size_t paths = 2000;
};

int run_limit(const LimitOpts& o) {
  const std::vector<double> grid = parse_grid_spec(o.grid_spec);
  const std::vector<double> scales = parse_double_list(o.scales_spec, "--scales");
  double max_scale = 1.0;
  for (double c : scales) max_scale = std::max(max_scale, c);
  const NoiseModel noise = parse_noise(o.noise, max_scale * grid.back());
  const ConvergenceReport rep = convergence_report(o.alpha, o.lambda, noise, grid, scales,
                                                   o.paths, o.common.seed, o.common.threads);

  const std::size_t n = grid.size();
  if (o.common.format == "json") {
    json doc;
    doc["alpha"] = rep.alpha;
    doc["lambda"] = rep.lambda;
    doc["noise"] = rep.noise_id;
    doc["ensemble_size"] = rep.ensemble_size;
    doc["seed"] = rep.seed;
    doc["grid"] = rep.grid;
    json target = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      target.push_back(std::vector<double>(rep.target_cov.begin() + i * n,
                                           rep.target_cov.begin() + (i + 1) * n));
    }
    doc["target_cov"] = target;
    doc["scales"] = json::array();
    for (const auto& d : rep.per_scale) {
      json entry;
      entry["c"] = d.c;
      json cov = json::array();
      for (std::size_t i = 0; i < n; ++i) {
        cov.push_back(std::vector<double>(d.cov.begin() + i * n, d.cov.begin() + (i + 1) * n));
      }
      entry["empirical_cov"] = cov;
      entry["frobenius_distance"] = d.frobenius_distance;
      entry["max_abs_distance"] = d.max_abs_distance;
      entry["skewness"] = d.skewness;
      entry["excess_kurtosis"] = d.excess_kurtosis;
      doc["scales"].push_back(entry);
    }
    emit_output(o.common.out, doc.dump(2) + "\n");
    return 0;
  }

  // Tidy long-format CSV: one row per quantity.  Cells that do not apply to
  // a given kind are left empty.
  std::string csv = io::csv_row({"scale", "kind", "s", "t", "value"});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      csv += io::csv_row(
          {"", "target_cov", fd(grid[i]), fd(grid[j]), fd(rep.target_cov[i * n + j])});
    }
  }
  for (const auto& d : rep.per_scale) {
    const std::string c = fd(d.c);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        csv += io::csv_row({c, "empirical_cov", fd(grid[i]), fd(grid[j]), fd(d.cov[i * n + j])});
      }
    }
    csv += io::csv_row({c, "frobenius_distance", "", "", fd(d.frobenius_distance)});
    csv += io::csv_row({c, "max_abs_distance", "", "", fd(d.max_abs_distance)});
    for (std::size_t i = 0; i < n; ++i) {
      csv += io::csv_row({c, "skewness", fd(grid[i]), "", fd(d.skewness[i])});
      csv += io::csv_row({c, "excess_kurtosis", fd(grid[i]), "", fd(d.excess_kurtosis[i])});
    }
  }
  emit_output(o.common.out, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// hfbm
// ---------------------------------------------------------------------------

struct HfbmOpts {
  CommonOpts common;
  double alpha = 0.0;
  bool has_alpha = false;
  bool brownian = false;
  std::string grid_spec;
  std::size_t paths = 1;
  bool check_properties = false;
  std::size_t triples = 2000;
};

int run_hfbm_properties(const HfbmParams& params, const HfbmOpts& o) {
  struct Tally {
    const char* name;
    std::size_t checked = 0, failures = 0;
  };
  Tally tallies[] = {{"non_negative"},      {"super_additive"}, {"monotone_right"},
                     {"monotone_left"},     {"small_increment"}, {"scale_invariance"},
                     {"cov_consistency"}};
  SplitRng rng(o.common.seed, 0);
  auto log_uniform = [&rng]() { return 0.01 * std::pow(5000.0, rng.uniform()); };
  for (std::size_t i = 0; i < o.triples; ++i) {
    double r = log_uniform(), s = log_uniform(), t = log_uniform();
    if (r > s) std::swap(r, s);
    if (s > t) std::swap(s, t);
    if (r > s) std::swap(r, s);
    const double rs = increment_variance(params, r, s);
    const double st = increment_variance(params, s, t);
    const double rt = increment_variance(params, r, t);
    ++tallies[0].checked;
    if (!(rs >= 0.0 && st >= 0.0 && rt >= 0.0)) ++tallies[0].failures;
    ++tallies[1].checked;
    if (!(rs + st <= rt + 1e-10)) ++tallies[1].failures;
    ++tallies[2].checked;
    if (!(rs <= rt + 1e-10)) ++tallies[2].failures;
    ++tallies[3].checked;
    if (!(st <= rt + 1e-10)) ++tallies[3].failures;
    ++tallies[4].checked;
    if (!(increment_variance(params, t, t * (1.0 + 1e-6)) <= 1e-3 * std::max(1.0, t))) {
      ++tallies[4].failures;
    }
    const double c = 0.5 + 9.5 * rng.uniform();
    ++tallies[5].checked;
    const double lhs = hfbm_cov(params, c * s, c * t);
    const double rhs = c * hfbm_cov(params, s, t);
    if (!(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(rhs)))) ++tallies[5].failures;
    ++tallies[6].checked;
    const double combo = t + s - 2.0 * hfbm_cov(params, s, t);
    if (!(std::fabs(st - combo) <= 1e-12 * std::max(1.0, t + s))) ++tallies[6].failures;
  }

  std::size_t total_failures = 0;
  if (o.common.format == "json") {
    json doc;
    doc["alpha"] = params.is_brownian() ? json() : json(params.alpha());
    doc["triples"] = o.triples;
    doc["seed"] = o.common.seed;
    doc["properties"] = json::array();
    for (const Tally& t : tallies) {
      doc["properties"].push_back(
          {{"property", t.name}, {"checked", t.checked}, {"failures", t.failures}});
      total_failures += t.failures;
    }
    doc["all_pass"] = total_failures == 0;
    emit_output(o.common.out, doc.dump(2) + "\n");
  } else {
    std::string csv = io::csv_row({"property", "checked", "failures"});
    for (const Tally& t : tallies) {
      csv += io::csv_row({t.name, std::to_string(t.checked), std::to_string(t.failures)});
      total_failures += t.failures;
    }
    emit_output(o.common.out, csv);
  }
  if (total_failures != 0) {
    // The underlying facts are theorems; a failure here means the numerics
    // drifted out of tolerance.
    throw NumericalError("increment-variance property suite failed");
  }
  return 0;
}

int run_hfbm(const HfbmOpts& o) {
  if (o.brownian == o.has_alpha) {
    throw std::invalid_argument("hfbm needs exactly one of --alpha or --brownian");
  }
  const HfbmParams params = o.brownian ? HfbmParams::brownian() : HfbmParams(o.alpha);
  if (o.check_properties) return run_hfbm_properties(params, o);

  if (o.grid_spec.empty()) {
    throw std::invalid_argument("hfbm needs --grid unless --check-properties is given");
  }
  const std::vector<double> grid = parse_grid_spec(o.grid_spec);
  const auto paths = sample_hfbm(params, grid, o.paths, o.common.seed, o.common.threads);
  if (o.common.format == "json") {
    json doc;
    doc["alpha"] = params.is_brownian() ? json() : json(params.alpha());
    doc["seed"] = o.common.seed;
    doc["time"] = grid;
    doc["paths"] = json::array();
    for (const auto& p : paths) doc["paths"].push_back(p.values);
    emit_output(o.common.out, doc.dump(2) + "\n");
  } else {
    std::vector<std::string> header = {"time"};
    for (std::size_t m = 0; m < paths.size(); ++m) header.push_back("path_" + std::to_string(m));
    std::string csv = io::csv_row(header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> row = {fd(grid[i])};
      for (const auto& p : paths) row.push_back(fd(p.values[i]));
      csv += io::csv_row(row);
    }
    emit_output(o.common.out, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "logshot: simulation and analysis of shot-noise processes with slowly decaying "
      "response functions, their closed-form covariances, quadratic-variation behavior, "
      "and the Gaussian scaling limit.\n"
      "Exit codes: 0 success, 2 invalid configuration or I/O failure, 3 numerical failure."};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "sample shot-noise paths on a time grid (CSV/JSON, plot-ready)");
  sim_cmd->add_option("--kernel", sim.kernel,
                      "response family: 'log' decays in the time ratio, 'poly' in the time lag")
      ->check(CLI::IsMember({"log", "poly"}))
      ->capture_default_str();
  sim_cmd->add_option("--beta", sim.beta, "response shape index, in (0, 0.5)")
      ->capture_default_str();
  sim_cmd->add_option("--lambda", sim.lambda, "Poisson arrival rate")->capture_default_str();
  sim_cmd->add_option("--noise", sim.noise,
                      "mark model, variant:params — gaussian-const:<K2>, rademacher-const:<K2>, "
                      "powerlaw:K=..,gamma=..[,law=..], bounded-powerlaw:K=..,gamma=..[,law=..], "
                      "logdecay:K=..,gamma=..[,law=..]")
      ->capture_default_str();
  sim_cmd->add_option("--grid", sim.grid_spec, "time grid start:stop:points (inclusive)")
      ->required();
  sim_cmd->add_option("--paths", sim.paths, "number of independent paths")
      ->capture_default_str();
  sim_cmd->add_flag("--compare-poly", sim.compare_poly,
                    "emit one logarithmic and one polynomial path built from identical "
                    "arrivals and marks (columns time,log_value,poly_value)");
  sim_cmd->add_option("--alpha", sim.alpha,
                      "limit exponent in (1,2); with --scale, emits the normalized rescaled "
                      "process (requires --kernel log and beta = (alpha-1)/2)");
  sim_cmd->add_option("--scale", sim.scale, "time stretch c >= 1 for the rescaled process");
  add_common(sim_cmd, sim.common);

  CovOpts cov;
  CLI::App* cov_cmd = app.add_subcommand(
      "cov", "closed-form covariance against a Monte Carlo estimate, per time pair");
  cov_cmd->add_option("--beta", cov.beta, "response shape index, in (0, 0.5)")
      ->capture_default_str();
  cov_cmd->add_option("--lambda", cov.lambda, "Poisson arrival rate")->capture_default_str();
  cov_cmd->add_option("--noise", cov.noise,
                      "mark model (closed forms exist for gaussian-const/rademacher-const, "
                      "powerlaw and logdecay; the logdecay horizon is max(--times))")
      ->capture_default_str();
  cov_cmd->add_option("--times", cov.times_spec, "comma-separated times; all pairs s <= t are "
                                                 "reported, diagonal included")
      ->required();
  cov_cmd->add_option("--paths", cov.paths, "Monte Carlo ensemble size")->capture_default_str();
  add_common(cov_cmd, cov.common);

  QvOpts qv;
  CLI::App* qv_cmd = app.add_subcommand(
      "qv", "expected quadratic variation under grid refinement (both kernels), with MC check");
  qv_cmd->add_option("--beta", qv.beta, "response shape index, in (0, 0.5)")
      ->capture_default_str();
  qv_cmd->add_option("--lambda", qv.lambda, "Poisson arrival rate")->capture_default_str();
  qv_cmd->add_option("--k2", qv.k2, "constant mark variance")->capture_default_str();
  qv_cmd->add_option("--T", qv.T, "end of the time window [0, T]")->capture_default_str();
  qv_cmd->add_option("--n", qv.n_spec, "comma-separated subdivision counts, e.g. 64,256,1024")
      ->required();
  qv_cmd->add_option("--paths", qv.paths, "Monte Carlo ensemble size per refinement level")
      ->capture_default_str();
  qv_cmd->add_option("--law", qv.law, "mark law for the MC ensemble")
      ->check(CLI::IsMember({"gaussian", "rademacher"}))
      ->capture_default_str();
  qv_cmd->add_option("--mc-kernel", qv.mc_kernel, "kernel family the MC column realizes")
      ->check(CLI::IsMember({"log", "poly"}))
      ->capture_default_str();
  add_common(qv_cmd, qv.common);

  LimitOpts limit;
  CLI::App* limit_cmd = app.add_subcommand(
      "limit", "empirical covariance of the normalized rescaled process vs the limit "
               "covariance, across time stretches");
  limit_cmd->add_option("--alpha", limit.alpha, "limit exponent, in (1, 2)")
      ->capture_default_str();
  limit_cmd->add_option("--lambda", limit.lambda, "Poisson arrival rate")->capture_default_str();
  limit_cmd->add_option("--noise", limit.noise,
                        "mark model; must have bounded variance with a positive limit")
      ->capture_default_str();
  limit_cmd->add_option("--grid", limit.grid_spec,
                        "time grid start:stop:points, strictly positive")
      ->required();
  limit_cmd->add_option("--scales", limit.scales_spec, "comma-separated stretches c >= 1")
      ->capture_default_str();
  limit_cmd->add_option("--paths", limit.paths, "ensemble size per stretch")
      ->capture_default_str();
  add_common(limit_cmd, limit.common);

  HfbmOpts hfbm;
  CLI::App* hfbm_cmd = app.add_subcommand(
      "hfbm", "exact Gaussian samples of the limit process (Cholesky of the closed-form "
              "covariance), or its increment-variance property suite");
  CLI::Option* alpha_opt =
      hfbm_cmd->add_option("--alpha", hfbm.alpha, "exponent in (0,1) or (1,2)");
  hfbm_cmd->add_flag("--brownian", hfbm.brownian,
                     "use the degenerate Brownian covariance min(s,t) instead of --alpha");
  hfbm_cmd->add_option("--grid", hfbm.grid_spec,
                       "time grid start:stop:points (start 0 allowed; the origin is pinned "
                       "at 0)");
  hfbm_cmd->add_option("--paths", hfbm.paths, "number of sample paths")->capture_default_str();
  hfbm_cmd->add_flag("--check-properties", hfbm.check_properties,
                     "run the increment-variance property suite (non-negativity, "
                     "super-additivity, monotonicity, small increments, scale invariance) "
                     "and report pass/fail counts instead of sampling");
  hfbm_cmd->add_option("--triples", hfbm.triples, "random triples for --check-properties")
      ->capture_default_str();
  add_common(hfbm_cmd, hfbm.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  hfbm.has_alpha = alpha_opt->count() > 0;
  sim.has_alpha = sim_cmd->count("--alpha") > 0;
  sim.has_scale = sim_cmd->count("--scale") > 0;
  sim.has_beta = sim_cmd->count("--beta") > 0;

  try {
    if (app.got_subcommand(sim_cmd)) return run_simulate(sim);
    if (app.got_subcommand(cov_cmd)) return run_cov(cov);
    if (app.got_subcommand(qv_cmd)) return run_qv(qv);
    if (app.got_subcommand(limit_cmd)) return run_limit(limit);
    if (app.got_subcommand(hfbm_cmd)) return run_hfbm(hfbm);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
