// SPDX-License-Identifier: Apache-2.0
#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>
#include <vector>

#include "kppvar/cell_problem.hpp"
#include "kppvar/ensemble.hpp"
#include "kppvar/errors.hpp"
#include "kppvar/io.hpp"
#include "kppvar/pde.hpp"
#include "kppvar/speed.hpp"

namespace kppvar::experiments {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Config plumbing
// ---------------------------------------------------------------------------

const std::set<std::string>& allowed_keys(const std::string& command) {
  static const std::set<std::string> speed{"a", "r", "L", "m", "dy", "f_prime0", "seed",
                                           "threads", "sampler", "delta", "shear", "kappa",
                                           "trace", "dump_shear"};
  static const std::set<std::string> ensemble{"a", "r", "L", "m", "dy", "f_prime0",
                                              "seed", "threads", "sampler", "deltas",
                                              "N", "Q", "kappa"};
  static const std::set<std::string> scaling{"a", "r", "L_list", "dy", "f_prime0",
                                             "seed", "threads", "sampler", "deltas_small",
                                             "deltas_large", "N", "Q"};
  static const std::set<std::string> cov_sweep{"L", "m", "dy", "f_prime0", "seed", "threads",
                                               "sampler", "alphas", "delta", "N"};
  static const std::set<std::string> pdf{"a", "r", "L", "m", "dy", "f_prime0", "seed",
                                         "threads", "sampler", "delta", "N", "Q"};
  static const std::set<std::string> bounds{"a", "r", "L", "m", "dy", "f_prime0", "seed",
                                            "threads", "sampler", "delta", "kappa", "N"};
  static const std::set<std::string> pdesim{"a", "r", "L", "dy", "seed", "threads", "sampler",
                                            "delta", "kappa", "nonlinearity", "ignition",
                                            "bistable_root", "N", "dx", "dt", "t_final",
                                            "window", "record_stride", "fit_fraction",
                                            "write_trajectories"};
  if (command == "speed") return speed;
  if (command == "ensemble") return ensemble;
  if (command == "scaling") return scaling;
  if (command == "cov-sweep") return cov_sweep;
  if (command == "pdf") return pdf;
  if (command == "bounds") return bounds;
  if (command == "pdesim-compare") return pdesim;
  throw ConfigError("unknown command: " + command);
}

double get_number(const json& config, const std::string& key) {
  if (!config.contains(key)) throw ConfigError("config key '" + key + "' is missing");
  if (!config[key].is_number()) throw ConfigError("config key '" + key + "': expected a number");
  return config[key].get<double>();
}

int get_int(const json& config, const std::string& key) {
  if (!config.contains(key)) throw ConfigError("config key '" + key + "' is missing");
  if (!config[key].is_number_integer())
    throw ConfigError("config key '" + key + "': expected an integer");
  return config[key].get<int>();
}

std::uint64_t get_seed(const json& config, const std::string& key) {
  if (!config.contains(key)) throw ConfigError("config key '" + key + "' is missing");
  if (!config[key].is_number_unsigned() && !config[key].is_number_integer())
    throw ConfigError("config key '" + key + "': expected an integer seed");
  return config[key].get<std::uint64_t>();
}

std::string get_string(const json& config, const std::string& key) {
  if (!config.contains(key)) throw ConfigError("config key '" + key + "' is missing");
  if (!config[key].is_string()) throw ConfigError("config key '" + key + "': expected a string");
  return config[key].get<std::string>();
}

bool get_bool(const json& config, const std::string& key) {
  if (!config.contains(key)) throw ConfigError("config key '" + key + "' is missing");
  if (!config[key].is_boolean()) throw ConfigError("config key '" + key + "': expected a boolean");
  return config[key].get<bool>();
}

std::vector<double> get_number_array(const json& config, const std::string& key) {
  if (!config.contains(key)) throw ConfigError("config key '" + key + "' is missing");
  if (!config[key].is_array()) throw ConfigError("config key '" + key + "': expected an array");
  std::vector<double> values;
  for (const auto& item : config[key]) {
    if (!item.is_number())
      throw ConfigError("config key '" + key + "': expected an array of numbers");
    values.push_back(item.get<double>());
  }
  return values;
}

Grid grid_from_config(const json& config, double length) {
  if (config.contains("m")) {
    const int nodes = get_int(config, "m");
    if (nodes < 3) throw ConfigError("config key 'm': need at least 3 nodes");
    return Grid::uniform(length, nodes);
  }
  const double dy = get_number(config, "dy");
  if (!(dy > 0.0)) throw ConfigError("config key 'dy': must be positive");
  const int nodes = static_cast<int>(std::lround(length / dy)) + 1;
  if (nodes < 3) throw ConfigError("config key 'dy': grid too coarse for this L");
  return Grid::uniform(length, nodes);
}

bool get_exact_sampler(const json& config) {
  const std::string sampler = get_string(config, "sampler");
  if (sampler == "milstein") return false;
  if (sampler == "exact") return true;
  throw ConfigError("config key 'sampler': expected \"milstein\" or \"exact\"");
}

std::string short_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", v);
  return buffer;
}

template <typename F>
void parallel_for(int n, int threads, F&& body) {
  threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

json base_manifest(const std::string& command, const json& config) {
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["master_seed"] = config.contains("seed") ? config["seed"] : json(0);
  manifest["warnings"] = json::array();
  return manifest;
}

void write_manifest(const fs::path& out_dir, const json& manifest) {
  io::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// speed
// ---------------------------------------------------------------------------

json run_speed(const json& config, const fs::path& out_dir) {
  const double length = get_number(config, "L");
  const Grid grid = grid_from_config(config, length);
  const double f_prime0 = get_number(config, "f_prime0");
  const double delta = get_number(config, "delta");
  const std::string shear_kind = get_string(config, "shear");

  ShearPath path;
  if (shear_kind == "zero") {
    path = ShearPath::from_values(grid, std::vector<double>(grid.nodes, 0.0));
  } else if (shear_kind == "cosine") {
    std::vector<double> values(grid.nodes);
    for (int i = 0; i < grid.nodes; ++i)
      values[i] = std::cos(2.0 * std::numbers::pi * grid.node(i) / length);
    path = ShearPath::from_values(grid, std::move(values));
  } else if (shear_kind == "ou") {
    const OUParams ou =
        OUParams::create(get_number(config, "a"), get_number(config, "r"), length);
    RandomStream stream = realization_stream(get_seed(config, "seed"), 0);
    path = get_exact_sampler(config) ? exact_ou_sample(ou, grid, stream)
                                     : sample_ou_path(ou, grid, stream);
  } else {
    throw ConfigError("config key 'shear': expected \"zero\", \"cosine\" or \"ou\"");
  }

  SpeedOptions opts;
  opts.kappa = get_number(config, "kappa");
  std::vector<SpeedTracePoint> trace;
  const bool want_trace = get_bool(config, "trace");
  const SpeedResult result =
      minimal_speed(path, delta, f_prime0, opts, want_trace ? &trace : nullptr);

  fs::create_directories(out_dir);
  std::vector<std::vector<double>> rows{{result.c_star, result.lambda_star, result.mu_star,
                                         static_cast<double>(result.iterations),
                                         result.converged ? 1.0 : 0.0,
                                         result.fallback_used ? 1.0 : 0.0}};
  io::write_csv(out_dir / "speed.csv",
                "c_star,lambda_star,mu_star,iterations,converged,fallback_used", rows);
  if (want_trace) {
    std::vector<std::vector<double>> trace_rows;
    for (const auto& p : trace) trace_rows.push_back({p.lambda, p.objective});
    io::write_csv(out_dir / "trace.csv", "lambda,H", trace_rows);
  }
  if (get_bool(config, "dump_shear")) io::write_shear_csv(out_dir / "shear.csv", path);

  json manifest = base_manifest("speed", config);
  manifest["summary"] = {{"c_star", result.c_star},
                         {"lambda_star", result.lambda_star},
                         {"mu_star", result.mu_star},
                         {"iterations", result.iterations},
                         {"fallback_used", result.fallback_used},
                         {"shear_mean", path.mean}};
  write_manifest(out_dir, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// ensemble / pdf
// ---------------------------------------------------------------------------

EnsembleConfig ensemble_config_from(const json& config, const std::vector<double>& deltas,
                                    double length) {
  EnsembleConfig ec;
  ec.ou = OUParams::create(get_number(config, "a"), get_number(config, "r"), length);
  ec.grid = grid_from_config(config, length);
  ec.deltas = deltas;
  ec.realizations = get_int(config, "N");
  ec.master_seed = get_seed(config, "seed");
  ec.f_prime0 = get_number(config, "f_prime0");
  ec.histogram_bins = config.contains("Q") ? get_int(config, "Q") : 300;
  ec.threads = get_int(config, "threads");
  ec.use_exact_sampler = get_exact_sampler(config);
  return ec;
}

void write_ensemble_outputs(const fs::path& out_dir, const EnsembleConfig& ec,
                            const EnsembleResult& result, bool with_pdfs) {
  std::vector<std::vector<double>> summary;
  for (const auto& stats : result.per_delta) {
    const double predicted =
        stats.delta > 0.0
            ? 0.5 * result.c0 * stats.delta * stats.delta *
                  ou_enhancement_closed_form(ec.ou.drift_rate, ec.ou.noise_intensity,
                                             ec.ou.channel_width)
            : 0.0;
    summary.push_back({stats.delta, stats.mean_enhancement, stats.std_error, predicted});
  }
  io::write_csv(out_dir / "ensemble_summary.csv", "delta,mean_M,stderr,predicted", summary);

  for (std::size_t j = 0; j < result.per_delta.size(); ++j) {
    const auto& stats = result.per_delta[j];
    std::vector<std::vector<double>> rows;
    rows.reserve(result.records.size());
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      const auto& record = result.records[i];
      if (record.failed) continue;
      rows.push_back({static_cast<double>(i), record.shear_mean, record.enhancement_coeff,
                      record.c_star[j],
                      enhancement_sample(record.c_star[j], result.c0, stats.delta,
                                         record.shear_mean)});
    }
    io::write_csv(out_dir / ("samples_" + short_number(stats.delta) + ".csv"),
                  "i,b_bar,k,c_star,M", rows);
    if (with_pdfs && stats.samples.size() >= 2) {
      const Pdf pdf = histogram_pdf(stats.samples, ec.histogram_bins);
      std::vector<std::vector<double>> pdf_rows;
      for (std::size_t b = 0; b + 1 < pdf.edges.size(); ++b)
        pdf_rows.push_back({pdf.edges[b], pdf.edges[b + 1], pdf.density[b]});
      io::write_csv(out_dir / ("pdf_" + short_number(stats.delta) + ".csv"),
                    "bin_lo,bin_hi,density", pdf_rows);
    }
  }
}

json run_ensemble_command(const json& config, const fs::path& out_dir) {
  std::vector<double> deltas = get_number_array(config, "deltas");
  const EnsembleConfig ec = ensemble_config_from(config, deltas, get_number(config, "L"));
  const EnsembleResult result = run_ensemble(ec);

  fs::create_directories(out_dir);
  write_ensemble_outputs(out_dir, ec, result, true);

  json manifest = base_manifest("ensemble", config);
  manifest["failures"] = result.failures;
  json per_delta = json::array();
  for (const auto& stats : result.per_delta)
    per_delta.push_back({{"delta", stats.delta},
                         {"mean_M", stats.mean_enhancement},
                         {"stderr", stats.std_error}});
  manifest["summary"] = {{"c0", result.c0}, {"per_delta", per_delta}};
  if (ec.realizations < 30)
    manifest["warnings"].push_back("N is too small for stable ensemble statistics");
  write_manifest(out_dir, manifest);
  return manifest;
}

json run_pdf(const json& config, const fs::path& out_dir) {
  const double delta = get_number(config, "delta");
  const EnsembleConfig ec = ensemble_config_from(config, {delta}, get_number(config, "L"));
  const EnsembleResult result = run_ensemble(ec);
  const auto& samples = result.per_delta.front().samples;

  fs::create_directories(out_dir);
  write_ensemble_outputs(out_dir, ec, result, true);

  json manifest = base_manifest("pdf", config);
  manifest["failures"] = result.failures;
  json summary = {{"c0", result.c0},
                  {"mean_M", result.per_delta.front().mean_enhancement},
                  {"stderr", result.per_delta.front().std_error}};
  // Self-convergence diagnostic: the PDF from the first half of the ensemble
  // against the full one, on common bins.
  if (samples.size() >= 4) {
    const Pdf full = histogram_pdf(samples, ec.histogram_bins);
    const std::span<const double> half(samples.data(), samples.size() / 2);
    const Pdf half_pdf = histogram_pdf(half, full.edges);
    summary["half_sample_cdf_distance"] = distribution_distance(full, half_pdf);
    double sup_diff = 0.0, sup_full = 0.0;
    for (std::size_t j = 0; j < full.density.size(); ++j) {
      sup_diff = std::max(sup_diff, std::abs(full.density[j] - half_pdf.density[j]));
      sup_full = std::max(sup_full, full.density[j]);
    }
    summary["half_sample_density_sup_ratio"] = sup_full > 0.0 ? sup_diff / sup_full : 0.0;
  }
  manifest["summary"] = summary;
  write_manifest(out_dir, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// scaling
// ---------------------------------------------------------------------------

json run_scaling(const json& config, const fs::path& out_dir) {
  const std::vector<double> l_list = get_number_array(config, "L_list");
  const std::vector<double> small = get_number_array(config, "deltas_small");
  const std::vector<double> large = get_number_array(config, "deltas_large");
  if (l_list.empty()) throw ConfigError("config key 'L_list': must not be empty");
  if (small.size() < 2 || large.size() < 2)
    throw ConfigError("config keys 'deltas_small'/'deltas_large': need at least two amplitudes");
  if (small.back() >= large.front())
    throw ConfigError("config key 'deltas_large': must start above deltas_small");

  std::vector<double> deltas = small;
  deltas.insert(deltas.end(), large.begin(), large.end());

  fs::create_directories(out_dir);
  json manifest = base_manifest("scaling", config);
  int total_failures = 0;
  json per_length = json::array();
  std::vector<double> p_small_values, p_large_values;

  for (double length : l_list) {
    const EnsembleConfig ec = ensemble_config_from(config, deltas, length);
    const EnsembleResult result = run_ensemble(ec);
    total_failures += result.failures;

    const double enh = ou_enhancement_closed_form(ec.ou.drift_rate, ec.ou.noise_intensity,
                                                  ec.ou.channel_width);
    const auto write_curve = [&](const std::vector<double>& set, const std::string& name) {
      std::vector<std::vector<double>> rows;
      std::vector<std::pair<double, double>> points;
      for (const auto& stats : result.per_delta) {
        if (std::find(set.begin(), set.end(), stats.delta) == set.end()) continue;
        const double predicted = 0.5 * result.c0 * stats.delta * stats.delta * enh;
        rows.push_back({stats.delta, stats.mean_enhancement, stats.std_error, predicted});
        points.emplace_back(stats.delta, stats.mean_enhancement);
      }
      io::write_csv(out_dir / (name + "_L" + short_number(length) + ".csv"),
                    "delta,mean_M,stderr,predicted", rows);
      return fit_scaling_exponent(points);
    };
    const ScalingFit fit_small = write_curve(small, "scaling_small");
    const ScalingFit fit_large = write_curve(large, "scaling_large");
    p_small_values.push_back(fit_small.exponent);
    p_large_values.push_back(fit_large.exponent);
    per_length.push_back({{"L", length},
                          {"p_small", fit_small.exponent},
                          {"r2_small", fit_small.r_squared},
                          {"p_large", fit_large.exponent},
                          {"r2_large", fit_large.r_squared}});
  }

  // Exponent table, one column per channel width, regimes as rows.
  std::string table = "regime";
  for (double length : l_list) table += ",L=" + short_number(length);
  table += "\nsmall_delta";
  for (double p : p_small_values) table += "," + io::format_value(p);
  table += "\nlarge_delta";
  for (double p : p_large_values) table += "," + io::format_value(p);
  table += "\n";
  io::write_text_file(out_dir / "exponents.csv", table);

  manifest["failures"] = total_failures;
  manifest["summary"] = {{"per_L", per_length}};
  if (get_int(config, "N") < 30)
    manifest["warnings"].push_back(
        "N is too small for statistically reliable scaling exponents");
  write_manifest(out_dir, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// cov-sweep
// ---------------------------------------------------------------------------

json run_cov_sweep(const json& config, const fs::path& out_dir) {
  const std::vector<double> alphas = get_number_array(config, "alphas");
  if (alphas.empty()) throw ConfigError("config key 'alphas': must not be empty");
  for (double alpha : alphas)
    if (!(alpha > 0.0)) throw ConfigError("config key 'alphas': values must be positive");
  const double delta = get_number(config, "delta");
  const double length = get_number(config, "L");

  // r = sqrt(2) alpha^{3/4} keeps the covariance L2 norm fixed across the
  // sweep; the stationary initial variance sqrt(alpha) follows from it.
  std::vector<double> mean_enh(alphas.size()), std_err(alphas.size()),
      predicted(alphas.size());
  int total_failures = 0;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double alpha = alphas[j];
    const double noise = std::sqrt(2.0) * std::pow(alpha, 0.75);
    json sub = config;
    sub["a"] = alpha;
    sub["r"] = noise;
    const EnsembleConfig ec = ensemble_config_from(sub, {delta}, length);
    const EnsembleResult result = run_ensemble(ec);
    total_failures += result.failures;
    mean_enh[j] = result.per_delta.front().mean_enhancement;
    std_err[j] = result.per_delta.front().std_error;
    predicted[j] = 0.5 * result.c0 * delta * delta *
                   ou_enhancement_closed_form(alpha, noise, length);
  }

  const auto argmax = [](const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  const std::size_t empirical_peak = argmax(mean_enh);
  const std::size_t closed_form_peak = argmax(predicted);

  fs::create_directories(out_dir);
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < alphas.size(); ++j)
    rows.push_back({alphas[j], mean_enh[j], std_err[j], predicted[j],
                    j == empirical_peak ? 1.0 : 0.0});
  io::write_csv(out_dir / "cov_sweep.csv", "alpha,mean_M,stderr,predicted,argmax_flag", rows);

  json manifest = base_manifest("cov-sweep", config);
  manifest["failures"] = total_failures;
  json summary;
  if (alphas.size() < 3) {
    summary["degenerate_sweep"] = true;  // no argmax claim from so few points
  } else {
    summary["empirical_argmax_alpha"] = alphas[empirical_peak];
    summary["closed_form_argmax_alpha"] = alphas[closed_form_peak];
    summary["argmax_grid_distance"] =
        static_cast<int>(empirical_peak > closed_form_peak ? empirical_peak - closed_form_peak
                                                           : closed_form_peak - empirical_peak);
    summary["interior_maximum"] =
        empirical_peak != 0 && empirical_peak + 1 != alphas.size();
  }
  manifest["summary"] = summary;
  write_manifest(out_dir, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

json run_bounds(const json& config, const fs::path& out_dir) {
  const double length = get_number(config, "L");
  const Grid grid = grid_from_config(config, length);
  const OUParams ou = OUParams::create(get_number(config, "a"), get_number(config, "r"), length);
  const double delta = get_number(config, "delta");
  const double kappa = get_number(config, "kappa");
  const double f_prime0 = get_number(config, "f_prime0");
  const int n = get_int(config, "N");
  if (n < 1) throw ConfigError("config key 'N': must be positive");
  const std::uint64_t seed = get_seed(config, "seed");
  const bool exact = get_exact_sampler(config);

  SpeedOptions opts;
  opts.kappa = kappa;

  std::vector<std::vector<double>> rows(n);
  parallel_for(n, get_int(config, "threads"), [&](int i) {
    RandomStream stream = realization_stream(seed, static_cast<std::uint64_t>(i));
    const ShearPath path =
        exact ? exact_ou_sample(ou, grid, stream) : sample_ou_path(ou, grid, stream);
    const ChiField chi = solve_cell_problem(grid, path.fluctuation);
    const SpeedResult speed = minimal_speed(path, delta, f_prime0, opts);
    const SpeedBounds bounds = upper_bounds(path, chi, delta, kappa, f_prime0);
    const bool dominated = speed.c_star <= std::min(bounds.g1, bounds.g2) + 1e-10;
    rows[i] = {static_cast<double>(i), path.mean,       speed.c_star, bounds.g1,
               bounds.g1_sqrt,         bounds.g2,       dominated ? 1.0 : 0.0};
  });

  int violations_literal = 0;
  int violations_sqrt = 0;
  double min_margin_literal = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    const double c_star = row[2];
    if (c_star > std::min(row[3], row[5]) + 1e-10) ++violations_literal;
    if (c_star > std::min(row[4], row[5]) + 1e-10) ++violations_sqrt;
    min_margin_literal = std::min(min_margin_literal, std::min(row[3], row[5]) - c_star);
  }

  fs::create_directories(out_dir);
  io::write_csv(out_dir / "bounds.csv", "i,b_bar,c_star,g1,g1_sqrt,g2,dominated", rows);

  json manifest = base_manifest("bounds", config);
  manifest["summary"] = {{"violations_g1_literal", violations_literal},
                         {"violations_g1_sqrt", violations_sqrt},
                         {"min_margin_literal", min_margin_literal}};
  manifest["warnings"].push_back(
      "g1 uses the literal 2*kappa*f'(0) constant, which is below the provable "
      "2*sqrt(kappa*f'(0)) form whenever kappa < 1; g1_sqrt is the bound to trust");
  write_manifest(out_dir, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// pdesim-compare
// ---------------------------------------------------------------------------

json run_pdesim_compare(const json& config, const fs::path& out_dir) {
  const double length = get_number(config, "L");
  const double dy = get_number(config, "dy");
  const Grid grid = Grid::uniform(length, static_cast<int>(std::lround(length / dy)) + 1);
  const OUParams ou = OUParams::create(get_number(config, "a"), get_number(config, "r"), length);
  const double delta = get_number(config, "delta");
  const int n = get_int(config, "N");
  if (n < 1) throw ConfigError("config key 'N': must be positive");
  const std::uint64_t seed = get_seed(config, "seed");
  const bool exact = get_exact_sampler(config);

  const std::string kind = get_string(config, "nonlinearity");
  Nonlinearity nl;
  if (kind == "kpp")
    nl = Nonlinearity::kpp();
  else if (kind == "combustion")
    nl = Nonlinearity::combustion(get_number(config, "ignition"));
  else if (kind == "bistable")
    nl = Nonlinearity::bistable(get_number(config, "bistable_root"));
  else
    throw ConfigError("config key 'nonlinearity': expected kpp, combustion or bistable");

  PdeParams params;
  params.kappa = get_number(config, "kappa");
  params.dx = get_number(config, "dx");
  params.dt = get_number(config, "dt");
  params.t_final = get_number(config, "t_final");
  params.window_length = get_number(config, "window");
  params.record_stride = get_int(config, "record_stride");
  params.fit_fraction = get_number(config, "fit_fraction");

  const bool variational = nl.kind == ReactionKind::kpp;
  SpeedOptions opts;
  opts.kappa = params.kappa;

  const bool write_traj = get_bool(config, "write_trajectories");
  fs::create_directories(out_dir);

  std::vector<std::vector<double>> rows(n);
  std::vector<FrontTrajectory> trajectories(n);
  std::vector<double> courant(n, 0.0);
  parallel_for(n, get_int(config, "threads"), [&](int i) {
    RandomStream stream = realization_stream(seed, static_cast<std::uint64_t>(i));
    const ShearPath path =
        exact ? exact_ou_sample(ou, grid, stream) : sample_ou_path(ou, grid, stream);
    const FrontTrajectory traj = simulate_front(path, delta, nl, params);
    double var_speed = std::numeric_limits<double>::quiet_NaN();
    double rel_diff = std::numeric_limits<double>::quiet_NaN();
    if (variational) {
      var_speed = minimal_speed(path, delta, nl.f_prime0(), opts).c_star;
      rel_diff = (traj.speed - var_speed) / var_speed;
    }
    double w_max = 0.0;
    for (double b : path.values) w_max = std::max(w_max, std::abs(delta * b));
    courant[i] = traj.dt_used * w_max / params.dx;
    rows[i] = {static_cast<double>(i), traj.speed,        var_speed, rel_diff,
               traj.fit_residual,      traj.dt_used};
    trajectories[i] = traj;
  });

  io::write_csv(out_dir / "pdesim_compare.csv",
                "i,pde_speed,variational_speed,rel_diff,fit_residual,dt_used", rows);
  if (write_traj)
    for (int i = 0; i < n; ++i)
      io::write_trajectory_csv(out_dir / ("traj_" + std::to_string(i) + ".csv"),
                               trajectories[i]);

  double max_abs_rel = 0.0;
  double max_residual = 0.0;
  double min_dt = params.dt;
  for (const auto& row : rows) {
    if (variational) max_abs_rel = std::max(max_abs_rel, std::abs(row[3]));
    max_residual = std::max(max_residual, row[4]);
    min_dt = std::min(min_dt, row[5]);
  }

  json manifest = base_manifest("pdesim-compare", config);
  json summary = {{"max_fit_residual", max_residual},
                  {"min_dt_used", min_dt},
                  {"nominal_dt", params.dt},
                  {"diffusive_dt_limit", 0.9 *
                                             std::min(params.dx * params.dx,
                                                      grid.spacing * grid.spacing) /
                                             (4.0 * params.kappa)},
                  {"max_courant", *std::max_element(courant.begin(), courant.end())}};
  if (variational) summary["max_abs_rel_diff"] = max_abs_rel;
  else
    manifest["warnings"].push_back(
        "no variational speed for non-KPP reactions; pde speeds only");
  manifest["summary"] = summary;
  write_manifest(out_dir, manifest);
  return manifest;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

json default_config(const std::string& command) {
  if (command == "speed")
    return json{{"a", 4.0},       {"r", 4.0},         {"L", 1.0},
                {"m", 201},       {"f_prime0", 1.0},  {"seed", 12345},
                {"delta", 0.5},   {"shear", "ou"},    {"kappa", 1.0},
                {"trace", false}, {"dump_shear", false}, {"threads", 0},
                {"sampler", "milstein"}};
  if (command == "ensemble")
    return json{{"a", 4.0},        {"r", 4.0},        {"L", 1.0},
                {"dy", 0.005},     {"f_prime0", 1.0}, {"seed", 12345},
                {"deltas", json::array({0.05, 0.1, 0.2, 0.4, 1.0})},
                {"N", 10000},      {"Q", 300},        {"kappa", 1.0},
                {"threads", 0},    {"sampler", "milstein"}};
  if (command == "scaling")
    return json{{"a", 4.0},
                {"r", 4.0},
                {"L_list", json::array({1.0, 2.0, 3.0, 4.0})},
                {"dy", 0.005},
                {"f_prime0", 1.0},
                {"seed", 12345},
                {"deltas_small", json::array({0.05, 0.0707, 0.1, 0.1414, 0.2, 0.2828, 0.4})},
                {"deltas_large", json::array({28.284, 40.0, 56.569, 80.0, 113.14})},
                {"N", 10000},
                {"Q", 300},
                {"threads", 0},
                {"sampler", "milstein"}};
  if (command == "cov-sweep") {
    json alphas = json::array();
    double alpha = 0.25;
    for (int k = 0; k < 17; ++k) {
      alphas.push_back(alpha);
      alpha *= std::sqrt(2.0);
    }
    return json{{"L", 1.0},     {"dy", 0.004},     {"f_prime0", 1.0},
                {"seed", 12345}, {"alphas", alphas}, {"delta", 1.0},
                {"N", 2000},    {"threads", 0},    {"sampler", "milstein"}};
  }
  if (command == "pdf")
    return json{{"a", 4.0},    {"r", 4.0},        {"L", 1.0},     {"dy", 0.005},
                {"f_prime0", 1.0}, {"seed", 12345}, {"delta", 1.0}, {"N", 10000},
                {"Q", 300},    {"threads", 0},    {"sampler", "milstein"}};
  if (command == "bounds")
    return json{{"a", 4.0},     {"r", 4.0},        {"L", 1.0},      {"m", 201},
                {"f_prime0", 1.0}, {"seed", 12345}, {"delta", 50.0}, {"kappa", 0.01},
                {"N", 1000},    {"threads", 0},    {"sampler", "milstein"}};
  if (command == "pdesim-compare")
    return json{{"a", 4.0},
                {"r", 4.0},
                {"L", 1.0},
                {"dy", 0.05},
                {"seed", 12345},
                {"delta", 0.5},
                {"kappa", 0.025},
                {"nonlinearity", "kpp"},
                {"ignition", 0.3},
                {"bistable_root", 0.25},
                {"N", 20},
                {"dx", 0.05},
                {"dt", 0.004},
                {"t_final", 300.0},
                {"window", 20.0},
                {"record_stride", 10},
                {"fit_fraction", 0.5},
                {"write_trajectories", false},
                {"threads", 0},
                {"sampler", "milstein"}};
  throw ConfigError("unknown command: " + command);
}

json load_config_file(const fs::path& path, const std::string& command) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  json parsed;
  try {
    parsed = json::parse(io::read_text_file(path));
  } catch (const std::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  if (!parsed.is_object()) throw ConfigError("config file must hold a JSON object");
  if (parsed.contains("command") && parsed.contains("config")) {
    // Manifest from a previous run.
    if (parsed["command"].get<std::string>() != command)
      throw ConfigError("manifest was written by command '" +
                        parsed["command"].get<std::string>() + "', not '" + command + "'");
    return parsed["config"];
  }
  return parsed;
}

json run_command(const std::string& command, const json& config, const fs::path& out_dir) {
  json resolved = default_config(command);
  const auto& keys = allowed_keys(command);
  for (const auto& [key, value] : config.items()) {
    if (!keys.count(key)) throw ConfigError("config key '" + key + "' is not recognized");
    resolved[key] = value;
  }
  // The grid is given either as a node count or a spacing, not both; an
  // explicit key replaces the command's default.
  if (config.contains("m") && config.contains("dy"))
    throw ConfigError("config keys 'm' and 'dy' are mutually exclusive");
  if (config.contains("m")) resolved.erase("dy");
  if (config.contains("dy")) resolved.erase("m");

  if (command == "speed") return run_speed(resolved, out_dir);
  if (command == "ensemble") return run_ensemble_command(resolved, out_dir);
  if (command == "scaling") return run_scaling(resolved, out_dir);
  if (command == "cov-sweep") return run_cov_sweep(resolved, out_dir);
  if (command == "pdf") return run_pdf(resolved, out_dir);
  if (command == "bounds") return run_bounds(resolved, out_dir);
  if (command == "pdesim-compare") return run_pdesim_compare(resolved, out_dir);
  throw ConfigError("unknown command: " + command);
}

}  // namespace kppvar::experiments
