#include "gpderiv/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gpderiv/configio.hpp"
#include "gpderiv/effective_dims.hpp"
#include "gpderiv/experiments.hpp"
#include "gpderiv/selection.hpp"

namespace gpderiv::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct RunContext {
  ConfigMap config;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> outputs;

  void write(const std::string& name, const std::string& text) {
    write_text_file((out / name).string(), text);
    outputs.push_back(name);
  }
};

KernelSpec kernel_from_config(const ConfigMap& cfg, const std::string& section) {
  const std::string family = cfg.get_string(section, "family");
  if (family == "matern") return KernelSpec::matern(cfg.get_double(section, "nu"));
  if (family == "se") return KernelSpec::squared_exponential();
  if (family == "sobolev2") return KernelSpec::sobolev2();
  if (family == "spectral") {
    const BasisId basis = parse_basis(cfg.get_string(section, "basis"));
    const std::string decay = cfg.get_string(section, "decay");
    const double scale = cfg.get_double(section, "scale", 1.0);
    EigenSequence eig = EigenSequence::polynomial(2.0);
    if (decay == "polynomial")
      eig = EigenSequence::polynomial(cfg.get_double(section, "alpha"), scale);
    else if (decay == "exponential")
      eig = EigenSequence::exponential(cfg.get_double(section, "gamma"), scale);
    else if (decay == "explicit")
      eig = EigenSequence::explicit_values(cfg.get_double_list(section, "values"));
    else
      throw ConfigError(section + ".decay must be polynomial | exponential | explicit");
    return KernelSpec::spectral(basis, eig, cfg.get_int(section, "truncation", 2000));
  }
  throw ConfigError(section + ".family must be matern | se | sobolev2 | spectral");
}

EigenSequence eigenseq_from_config(const ConfigMap& cfg, const std::string& section) {
  const std::string decay = cfg.get_string(section, "decay");
  const double scale = cfg.get_double(section, "scale", 1.0);
  if (decay == "polynomial")
    return EigenSequence::polynomial(cfg.get_double(section, "alpha"), scale);
  if (decay == "exponential")
    return EigenSequence::exponential(cfg.get_double(section, "gamma"), scale);
  if (decay == "explicit")
    return EigenSequence::explicit_values(cfg.get_double_list(section, "values"));
  throw ConfigError(section + ".decay must be polynomial | exponential | explicit");
}

std::vector<double> lambda_grid_from_config(const ConfigMap& cfg, const std::string& section) {
  if (cfg.has(section, "lambda_grid")) return cfg.get_double_list(section, "lambda_grid");
  const double lo = cfg.get_double(section, "lambda_min", 1e-8);
  const double hi = cfg.get_double(section, "lambda_max", 1.0);
  const int count = static_cast<int>(cfg.get_int(section, "lambda_count", 30));
  return logspace(lo, hi, count);
}

Dataset dataset_from_config(const ConfigMap& cfg, std::uint64_t seed) {
  const std::string source = cfg.get_string("data", "source", "simulate");
  if (source == "simulate") {
    const int n = static_cast<int>(cfg.get_int("data", "n"));
    const double s2 = cfg.get_double("data", "sigma0_sq", 0.1);
    Rng rng = Rng::stream(seed, 0);
    if (cfg.has("data", "truth_coeffs")) {
      // custom simulation truth as (basis name, coefficient array)
      SeriesFunction truth;
      truth.basis = parse_basis(cfg.get_string("data", "truth_basis", "coshalf"));
      truth.coeffs = to_vector(cfg.get_double_list("data", "truth_coeffs"));
      Dataset d;
      d.x.resize(n);
      d.y.resize(n);
      for (int i = 0; i < n; ++i) d.x(i) = rng.next_uniform();
      const Vector f = series_eval_grid(truth, 0, d.x);
      const double sd = std::sqrt(s2);
      for (int i = 0; i < n; ++i) d.y(i) = f(i) + sd * rng.next_normal();
      return d;
    }
    return simulate_dataset(n, s2, rng);
  }
  if (source == "file") {
    const std::string path = cfg.get_string("data", "path");
    const std::string text = read_text_file(path);
    Dataset d;
    std::vector<double> xs, ys;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (first) {  // header row
        first = false;
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ConfigError("data file: expected 'x,y' rows");
      xs.push_back(std::stod(line.substr(0, comma)));
      ys.push_back(std::stod(line.substr(comma + 1)));
    }
    d.x = to_vector(xs);
    d.y = to_vector(ys);
    return d;
  }
  throw ConfigError("data.source must be simulate | file");
}

// Tunes (lambda, sigma2) according to [section] rules; EB by default.
// When `trace` is given, the per-candidate score trace is copied there.
std::pair<double, double> tune_from_config(const ConfigMap& cfg, const std::string& section,
                                           const KernelSpec& kernel, const Dataset& data,
                                           std::vector<ScoreEntry>* trace = nullptr) {
  const std::string lambda_rule = cfg.get_string(section, "lambda_rule", "eb");
  double lambda = 0.0, sigma2 = 0.0;
  if (lambda_rule == "fixed") {
    lambda = cfg.get_double(section, "lambda");
  } else if (lambda_rule == "eb") {
    const SelectionResult sel =
        select_lambda(kernel, data, lambda_grid_from_config(cfg, section));
    lambda = sel.lambda;
    if (trace) *trace = sel.trace;
  } else {
    throw ConfigError(section + ".lambda_rule must be eb | fixed");
  }
  const std::string sigma_rule = cfg.get_string(section, "sigma2_rule", "mmle");
  if (sigma_rule == "fixed")
    sigma2 = cfg.get_double(section, "sigma2");
  else if (sigma_rule == "mmle")
    sigma2 = mmle_sigma2(kernel, data, lambda);
  else
    throw ConfigError(section + ".sigma2_rule must be mmle | fixed");
  return {lambda, sigma2};
}

std::vector<MethodSpec> methods_from_config(const ConfigMap& cfg) {
  std::vector<MethodSpec> methods;
  for (const auto& name : cfg.get_string_list("study", "methods"))
    methods.push_back(MethodSpec::parse(name));
  return methods;
}

// ---------------------------------------------------------------------------

void run_fit(RunContext& ctx) {
  const KernelSpec kernel = kernel_from_config(ctx.config, "kernel");
  const Dataset data = dataset_from_config(ctx.config, ctx.seed);
  std::vector<ScoreEntry> trace;
  const auto [lambda, sigma2] = tune_from_config(ctx.config, "fit", kernel, data, &trace);
  if (!trace.empty()) {
    CsvWriter tr({"candidate_lambda", "score"});
    for (const auto& e : trace) {
      tr.cell(e.lambda).cell(e.score);
      tr.end_row();
    }
    ctx.write("selection_trace.csv", tr.str());
  }
  const std::vector<int> orders = ctx.config.get_int_list("fit", "orders", {0});
  const int grid_points = static_cast<int>(ctx.config.get_int("fit", "grid_points", 101));
  const double level = ctx.config.get_double("fit", "band_level", 0.95);
  const int draws = static_cast<int>(ctx.config.get_int("fit", "band_draws", 2000));

  const FittedGP gp = fit(kernel, data, lambda, sigma2);
  const Vector grid = to_vector(linspace(0.0, 1.0, grid_points));

  std::vector<std::string> header = {"x"};
  for (int k : orders) {
    header.push_back("mean_" + std::to_string(k));
    header.push_back("var_" + std::to_string(k));
    header.push_back("band_lo_" + std::to_string(k));
    header.push_back("band_hi_" + std::to_string(k));
  }
  CsvWriter csv(header);
  std::map<int, Vector> mean, var;
  std::map<int, CredibleBand> band;
  for (std::size_t oi = 0; oi < orders.size(); ++oi) {
    const int k = orders[oi];
    mean[k] = gp.posterior_mean_grid(k, grid);
    var[k] = gp.posterior_cov_grid(k, grid).diagonal();
    Rng rng = Rng::stream(ctx.seed, 1 + oi);
    band[k] = credible_band(gp, k, grid, level, draws, rng);
  }
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    csv.cell(grid(i));
    for (int k : orders) {
      csv.cell(mean[k](i));
      csv.cell(var[k](i));
      csv.cell(mean[k](i) - band[k].radius);
      csv.cell(mean[k](i) + band[k].radius);
    }
    csv.end_row();
  }
  ctx.write("fit.csv", csv.str());

  json extra = {{"lambda", lambda}, {"sigma2", sigma2}, {"band_level", level}};
  for (int k : orders) extra["band_radius_" + std::to_string(k)] = band[k].radius;
  ctx.write("fit_summary.json", extra.dump(2) + "\n");
}

void run_table(RunContext& ctx) {
  StudyConfig config;
  config.n_values = ctx.config.get_int_list("study", "n_values");
  config.replications = static_cast<int>(ctx.config.get_int("study", "replications"));
  config.sigma0_sq = ctx.config.get_double("study", "sigma0_sq", 0.1);
  config.methods = methods_from_config(ctx.config);
  config.grid_points = static_cast<int>(ctx.config.get_int("study", "grid_points", 100));
  config.seed = ctx.seed;
  config.derivative_orders = ctx.config.get_int_list("study", "derivative_orders", {0, 1});
  if (ctx.config.has("study", "lambda_grid") || ctx.config.has("study", "lambda_min") ||
      ctx.config.has("study", "lambda_max") || ctx.config.has("study", "lambda_count"))
    config.lambda_grid = lambda_grid_from_config(ctx.config, "study");
  if (ctx.config.has("study", "nu_candidates"))
    config.nu_candidates = ctx.config.get_double_list("study", "nu_candidates");
  config.threads = ctx.threads;

  const StudyResult result = replicate_study(config);

  CsvWriter csv({"method", "n", "order", "mean_rmse", "median_rmse", "se", "reps", "failures"});
  for (const auto& c : result.cells) {
    csv.cell(c.method).cell(c.n).cell(c.order).cell(c.mean_rmse).cell(c.median_rmse)
        .cell(c.se).cell(c.reps).cell(c.failures);
    csv.end_row();
  }
  ctx.write("table.csv", csv.str());

  CsvWriter rec({"method", "n", "rep", "stream_index", "failed", "lambda", "sigma2", "nu",
                 "order", "rmse"});
  for (const auto& r : result.records) {
    if (r.failed) {
      rec.cell(r.method).cell(r.n).cell(r.rep).cell(static_cast<std::int64_t>(r.stream_index))
          .cell(true).cell(0.0).cell(0.0).cell(r.nu).cell(-1).cell(0.0);
      rec.end_row();
      continue;
    }
    for (const auto& [k, v] : r.rmse_by_order) {
      rec.cell(r.method).cell(r.n).cell(r.rep).cell(static_cast<std::int64_t>(r.stream_index))
          .cell(false).cell(r.lambda).cell(r.sigma2).cell(r.nu).cell(k).cell(v);
      rec.end_row();
    }
  }
  ctx.write("table_records.csv", rec.str());

  json extra = {{"splitting_rule", result.splitting_rule},
                {"master_seed", result.master_seed},
                {"lambda_grid_default", config.lambda_grid.empty()}};
  ctx.write("table_meta.json", extra.dump(2) + "\n");
}

void run_rates(RunContext& ctx) {
  RateStudyConfig config;
  const std::string cls = ctx.config.get_string("rates", "class");
  if (cls == "holder")
    config.space = FunctionSpace::holder(ctx.config.get_double("rates", "alpha"));
  else if (cls == "analytic")
    config.space = FunctionSpace::analytic(ctx.config.get_double("rates", "gamma"));
  else
    throw ConfigError("rates.class must be holder | analytic");
  config.orders = ctx.config.get_int_list("rates", "orders", {0});
  config.n_values = ctx.config.get_int_list("rates", "n_values");
  config.replications = static_cast<int>(ctx.config.get_int("rates", "replications"));
  config.sigma0_sq = ctx.config.get_double("rates", "sigma0_sq", 0.1);
  config.kernel_scale = ctx.config.get_double("rates", "kernel_scale", 10.0);
  config.truncation = ctx.config.get_int("rates", "truncation", 2000);
  config.grid_points = static_cast<int>(ctx.config.get_int("rates", "grid_points", 100));
  config.seed = ctx.seed;
  config.threads = ctx.threads;

  const RateStudyResult result = rate_study(config);

  CsvWriter csv({"order", "slope", "theory_slope"});
  for (const auto& c : result.curves) {
    csv.cell(c.order).cell(c.slope).cell(c.theory_slope);
    csv.end_row();
  }
  ctx.write("rates.csv", csv.str());

  CsvWriter pts({"order", "n", "median_rmse", "lambda"});
  for (const auto& c : result.curves)
    for (std::size_t i = 0; i < c.medians.size(); ++i) {
      pts.cell(c.order).cell(c.medians[i].first).cell(c.medians[i].second)
          .cell(c.lambdas[i].second);
      pts.end_row();
    }
  ctx.write("rates_points.csv", pts.str());
}

void run_bands(RunContext& ctx) {
  const KernelSpec kernel = kernel_from_config(ctx.config, "kernel");
  const int n = static_cast<int>(ctx.config.get_int("bands", "n"));
  const double sigma0_sq = ctx.config.get_double("bands", "sigma0_sq", 0.1);
  const int reps = static_cast<int>(ctx.config.get_int("bands", "replications", 1));
  const double level = ctx.config.get_double("bands", "level", 0.95);
  const int draws = static_cast<int>(ctx.config.get_int("bands", "draws", 2000));
  const std::vector<int> orders = ctx.config.get_int_list("bands", "orders", {0, 1});
  const int grid_points = static_cast<int>(ctx.config.get_int("bands", "grid_points", 101));

  const Vector grid = to_vector(linspace(0.0, 1.0, grid_points));
  std::map<int, Vector> truth;
  for (int k : orders) truth[k] = series_eval_grid(simulation_truth(), k, grid);

  std::map<int, int> covered;
  std::map<int, double> radius_sum;
  std::map<int, CredibleBand> first_band;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(ctx.seed, static_cast<std::uint64_t>(r));
    const Dataset data = simulate_dataset(n, sigma0_sq, rng);
    const auto [lambda, sigma2] = tune_from_config(ctx.config, "bands", kernel, data);
    const FittedGP gp = fit(kernel, data, lambda, sigma2);
    for (int k : orders) {
      CredibleBand band = credible_band(gp, k, grid, level, draws, rng);
      const bool inside =
          ((truth[k] - band.center).cwiseAbs().array() <= band.radius).all();
      covered[k] += inside ? 1 : 0;
      radius_sum[k] += band.radius;
      if (r == 0) first_band[k] = std::move(band);
    }
  }

  std::vector<std::string> header = {"x"};
  for (int k : orders) {
    header.push_back("center_" + std::to_string(k));
    header.push_back("band_lo_" + std::to_string(k));
    header.push_back("band_hi_" + std::to_string(k));
    header.push_back("truth_" + std::to_string(k));
  }
  CsvWriter csv(header);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    csv.cell(grid(i));
    for (int k : orders) {
      const auto& b = first_band[k];
      csv.cell(b.center(i)).cell(b.center(i) - b.radius).cell(b.center(i) + b.radius)
          .cell(truth[k](i));
    }
    csv.end_row();
  }
  ctx.write("bands.csv", csv.str());

  CsvWriter cov({"order", "level", "replications", "coverage", "mean_radius"});
  for (int k : orders) {
    cov.cell(k).cell(level).cell(reps)
        .cell(static_cast<double>(covered[k]) / static_cast<double>(reps))
        .cell(radius_sum[k] / static_cast<double>(reps));
    cov.end_row();
  }
  ctx.write("coverage.csv", cov.str());
}

void run_spectra(RunContext& ctx) {
  const EigenSequence eig = eigenseq_from_config(ctx.config, "spectra");
  const BasisId basis = parse_basis(ctx.config.get_string("spectra", "basis", "fourier"));
  const std::vector<int> order_list = ctx.config.get_int_list("spectra", "orders", {0, 1});
  const std::set<int> orders(order_list.begin(), order_list.end());
  EffectiveDimsOptions opts;
  opts.grid_size = static_cast<int>(ctx.config.get_int("spectra", "grid_size", 1001));

  std::vector<double> lambdas;
  if (ctx.config.has("spectra", "lambda_grid"))
    lambdas = ctx.config.get_double_list("spectra", "lambda_grid");
  else
    lambdas = logspace(ctx.config.get_double("spectra", "lambda_min", 1e-6),
                       ctx.config.get_double("spectra", "lambda_max", 1e-2),
                       static_cast<int>(ctx.config.get_int("spectra", "lambda_count", 9)));

  std::vector<std::string> header = {"lambda", "kappa_tilde_sq", "kappa_tilde_bound",
                                     "kappa_hat_01_sq", "hat01_diverged", "truncation",
                                     "tail_bound"};
  for (int k : orders) {
    header.push_back("kappa_tilde_" + std::to_string(k) + std::to_string(k) + "_sq");
    header.push_back("kappa_tilde_" + std::to_string(k) + std::to_string(k) + "_bound");
    header.push_back("tilde_" + std::to_string(k) + "_diverged");
    header.push_back("kappa_hat_" + std::to_string(k + 1) + std::to_string(k + 1) + "_sq");
    header.push_back("hat_" + std::to_string(k + 1) + "_diverged");
  }
  CsvWriter csv(header);
  for (double lambda : lambdas) {
    const EffectiveDims dims = effective_dims(eig, basis, lambda, orders, opts);
    csv.cell(dims.lambda).cell(dims.kappa_tilde_sq).cell(dims.kappa_tilde_sq_bound)
        .cell(dims.kappa_hat_01_sq).cell(dims.hat01_diverged)
        .cell(static_cast<std::int64_t>(dims.truncation)).cell(dims.tail_bound);
    for (int k : orders) {
      csv.cell(dims.kappa_tilde_kk_sq.at(k)).cell(dims.kappa_tilde_kk_bound.at(k))
          .cell(dims.kappa_tilde_diverged.at(k)).cell(dims.kappa_hat_k1_sq.at(k))
          .cell(dims.kappa_hat_diverged.at(k));
    }
    csv.end_row();
  }
  ctx.write("spectra.csv", csv.str());
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(const CliConfig& cli) {
  try {
    RunContext ctx{ConfigMap::parse_file(cli.config_path), cli.output_dir, 0, cli.threads, {}};
    std::error_code ec;
    std::filesystem::create_directories(ctx.out, ec);
    if (ec || !std::filesystem::is_directory(ctx.out))
      throw IoError("cannot create output directory: " + cli.output_dir);

    if (cli.seed_override)
      ctx.config.set("run", "seed", std::to_string(*cli.seed_override));
    ctx.seed = ctx.config.get_uint64("run", "seed", 0);
    if (ctx.threads == 0)
      ctx.threads = static_cast<int>(ctx.config.get_int("run", "threads", 0));

    if (cli.command == "fit")
      run_fit(ctx);
    else if (cli.command == "table")
      run_table(ctx);
    else if (cli.command == "rates")
      run_rates(ctx);
    else if (cli.command == "bands")
      run_bands(ctx);
    else if (cli.command == "spectra")
      run_spectra(ctx);
    else
      throw ConfigError("unknown command: " + cli.command);

    ctx.config.require_all_consumed();
    ctx.write("config_echo.cfg", ctx.config.echo());

    json meta = {{"command", cli.command},
                 {"config_path", cli.config_path},
                 {"seed", ctx.seed},
                 {"threads", ctx.threads},
                 {"version", kVersion},
                 {"timestamp", iso_timestamp()},
                 {"outputs", ctx.outputs}};
    ctx.write("run_metadata.json", meta.dump(2) + "\n");
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const CapabilityError& e) {
    std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const UnsupportedKernelError& e) {
    std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << json{{"error", {{"kind", "io"}, {"message", e.what()}}}}.dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "numerical"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  }
}

}  // namespace gpderiv::cli
