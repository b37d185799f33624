// Command-line front end: evaluate effective rates, optimize strategy
// parameters, run parameter sweeps, emit the datasets behind the study's
// figures, and drive the queue simulator.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fblrate/fblrate.hpp"

using namespace fblrate;
using channel::ChannelParams;
using channel::QosSpec;
using effective::StrategyModel;
using numerics::QuadratureSpec;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_table_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << fmt(row[c]) << (c + 1 < row.size() ? "," : "\n");
  }
}

void write_table_json(const Table& table, std::ostream& out) {
  nlohmann::json j;
  j["columns"] = table.columns;
  j["rows"] = table.rows;
  out << j.dump(2) << "\n";
}

void emit_table(const Table& table, const std::string& path, const std::string& format) {
  std::ostringstream body;
  if (format == "json")
    write_table_json(table, body);
  else
    write_table_csv(table, body);
  if (path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << body.str();
    std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";
  }
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void emit_report(const KeyValues& kv, const std::string& path, const std::string& format) {
  std::ostringstream body;
  if (format == "json") {
    nlohmann::json j;
    for (const auto& [key, value] : kv) {
      try {
        std::size_t used = 0;
        const double num = std::stod(value, &used);
        if (used == value.size()) {
          j[key] = num;
          continue;
        }
      } catch (...) {
      }
      j[key] = value;
    }
    body << j.dump(2) << "\n";
  } else {
    for (const auto& [key, value] : kv) body << key << " = " << value << "\n";
  }
  if (path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << body.str();
  }
}

// flags shared by every subcommand that evaluates the model
struct ModelOpts {
  double snr = 1.0;
  double snr_db = 0.0;
  std::int64_t m = 1000;
  std::string fading = "rayleigh";
  double mean_power = 1.0;
  double z = 1.0;
  int nodes = 100;
  bool adaptive = false;
  bool clamp = false;
  double theta = 0.0;
  std::string strategy = "variable";
  double eps = 0.01;
  double rate_fixed = 1.0;

  CLI::Option* snr_opt = nullptr;
  CLI::Option* snr_db_opt = nullptr;
  CLI::Option* z_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* rate_opt = nullptr;
  CLI::Option* theta_opt = nullptr;
};

void add_model_options(CLI::App* cmd, ModelOpts& o, bool with_strategy = true) {
  o.snr_opt = cmd->add_option("--snr", o.snr, "average SNR (linear)");
  o.snr_db_opt = cmd->add_option("--snr-db", o.snr_db, "average SNR in dB");
  o.snr_db_opt->excludes(o.snr_opt);
  cmd->add_option("--m", o.m, "blocklength: channel uses per coherence block")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fading", o.fading, "fading model")
      ->check(CLI::IsMember({"rayleigh", "deterministic"}));
  cmd->add_option("--mean-power", o.mean_power, "Rayleigh mean power gain")
      ->check(CLI::PositiveNumber);
  o.z_opt = cmd->add_option("--z", o.z,
                            "power gain: deterministic fading state / per-block report point");
  cmd->add_option("--nodes", o.nodes, "Gauss-Laguerre node count")->check(CLI::PositiveNumber);
  cmd->add_flag("--adaptive-quadrature", o.adaptive,
                "use the locally refined scheme instead of Gauss-Laguerre");
  cmd->add_flag("--clamp-nonnegative", o.clamp, "clamp per-block rates at zero");
  o.theta_opt = cmd->add_option("--theta", o.theta, "QoS exponent (1/bit); 0 = unconstrained")
                    ->check(CLI::NonNegativeNumber);
  if (with_strategy) {
    cmd->add_option("--strategy", o.strategy, "transmission strategy")
        ->check(CLI::IsMember({"variable", "fixed", "power", "parallel"}));
    o.eps_opt = cmd->add_option("--eps", o.eps, "block error probability, in (0,1)")
                    ->check(CLI::Range(0.0, 1.0));
    o.rate_opt =
        cmd->add_option("--rate-fixed", o.rate_fixed, "fixed transmission rate, bits/use")
            ->check(CLI::PositiveNumber);
  }
}

ChannelParams make_params(const ModelOpts& o) {
  ChannelParams params;
  params.snr = o.snr_db_opt->count() ? std::pow(10.0, o.snr_db / 10.0) : o.snr;
  params.blocklength_m = o.m;
  if (o.fading == "deterministic")
    params.fading = channel::Deterministic{o.z};
  else
    params.fading = channel::Rayleigh{o.mean_power};
  params.clamp_nonnegative = o.clamp;
  params.validate();
  return params;
}

QuadratureSpec make_quad(const ModelOpts& o) {
  QuadratureSpec spec;
  spec.node_count = o.nodes;
  spec.scheme = o.adaptive ? numerics::QuadratureScheme::adaptive_trapezoid
                           : numerics::QuadratureScheme::gauss_laguerre;
  spec.validate();
  return spec;
}

StrategyModel make_strategy(const ModelOpts& o) {
  if (o.strategy == "fixed") return effective::FixedRate{o.rate_fixed};
  if (o.eps_opt && o.eps_opt->count() && !(o.eps > 0.0 && o.eps < 1.0))
    throw std::domain_error("--eps must lie strictly inside (0, 1)");
  if (o.strategy == "power") return effective::PowerAdapted{o.eps};
  if (o.strategy == "parallel") return effective::ParallelPair{o.eps};
  return effective::VariableRate{o.eps};
}

double snr_to_db(double snr) { return 10.0 * std::log10(snr); }

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo * std::pow(hi / lo, points > 1 ? double(i) / (points - 1) : 0.0);
  return grid;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * (points > 1 ? double(i) / (points - 1) : 0.0);
  return grid;
}

// ---------------------------------------------------------------- rate ----

int run_rate(const ModelOpts& o, const std::string& out, const std::string& format) {
  const ChannelParams params = make_params(o);
  const QosSpec qos{o.theta};
  const QuadratureSpec quad = make_quad(o);
  const StrategyModel strategy = make_strategy(o);

  const auto result = effective::effective_rate(strategy, params, qos, quad);

  KeyValues kv;
  kv.emplace_back("snr_linear", fmt(params.snr));
  kv.emplace_back("snr_db", fmt(snr_to_db(params.snr)));
  kv.emplace_back("m", fmt(double(params.blocklength_m)));
  kv.emplace_back("theta_per_bit", fmt(qos.theta));
  kv.emplace_back("strategy", o.strategy);
  if (o.strategy == "fixed")
    kv.emplace_back("rate_fixed_bits_per_cu", fmt(o.rate_fixed));
  else
    kv.emplace_back("eps", fmt(o.eps));
  if (o.z_opt->count()) {
    kv.emplace_back("z", fmt(o.z));
    if (o.strategy == "fixed") {
      kv.emplace_back("error_prob_at_z",
                      fmt(fbl::error_prob_fixed_rate(o.z, params, o.rate_fixed)));
    } else if (o.strategy == "parallel") {
      kv.emplace_back("block_rate_bits_per_cu",
                      fmt(fbl::coding_rate_parallel(o.z, params, o.eps).bits_per_channel_use));
    } else {
      kv.emplace_back("block_rate_bits_per_cu",
                      fmt(fbl::coding_rate(o.z, params, o.eps).bits_per_channel_use));
    }
  }
  kv.emplace_back("R_E_bits_per_cu", fmt(result.rate));
  kv.emplace_back("quadrature_evaluations", fmt(double(result.diagnostics.quadrature_nodes)));
  kv.emplace_back("solver_iterations", fmt(double(result.diagnostics.solver_iterations)));
  emit_report(kv, out, format);
  return 0;
}

// ------------------------------------------------------------ optimize ----

int run_optimize(const ModelOpts& o, const std::string& out, const std::string& format) {
  const ChannelParams params = make_params(o);
  const QosSpec qos{o.theta};
  const QuadratureSpec quad = make_quad(o);

  optimize::OptimizationResult result;
  std::string arg_name;
  if (o.strategy == "fixed") {
    result = optimize::optimal_fixed_rate(params, qos, quad);
    arg_name = "rate_fixed_star_bits_per_cu";
  } else {
    auto kind = optimize::EpsStrategyKind::variable_rate;
    if (o.strategy == "power") kind = optimize::EpsStrategyKind::power_adapted;
    if (o.strategy == "parallel") kind = optimize::EpsStrategyKind::parallel_pair;
    result = optimize::optimal_eps(kind, params, qos, quad);
    arg_name = "eps_star";
  }

  KeyValues kv;
  kv.emplace_back("strategy", o.strategy);
  kv.emplace_back("theta_per_bit", fmt(qos.theta));
  kv.emplace_back(arg_name, fmt(result.arg));
  kv.emplace_back("R_E_star_bits_per_cu", fmt(result.value));
  kv.emplace_back("iterations", fmt(double(result.iterations)));
  kv.emplace_back("bracket_lo", fmt(result.bracket_lo));
  kv.emplace_back("bracket_hi", fmt(result.bracket_hi));
  emit_report(kv, out, format);
  return 0;
}

// --------------------------------------------------------------- sweep ----

int run_sweep(const ModelOpts& o, const std::string& axis, double grid_min, double grid_max,
              int grid_points, bool grid_log, const std::string& out,
              const std::string& format) {
  optimize::SweepSpec spec;
  spec.params = make_params(o);
  spec.qos = {o.theta};
  spec.quad = make_quad(o);
  spec.strategy = make_strategy(o);
  if (axis == "theta")
    spec.axis = optimize::SweepAxis::theta;
  else if (axis == "m")
    spec.axis = optimize::SweepAxis::m;
  else if (axis == "snr")
    spec.axis = optimize::SweepAxis::snr;
  else if (axis == "eps")
    spec.axis = optimize::SweepAxis::eps;
  else
    spec.axis = optimize::SweepAxis::rate_fixed;
  spec.grid = grid_log ? log_grid(grid_min, grid_max, grid_points)
                       : linear_grid(grid_min, grid_max, grid_points);

  const auto rows = optimize::sweep(spec);

  Table table;
  const bool optimizing =
      spec.axis == optimize::SweepAxis::theta || spec.axis == optimize::SweepAxis::m ||
      spec.axis == optimize::SweepAxis::snr;
  const std::string arg_col =
      std::holds_alternative<effective::FixedRate>(spec.strategy)
          ? "rate_fixed_star_bits_per_cu"
          : "eps_star";
  if (optimizing)
    table.columns = {axis, arg_col, "R_E_star_bits_per_cu", "iterations"};
  else
    table.columns = {axis, "R_E_bits_per_cu"};
  int failures = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      ++failures;
      std::cerr << "row " << fmt(row.axis_value) << ": " << row.error << "\n";
      continue;
    }
    if (optimizing && row.optimum)
      table.rows.push_back({row.axis_value, row.optimum->arg, row.optimum->value,
                            double(row.optimum->iterations)});
    else if (row.evaluation)
      table.rows.push_back({row.axis_value, row.evaluation->rate});
  }
  emit_table(table, out, format);
  if (failures) std::cerr << failures << " row(s) failed\n";
  return 0;
}

// -------------------------------------------------------------- figure ----

Table figure_dataset(int id, const ModelOpts& o) {
  const ChannelParams params = make_params(o);
  const QuadratureSpec quad = make_quad(o);
  using optimize::EpsStrategyKind;
  Table t;

  auto optimal_var = [&](double theta, const ChannelParams& p) {
    return optimize::optimal_eps(EpsStrategyKind::variable_rate, p, {theta}, quad);
  };

  switch (id) {
    case 1: {
      t.columns = {"theta_per_bit", "eps", "psi", "eps_star"};
      for (double theta : {0.001, 0.01, 0.1}) {
        const auto best = numerics::golden_minimize(
            [&](double e) { return effective::psi(e, params, {theta}, quad); }, 1e-6, 0.5,
            1e-7);
        for (double eps : log_grid(1e-4, 0.6, 120))
          t.rows.push_back({theta, eps, effective::psi(eps, params, {theta}, quad),
                            best.argmin});
      }
      break;
    }
    case 2: {
      t.columns = {"theta_per_bit", "eps", "R_E_bits_per_cu"};
      for (double theta : {0.0, 0.001, 0.01, 0.1})
        for (double eps : log_grid(1e-4, 0.6, 120))
          t.rows.push_back(
              {theta, eps,
               effective::effective_rate(effective::VariableRate{eps}, params, {theta}, quad)
                   .rate});
      break;
    }
    case 3:
    case 4: {
      t.columns = {"theta_per_bit", "eps_star", "R_E_star_bits_per_cu"};
      for (double theta : log_grid(1e-3, 1.0, 60)) {
        const auto r = optimal_var(theta, params);
        t.rows.push_back({theta, r.arg, r.value});
      }
      break;
    }
    case 5: {
      t.columns = {"m", "theta_per_bit", "R_E_star_bits_per_cu", "eps_star",
                   "R_E_ideal_bits_per_cu"};
      for (double theta : {0.0, 0.001}) {
        for (double m : log_grid(200.0, 20000.0, 25)) {
          ChannelParams pm = params;
          pm.blocklength_m = std::int64_t(std::llround(m));
          const auto r = optimal_var(theta, pm);
          t.rows.push_back({double(pm.blocklength_m), theta, r.value, r.arg,
                            effective::effective_rate_ideal(pm, {theta}, quad)});
        }
      }
      break;
    }
    case 6:
    case 7: {
      t.columns = {"snr_db", "theta_per_bit", "eps_star", "R_E_star_bits_per_cu"};
      for (double theta : {0.0, 0.001, 0.01}) {
        for (double db : linear_grid(-5.0, 15.0, 21)) {
          ChannelParams ps = params;
          ps.snr = std::pow(10.0, db / 10.0);
          const auto r = optimal_var(theta, ps);
          t.rows.push_back({db, theta, r.arg, r.value});
        }
      }
      break;
    }
    case 8: {
      t.columns = {"theta_per_bit", "R_E_star_fixed_power_bits_per_cu",
                   "R_E_star_power_adapted_bits_per_cu"};
      for (double theta : log_grid(1e-3, 1.0, 20)) {
        const auto fixed_power = optimal_var(theta, params);
        const auto adapted =
            optimize::optimal_eps(EpsStrategyKind::power_adapted, params, {theta}, quad);
        t.rows.push_back({theta, fixed_power.value, adapted.value});
      }
      break;
    }
    case 9: {
      t.columns = {"theta_per_bit", "rate_fixed_bits_per_cu", "R_E_bits_per_cu"};
      for (double theta : {0.001, 0.01, 0.1})
        for (double rf : linear_grid(0.04, 3.4, 85))
          t.rows.push_back(
              {theta, rf,
               effective::effective_rate(effective::FixedRate{rf}, params, {theta}, quad)
                   .rate});
      break;
    }
    case 10: {
      t.columns = {"theta_per_bit", "R_E_star_fixed_rate_bits_per_cu",
                   "R_E_star_variable_rate_bits_per_cu"};
      for (double theta : log_grid(1e-3, 1.0, 40)) {
        const auto fixed = optimize::optimal_fixed_rate(params, {theta}, quad);
        const auto variable = optimal_var(theta, params);
        t.rows.push_back({theta, fixed.value, variable.value});
      }
      break;
    }
    case 11: {
      t.columns = {"theta_per_bit", "rate_fixed_star_bits_per_cu"};
      for (double theta : log_grid(1e-3, 1.0, 40))
        t.rows.push_back({theta, optimize::optimal_fixed_rate(params, {theta}, quad).arg});
      break;
    }
    case 12: {
      t.columns = {"rate_fixed_bits_per_cu", "m", "avg_error_prob", "outage_prob"};
      for (double rf : {0.5, 1.0, 2.0}) {
        for (double m : log_grid(1e3, 1e8, 26)) {
          ChannelParams pm = params;
          pm.blocklength_m = std::int64_t(std::llround(m));
          t.rows.push_back({rf, double(pm.blocklength_m),
                            effective::detail::fixed_rate_error_mean(pm, rf).value,
                            effective::outage_probability(rf, pm)});
        }
      }
      break;
    }
    case 13: {
      t.columns = {"theta_per_bit", "R_E_star_single_bits_per_cu",
                   "R_E_star_parallel_bits_per_cu"};
      for (double theta : log_grid(1e-3, 1.0, 40)) {
        const auto single = optimal_var(theta, params);
        const auto pair =
            optimize::optimal_eps(EpsStrategyKind::parallel_pair, params, {theta}, quad);
        t.rows.push_back({theta, single.value, pair.value});
      }
      break;
    }
    default:
      throw CLI::ValidationError("--id", "figure id must be in 1..13");
  }
  return t;
}

int run_figure(int id, const ModelOpts& o, std::string out, const std::string& format) {
  const Table table = figure_dataset(id, o);
  if (out.empty())
    out = "figure" + std::to_string(id) + (format == "json" ? ".json" : ".csv");
  emit_table(table, out, format);
  return 0;
}

// ------------------------------------------------------------ simulate ----

int run_simulate(const ModelOpts& o, double arrival, std::int64_t blocks,
                 std::int64_t warmup, std::uint64_t seed, int replicas,
                 const std::string& out, const std::string& format) {
  queuesim::SimConfig config;
  config.strategy = make_strategy(o);
  config.params = make_params(o);
  config.arrival_bits_per_block = arrival;
  config.num_blocks = blocks;
  config.warmup_blocks = warmup;
  config.seed = seed;
  config.replicas = replicas;

  const auto trace = queuesim::simulate_queue(config);

  if (!out.empty()) {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + out);
    queuesim::write_trace_csv(trace, file);
  }

  KeyValues kv;
  kv.emplace_back("arrival_bits_per_block", fmt(arrival));
  kv.emplace_back("blocks_simulated", fmt(double(trace.samples)));
  kv.emplace_back("mean_queue_bits", fmt(trace.mean_queue));
  kv.emplace_back("drained_fraction", fmt(trace.drained_fraction));
  kv.emplace_back("stable", trace.unstable ? "no" : "yes");
  if (trace.theta_hat) {
    kv.emplace_back("theta_hat_per_bit", fmt(trace.theta_hat->theta_hat));
    kv.emplace_back("theta_hat_stderr", fmt(trace.theta_hat->standard_error));
    kv.emplace_back("fit_points", fmt(double(trace.theta_hat->points_used)));
    kv.emplace_back("fit_q_lo_bits", fmt(trace.fit_q_lo));
    kv.emplace_back("fit_q_hi_bits", fmt(trace.fit_q_hi));
  } else if (!trace.unstable) {
    kv.emplace_back("theta_hat_per_bit", "undefined (empty tail)");
  }
  if (!out.empty()) kv.emplace_back("trace_file", out);
  emit_report(kv, "", format);

  return trace.unstable ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-blocklength effective-rate toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file with one section per subcommand");

  std::string out, format = "csv";
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "output file (default: stdout)");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  ModelOpts rate_opts;
  auto* rate_cmd = app.add_subcommand("rate", "evaluate the effective rate at a point");
  add_model_options(rate_cmd, rate_opts);
  add_output(rate_cmd);

  ModelOpts opt_opts;
  auto* opt_cmd =
      app.add_subcommand("optimize", "find the optimal eps or fixed rate for a strategy");
  add_model_options(opt_cmd, opt_opts);
  add_output(opt_cmd);

  ModelOpts sweep_opts;
  std::string sweep_axis = "theta";
  double grid_min = 1e-3, grid_max = 1.0;
  int grid_points = 40;
  bool grid_log = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "tabulate over theta, m, snr, eps or r_f");
  add_model_options(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", sweep_axis, "sweep axis")
      ->check(CLI::IsMember({"theta", "m", "snr", "eps", "rate-fixed"}));
  sweep_cmd->add_option("--grid-min", grid_min, "first grid value");
  sweep_cmd->add_option("--grid-max", grid_max, "last grid value");
  sweep_cmd->add_option("--grid-points", grid_points, "grid size")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--grid-log", grid_log, "log-spaced grid");
  add_output(sweep_cmd);

  ModelOpts fig_opts;
  int figure_id = 0;
  auto* fig_cmd = app.add_subcommand("figure", "emit the dataset behind one study figure");
  add_model_options(fig_cmd, fig_opts, false);
  fig_cmd->add_option("--id", figure_id, "figure id, 1..13")
      ->required()
      ->check(CLI::Range(1, 13));
  add_output(fig_cmd);

  ModelOpts sim_opts;
  double arrival = 0.0;
  std::int64_t blocks = 1000000, warmup = 10000;
  std::uint64_t seed = 1;
  int replicas = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "run the buffer simulator");
  add_model_options(sim_cmd, sim_opts);
  sim_cmd->add_option("--arrival", arrival, "constant arrival, bits per block")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--blocks", blocks, "total simulated blocks")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--warmup", warmup, "per-replica warmup blocks")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", seed, "RNG seed");
  sim_cmd->add_option("--replicas", replicas, "parallel replicas on disjoint substreams")
      ->check(CLI::PositiveNumber);
  add_output(sim_cmd);

  // options given after a subcommand name (notably --config) resolve
  // against the parent as well
  for (CLI::App* sub : {rate_cmd, opt_cmd, sweep_cmd, fig_cmd, sim_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rate_cmd->parsed()) return run_rate(rate_opts, out, format);
    if (opt_cmd->parsed()) return run_optimize(opt_opts, out, format);
    if (sweep_cmd->parsed())
      return run_sweep(sweep_opts, sweep_axis, grid_min, grid_max, grid_points, grid_log,
                       out, format);
    if (fig_cmd->parsed()) return run_figure(figure_id, fig_opts, out, format);
    if (sim_cmd->parsed())
      return run_simulate(sim_opts, arrival, blocks, warmup, seed, replicas, out, format);
  } catch (const numerics::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const queuesim::InstabilityError& e) {
    std::cerr << "simulation instability: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
