#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "ettbicc/config.hpp"
#include "ettbicc/csv.hpp"
#include "ettbicc/errors.hpp"
#include "ettbicc/fluid.hpp"
#include "ettbicc/food_chain.hpp"
#include "ettbicc/metrics.hpp"
#include "ettbicc/ode.hpp"
#include "ettbicc/packet_sim.hpp"

namespace ettbicc::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::vector<std::string> configs;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::string trace;
  bool quiet = false;
};

KeyValueConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = KeyValueConfig::load(path);
  for (const auto& o : overrides) cfg.assign(o);
  return cfg;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

void write_metrics(const fs::path& dir, const MetricsReport& report) {
  auto kv = open_output(dir, "metrics.txt");
  report.write_key_values(kv);
  auto csv = open_output(dir, "metrics.csv");
  csv << MetricsReport::csv_header() << '\n' << report.csv_row() << '\n';
}

struct FluidOutcome {
  FluidRun run;
  Trajectory trajectory;
  MetricsReport report;
};

FluidOutcome execute_fluid(const FluidRun& run) {
  FluidOutcome o{run, run_fluid(run), {}};
  o.report = report_for_fluid(o.trajectory, run.params.capacity);
  return o;
}

int cmd_fluid(const Options& opt, std::ostream& out) {
  const FluidRun run = fluid_run_from_config(load_config(opt.configs.at(0), opt.overrides));
  const FluidOutcome o = execute_fluid(run);
  const fs::path dir(opt.out_dir);
  {
    auto f = open_output(dir, "trajectory.csv");
    write_fluid_csv(f, o.trajectory, run.params.k);
    auto echo = open_output(dir, "params.txt");
    write_fluid_echo(echo, run);
  }
  write_metrics(dir, o.report);
  if (!opt.quiet) {
    out << to_string(run.model) << ": " << o.trajectory.size() << " samples to t="
        << format_double(o.trajectory.t.back()) << '\n';
    o.report.write_key_values(out);
  }
  return kExitOk;
}

int cmd_sim(const Options& opt, std::ostream& out) {
  const ScenarioConfig scenario = scenario_from_config(load_config(opt.configs.at(0), opt.overrides));
  Simulation sim(scenario);
  const Trace trace = sim.run(scenario.duration);
  const MetricsReport report = report_for_trace(trace, scenario.capacity);
  const fs::path dir(opt.out_dir);
  {
    auto f = open_output(dir, "trace.csv");
    write_trace_csv(f, trace);
    auto echo = open_output(dir, "params.txt");
    write_scenario_echo(echo, scenario);
  }
  write_metrics(dir, report);
  if (!opt.quiet) {
    out << "sim: " << trace.rows.size() << " samples, k=" << scenario.k << '\n';
    report.write_key_values(out);
  }
  return kExitOk;
}

// 'A', 'B' or 't' for the smaller of two values; a missing value loses.
char smaller(std::optional<double> a, std::optional<double> b) {
  if (!a && !b) return 't';
  if (!b) return 'A';
  if (!a) return 'B';
  if (*a == *b) return 't';
  return *a < *b ? 'A' : 'B';
}

std::string label(char c) { return c == 't' ? "tie" : std::string(1, c); }

std::string opt_value(std::optional<double> v) {
  return v ? format_double(*v) : std::string("not-converged");
}

int cmd_compare(const Options& opt, std::ostream& out) {
  if (opt.configs.size() != 2) throw ConfigError("compare needs exactly two --config files");
  const FluidRun run_a = fluid_run_from_config(load_config(opt.configs[0], opt.overrides));
  const FluidRun run_b = fluid_run_from_config(load_config(opt.configs[1], opt.overrides));

  auto future_a = std::async(std::launch::async, execute_fluid, run_a);
  const FluidOutcome b = execute_fluid(run_b);
  const FluidOutcome a = future_a.get();

  const char osc = smaller(a.report.oscillation_index, b.report.oscillation_index);
  const char conv = smaller(a.report.convergence_time, b.report.convergence_time);
  std::string verdict;
  if (osc == 't' && conv == 't') {
    verdict = "tie";
  } else if (osc != 'B' && conv != 'B') {
    verdict = "A";
  } else if (osc != 'A' && conv != 'A') {
    verdict = "B";
  } else {
    verdict = "mixed";
  }

  const fs::path dir(opt.out_dir);
  {
    auto csv = open_output(dir, "compare.csv");
    csv << "run,model," << MetricsReport::csv_header() << '\n';
    csv << "A," << to_string(run_a.model) << ',' << a.report.csv_row() << '\n';
    csv << "B," << to_string(run_b.model) << ',' << b.report.csv_row() << '\n';
    auto delta = [](std::optional<double> x, std::optional<double> y) {
      return x && y ? format_double(*y - *x) : std::string("not-converged");
    };
    csv << "B-A,," << format_double(b.report.jain - a.report.jain) << ','
        << format_double(b.report.utilization - a.report.utilization) << ','
        << delta(a.report.convergence_time, b.report.convergence_time) << ','
        << format_double(b.report.oscillation_index - a.report.oscillation_index) << ','
        << format_double(b.report.queue_max - a.report.queue_max) << ','
        << format_double(b.report.queue_mean_steady - a.report.queue_mean_steady) << ','
        << (static_cast<long long>(b.report.drops) - static_cast<long long>(a.report.drops)) << '\n';

    auto echo_a = open_output(dir, "params_A.txt");
    write_fluid_echo(echo_a, run_a);
    auto echo_b = open_output(dir, "params_B.txt");
    write_fluid_echo(echo_b, run_b);
  }

  std::ostringstream text;
  text << "oscillation_index: A=" << format_double(a.report.oscillation_index)
       << " B=" << format_double(b.report.oscillation_index) << " lower=" << label(osc) << '\n'
       << "convergence_time: A=" << opt_value(a.report.convergence_time)
       << " B=" << opt_value(b.report.convergence_time) << " shorter=" << label(conv) << '\n'
       << "verdict: " << verdict << " (A=" << to_string(run_a.model)
       << ", B=" << to_string(run_b.model) << ")\n";
  {
    auto f = open_output(dir, "verdict.txt");
    f << text.str();
  }
  out << text.str();
  return kExitOk;
}

struct FoodChainRun {
  std::string model;
  RhsFn rhs;
  std::vector<std::string> names;
  StateVector initial;
  IntegratorConfig integrator;
};

FoodChainRun foodchain_from_config(const KeyValueConfig& cfg) {
  cfg.reject_unknown({"model", "a", "b", "c", "h", "C_r", "alpha", "beta", "C_p", "epsilon", "m1",
                      "m2", "n1", "n2", "initial", "duration", "dt", "method", "tolerance",
                      "max_halvings"});
  FoodChainRun run;
  run.model = cfg.get_string("model");
  auto num = [&](const char* key, double fallback) { return cfg.find_double(key).value_or(fallback); };

  try {
    if (run.model == "lotka-volterra" || run.model == "logistic") {
      LotkaVolterraParams p{num("a", 1), num("b", 1), num("c", 1), num("h", 1), std::nullopt};
      if (run.model == "logistic") p.prey_capacity = cfg.get_double("C_r");
      run.rhs = LotkaVolterra(p).rhs();
      run.names = {"r", "f"};
    } else if (run.model == "prey-dependent" || run.model == "ratio-dependent") {
      TriTrophicParams p;
      p.alpha = num("alpha", 1);
      p.beta = num("beta", 1);
      p.C_p = num("C_p", 1);
      p.a = num("a", 1);
      p.C_r = num("C_r", 1);
      p.epsilon = num("epsilon", 1);
      p.b = num("b", 1);
      p.c = num("c", 1);
      p.h = num("h", 1);
      p.m1 = num("m1", 1);
      p.m2 = num("m2", 1);
      p.n1 = num("n1", 1);
      p.n2 = num("n2", 1);
      run.rhs = run.model == "prey-dependent" ? PreyDependentChain(p).rhs() : RatioDependentChain(p).rhs();
      run.names = {"p", "r", "f"};
    } else {
      throw ConfigError("key 'model': unknown food-chain model '" + run.model + "'");
    }
    if (cfg.has("method")) run.integrator.method = parse_step_method(cfg.get_string("method"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  run.initial = cfg.get_list("initial");
  if (run.initial.size() != run.names.size()) {
    throw ConfigError("key 'initial': expected " + std::to_string(run.names.size()) + " values");
  }
  run.integrator.t_end = num("duration", 20.0);
  run.integrator.dt = num("dt", 0.01);
  run.integrator.tolerance = num("tolerance", run.integrator.tolerance);
  run.integrator.max_halvings = static_cast<int>(cfg.find_int("max_halvings").value_or(20));
  try {
    run.integrator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return run;
}

int cmd_foodchain(const Options& opt, std::ostream& out) {
  const KeyValueConfig cfg = load_config(opt.configs.at(0), opt.overrides);
  const FoodChainRun run = foodchain_from_config(cfg);
  const Trajectory traj = integrate(run.rhs, run.initial, run.integrator);
  const fs::path dir(opt.out_dir);
  auto f = open_output(dir, "trajectory.csv");
  write_trajectory_csv(f, traj, run.names);
  auto echo = open_output(dir, "params.txt");
  for (const auto& [key, value] : cfg.entries()) echo << key << " = " << value << '\n';
  if (!opt.quiet) {
    out << run.model << ": " << traj.size() << " samples to t=" << format_double(traj.t.back()) << '\n';
  }
  return kExitOk;
}

int cmd_metrics(const Options& opt, std::ostream& out) {
  KeyValueConfig cfg;
  if (!opt.configs.empty()) cfg = KeyValueConfig::load(opt.configs[0]);
  for (const auto& o : opt.overrides) cfg.assign(o);
  if (!cfg.has("B")) throw ConfigError("missing required key 'B'");
  const double B = cfg.get_double("B");
  if (!(B > 0.0)) throw ConfigError("key 'B': must be > 0");

  CsvTable table;
  try {
    table = read_csv_file(opt.trace);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  const MetricsReport report = report_for_csv(table, B);
  write_metrics(fs::path(opt.out_dir), report);
  if (!opt.quiet) report.write_key_values(out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ETTBICC congestion-control laboratory: fluid models, packet simulation, metrics"};
  app.name("ettbicc");
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.configs, "key = value configuration file");
    if (config_required) c->required();
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", opt.overrides, "override a config key (key=value), repeatable");
    sub->add_flag("--quiet", opt.quiet, "suppress the summary on stdout");
  };

  auto* fluid = app.add_subcommand("fluid", "integrate the fluid congestion model");
  add_common(fluid, true);
  auto* sim = app.add_subcommand("sim", "run the packet-level dumbbell simulation");
  add_common(sim, true);
  auto* compare = app.add_subcommand("compare", "compare two fluid configurations");
  add_common(compare, true);
  auto* foodchain = app.add_subcommand("foodchain", "integrate a food-chain model");
  add_common(foodchain, true);
  auto* metrics = app.add_subcommand("metrics", "compute metrics for a trace CSV");
  add_common(metrics, false);
  metrics->add_option("--trace", opt.trace, "trace or trajectory CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (fluid->parsed()) return cmd_fluid(opt, out);
    if (sim->parsed()) return cmd_sim(opt, out);
    if (compare->parsed()) return cmd_compare(opt, out);
    if (foodchain->parsed()) return cmd_foodchain(opt, out);
    return cmd_metrics(opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ettbicc::cli
