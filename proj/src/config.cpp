#include "ettbicc/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ettbicc/csv.hpp"

namespace ettbicc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::string join_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

// A scalar broadcasts to k entries.
std::vector<double> per_flow(const KeyValueConfig& cfg, const std::string& key, int k, double fallback) {
  if (!cfg.has(key)) return std::vector<double>(static_cast<std::size_t>(std::max(k, 0)), fallback);
  auto xs = cfg.get_list(key);
  if (xs.size() == 1) xs.assign(static_cast<std::size_t>(std::max(k, 0)), xs[0]);
  if (xs.size() != static_cast<std::size_t>(std::max(k, 0))) {
    throw ConfigError("key '" + key + "': expected 1 or " + std::to_string(k) + " values");
  }
  return xs;
}

int flow_count(const KeyValueConfig& cfg, const std::vector<double>& initial_W) {
  if (!cfg.has("k")) return static_cast<int>(initial_W.size());
  const long k = cfg.get_int("k");
  if (k != static_cast<long>(initial_W.size())) {
    throw ConfigError("key 'initial_W': expected k = " + std::to_string(k) + " values, got " +
                      std::to_string(initial_W.size()));
  }
  return static_cast<int>(k);
}

void require_keys(const KeyValueConfig& cfg, std::initializer_list<const char*> keys) {
  std::vector<std::string> missing;
  for (const char* key : keys) {
    if (!cfg.has(key)) missing.push_back(std::string("missing required key '") + key + "'");
  }
  if (!missing.empty()) throw ConfigError(missing);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  std::vector<std::string> problems;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
    if (key.empty()) {
      problems.push_back(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void KeyValueConfig::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const std::string key = eq == std::string::npos ? "" : trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override '" + assignment + "' is not key=value");
  set(key, trim(assignment.substr(eq + 1)));
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_number(key, get_string(key));
}

long KeyValueConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != static_cast<double>(static_cast<long>(v))) {
    throw ConfigError("key '" + key + "': expected an integer");
  }
  return static_cast<long>(v);
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::optional<double> KeyValueConfig::find_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

std::optional<long> KeyValueConfig::find_int(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_int(key);
}

void KeyValueConfig::reject_unknown(const std::set<std::string>& known) const {
  std::vector<std::string> problems;
  for (const auto& [key, value] : values_) {
    if (!known.count(key)) problems.push_back("unknown key '" + key + "'");
  }
  if (!problems.empty()) throw ConfigError(problems);
}

FluidRun fluid_run_from_config(const KeyValueConfig& cfg) {
  cfg.reject_unknown({"model", "k", "B", "alpha", "beta", "delta", "a", "epsilon", "b", "c", "eta",
                      "C_C", "C_W", "B_eff", "initial_C", "initial_Q", "initial_W", "duration", "dt",
                      "method", "tolerance", "max_halvings"});
  require_keys(cfg, {"B", "initial_W"});

  FluidRun run;
  try {
    if (cfg.has("model")) run.model = parse_fluid_model(cfg.get_string("model"));
    if (cfg.has("method")) run.integrator.method = parse_step_method(cfg.get_string("method"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const double B = cfg.get_double("B");
  const auto initial_W = cfg.get_list("initial_W");
  const int k = flow_count(cfg, initial_W);

  FluidParams& p = run.params;
  p = default_params(B, k);
  p.alpha = cfg.find_double("alpha").value_or(p.alpha);
  p.beta = cfg.find_double("beta").value_or(p.beta);
  p.delta = cfg.find_double("delta").value_or(p.delta);
  p.a = per_flow(cfg, "a", k, 1.0);
  p.epsilon = cfg.find_double("epsilon").value_or(p.epsilon);
  p.b = cfg.find_double("b").value_or(p.b);
  p.c = per_flow(cfg, "c", k, 1.0);
  p.eta = cfg.find_double("eta").value_or(p.eta);
  p.carrying_C = cfg.find_double("C_C").value_or(p.carrying_C);
  p.carrying_W = cfg.find_double("C_W").value_or(p.carrying_W);
  p.effective_capacity = cfg.find_double("B_eff").value_or(p.effective_capacity);
  p.validate();

  run.initial.C = cfg.find_double("initial_C").value_or(B);
  run.initial.Q = cfg.find_double("initial_Q").value_or(B);
  run.initial.W = initial_W;
  for (double w : initial_W) {
    if (!(w >= 0.0)) throw ConfigError("key 'initial_W': windows must be >= 0");
  }
  if (!(run.initial.C >= 0.0)) throw ConfigError("key 'initial_C': must be >= 0");
  if (!(run.initial.Q >= 0.0)) throw ConfigError("key 'initial_Q': must be >= 0");

  auto& ic = run.integrator;
  ic.t_end = cfg.find_double("duration").value_or(200.0);
  ic.dt = cfg.find_double("dt").value_or(0.01);
  ic.tolerance = cfg.find_double("tolerance").value_or(ic.tolerance);
  ic.max_halvings = static_cast<int>(cfg.find_int("max_halvings").value_or(ic.max_halvings));
  try {
    ic.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return run;
}

ScenarioConfig scenario_from_config(const KeyValueConfig& cfg) {
  cfg.reject_unknown({"k", "B", "access_bw", "rtt", "queue_capacity", "duration", "initial_W",
                      "initial_C", "initial_Q", "seed", "alpha", "beta", "eta", "C_C", "B_eff", "a",
                      "epsilon", "b"});
  require_keys(cfg, {"B", "initial_W"});

  ScenarioConfig s;
  s.capacity = cfg.get_double("B");
  s.initial_W = cfg.get_list("initial_W");
  s.k = flow_count(cfg, s.initial_W);
  s.access_bw = cfg.find_double("access_bw").value_or(2.0 * s.capacity);
  s.rtt = cfg.find_double("rtt").value_or(0.02);
  s.queue_capacity = static_cast<int>(cfg.find_int("queue_capacity").value_or(10));
  s.duration = cfg.find_double("duration").value_or(200.0);
  s.initial_C = cfg.find_double("initial_C").value_or(s.capacity);
  s.initial_Q = cfg.find_double("initial_Q").value_or(s.capacity);
  s.seed = static_cast<std::uint64_t>(cfg.find_int("seed").value_or(0));

  FluidParams& p = s.params;
  p = default_params(s.capacity, s.k);
  p.alpha = cfg.find_double("alpha").value_or(p.alpha);
  p.beta = cfg.find_double("beta").value_or(p.beta);
  p.eta = cfg.find_double("eta").value_or(p.eta);
  p.carrying_C = cfg.find_double("C_C").value_or(p.carrying_C);
  p.effective_capacity = cfg.find_double("B_eff").value_or(p.effective_capacity);
  p.a = per_flow(cfg, "a", s.k, 1.0);
  p.epsilon = cfg.find_double("epsilon").value_or(p.epsilon);
  p.b = cfg.find_double("b").value_or(p.b);
  s.validate();
  return s;
}

void write_fluid_echo(std::ostream& out, const FluidRun& run) {
  const auto& p = run.params;
  out << "model = " << to_string(run.model) << '\n'
      << "k = " << p.k << '\n'
      << "B = " << format_double(p.capacity) << '\n'
      << "alpha = " << format_double(p.alpha) << '\n'
      << "beta = " << format_double(p.beta) << '\n'
      << "delta = " << format_double(p.delta) << '\n'
      << "a = " << join_list(p.a) << '\n'
      << "epsilon = " << format_double(p.epsilon) << '\n'
      << "b = " << format_double(p.b) << '\n'
      << "c = " << join_list(p.c) << '\n'
      << "eta = " << format_double(p.eta) << '\n'
      << "C_C = " << format_double(p.carrying_C) << '\n'
      << "C_W = " << format_double(p.carrying_W) << '\n'
      << "B_eff = " << format_double(p.effective_capacity) << '\n'
      << "initial_C = " << format_double(run.initial.C) << '\n'
      << "initial_Q = " << format_double(run.initial.Q) << '\n'
      << "initial_W = " << join_list(run.initial.W) << '\n'
      << "duration = " << format_double(run.integrator.t_end) << '\n'
      << "dt = " << format_double(run.integrator.dt) << '\n'
      << "method = " << to_string(run.integrator.method) << '\n'
      << "tolerance = " << format_double(run.integrator.tolerance) << '\n'
      << "max_halvings = " << run.integrator.max_halvings << '\n';
}

void write_scenario_echo(std::ostream& out, const ScenarioConfig& s) {
  const auto& p = s.params;
  out << "k = " << s.k << '\n'
      << "B = " << format_double(s.capacity) << '\n'
      << "access_bw = " << format_double(s.access_bw) << '\n'
      << "rtt = " << format_double(s.rtt) << '\n'
      << "queue_capacity = " << s.queue_capacity << '\n'
      << "duration = " << format_double(s.duration) << '\n'
      << "initial_W = " << join_list(s.initial_W) << '\n'
      << "initial_C = " << format_double(s.initial_C) << '\n'
      << "initial_Q = " << format_double(s.initial_Q) << '\n'
      << "seed = " << s.seed << '\n'
      << "alpha = " << format_double(p.alpha) << '\n'
      << "beta = " << format_double(p.beta) << '\n'
      << "eta = " << format_double(p.eta) << '\n'
      << "C_C = " << format_double(p.carrying_C) << '\n'
      << "B_eff = " << format_double(p.effective_capacity) << '\n'
      << "a = " << join_list(p.a) << '\n'
      << "epsilon = " << format_double(p.epsilon) << '\n'
      << "b = " << format_double(p.b) << '\n';
}

}  // namespace ettbicc
