#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ettbicc/errors.hpp"
#include "ettbicc/fluid.hpp"
#include "ettbicc/packet_sim.hpp"

namespace ettbicc {

// Line-oriented `key = value` file. `#` starts a comment; lists are
// comma-separated.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<input>");
  static KeyValueConfig load(const std::string& path);

  // `key=value`; later assignments win.
  void assign(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  std::optional<double> find_double(const std::string& key) const;
  std::optional<long> find_int(const std::string& key) const;

  // Throws ConfigError naming every key outside `known`.
  void reject_unknown(const std::set<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

// Keys: model, k, B, alpha, beta, delta, a, epsilon, b, c, eta, C_C, C_W,
// B_eff, initial_C, initial_Q, initial_W, duration, dt, method, tolerance,
// max_halvings. B and initial_W are required.
FluidRun fluid_run_from_config(const KeyValueConfig& cfg);

// Keys: k, B, access_bw, rtt, queue_capacity, duration, initial_W,
// initial_C, initial_Q, seed, alpha, beta, eta, C_C, B_eff, a, epsilon, b.
// B and initial_W are required.
ScenarioConfig scenario_from_config(const KeyValueConfig& cfg);

// Parameter echoes in the same format; loading one back reproduces the run
// bit for bit.
void write_fluid_echo(std::ostream& out, const FluidRun& run);
void write_scenario_echo(std::ostream& out, const ScenarioConfig& scenario);

}  // namespace ettbicc
