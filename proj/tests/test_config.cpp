#include <doctest.h>

#include <sstream>

#include "ettbicc/config.hpp"

using namespace ettbicc;

namespace {

KeyValueConfig parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueConfig::parse(in, "test");
}

std::string message_of(const auto& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const std::string kConfigDir = ETTBICC_CONFIG_DIR;

}  // namespace

TEST_CASE("parse key = value lines with comments and lists") {
  const auto cfg = parse("# header\nB = 50   # trailing\n\n  k=4\ninitial_W = 1, 2,1 ,3\nmodel = ttbicc\n");
  CHECK(cfg.get_double("B") == 50);
  CHECK(cfg.get_int("k") == 4);
  CHECK(cfg.get_list("initial_W") == std::vector<double>{1, 2, 1, 3});
  CHECK(cfg.get_string("model") == "ttbicc");
  CHECK_FALSE(cfg.find_double("alpha").has_value());
}

TEST_CASE("malformed lines and values are reported") {
  CHECK(message_of([] { parse("B 50\n"); }).find("test:1") != std::string::npos);
  const auto cfg = parse("B = fifty\nk = 2.5\n");
  CHECK(message_of([&] { cfg.get_double("B"); }).find("'B'") != std::string::npos);
  CHECK_THROWS_AS(cfg.get_int("k"), ConfigError);
}

TEST_CASE("missing required key names the key") {
  const auto cfg = parse("k = 4\ninitial_W = 1,2,1,3\n");
  CHECK(message_of([&] { fluid_run_from_config(cfg); }).find("missing required key 'B'") !=
        std::string::npos);
  CHECK(message_of([&] { scenario_from_config(cfg); }).find("'B'") != std::string::npos);
}

TEST_CASE("unknown keys are rejected") {
  const auto cfg = parse("B = 50\nk = 1\ninitial_W = 1\nbogus = 3\n");
  CHECK(message_of([&] { fluid_run_from_config(cfg); }).find("unknown key 'bogus'") !=
        std::string::npos);
}

TEST_CASE("fluid config defaults and broadcasting") {
  const auto run = fluid_run_from_config(parse("B = 50\nk = 2\ninitial_W = 1, 2\na = 0.5\n"));
  CHECK(run.model == FluidModel::Ettbicc);
  CHECK(run.params.a == std::vector<double>{0.5, 0.5});
  CHECK(run.params.c == std::vector<double>{1, 1});
  CHECK(run.params.carrying_W == 25);
  CHECK(run.params.effective_capacity == 49);
  CHECK(run.initial.C == 50);
  CHECK(run.initial.Q == 50);
  CHECK(run.integrator.dt == 0.01);
  CHECK(run.integrator.t_end == 200);
}

TEST_CASE("overrides replace file values") {
  auto cfg = KeyValueConfig::load(kConfigDir + "/fairness.cfg");
  cfg.assign("model=ttbicc");
  cfg.assign("B_eff = 48");
  const auto run = fluid_run_from_config(cfg);
  CHECK(run.model == FluidModel::Ttbicc);
  CHECK(run.params.effective_capacity == 48);
  CHECK_THROWS_AS(cfg.assign("no-equals"), ConfigError);
}

TEST_CASE("initial_W length must match k") {
  const auto cfg = parse("B = 50\nk = 4\ninitial_W = 1, 2\n");
  CHECK(message_of([&] { fluid_run_from_config(cfg); }).find("initial_W") != std::string::npos);
}

TEST_CASE("invalid parameters surface as configuration errors") {
  const auto cfg = parse("B = 50\nk = 2\ninitial_W = 1, 2\nC_W = 80\n");
  CHECK_THROWS_AS(fluid_run_from_config(cfg), ConfigError);
}

TEST_CASE("bundled configs load") {
  for (const char* name : {"fairness.cfg", "utilization.cfg", "ttbicc.cfg"}) {
    CAPTURE(name);
    CHECK_NOTHROW(fluid_run_from_config(KeyValueConfig::load(kConfigDir + "/" + name)));
  }
  const auto sim = scenario_from_config(KeyValueConfig::load(kConfigDir + "/dumbbell.cfg"));
  CHECK(sim.k == 4);
  CHECK(sim.queue_capacity == 10);
  CHECK(sim.access_bw == 100);
}

TEST_CASE("fluid echo reloads bit for bit") {
  auto cfg = parse("B = 37.3\nk = 3\ninitial_W = 0.1, 2.7, 1e-3\nalpha = 0.3\nc = 0.7, 1.1, 0.9\n"
                   "dt = 0.003\nmethod = rk4-halving\n");
  const auto run = fluid_run_from_config(cfg);
  std::ostringstream echo;
  write_fluid_echo(echo, run);
  std::istringstream in(echo.str());
  const auto again = fluid_run_from_config(KeyValueConfig::parse(in));
  std::ostringstream echo2;
  write_fluid_echo(echo2, again);
  CHECK(echo.str() == echo2.str());
  CHECK(again.params.c == run.params.c);
  CHECK(again.initial.W == run.initial.W);
  CHECK(again.params.effective_capacity == run.params.effective_capacity);
  CHECK(again.integrator.method == StepMethod::Rk4Halving);
}

TEST_CASE("scenario echo reloads bit for bit") {
  auto cfg = KeyValueConfig::load(kConfigDir + "/dumbbell.cfg");
  cfg.assign("rtt=0.013");
  const auto sc = scenario_from_config(cfg);
  std::ostringstream echo;
  write_scenario_echo(echo, sc);
  std::istringstream in(echo.str());
  const auto again = scenario_from_config(KeyValueConfig::parse(in));
  std::ostringstream echo2;
  write_scenario_echo(echo2, again);
  CHECK(echo.str() == echo2.str());
  CHECK(again.rtt == 0.013);
}
