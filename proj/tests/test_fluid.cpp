#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ettbicc/errors.hpp"
#include "ettbicc/fluid.hpp"

using namespace ettbicc;

namespace {

FluidState reference_start() { return FluidState{50.0, 50.0, {1.0, 2.0, 1.0, 3.0}}; }

}  // namespace

TEST_CASE("default_params instantiates the canonical settings") {
  const auto p = default_params(50, 4);
  CHECK(p.carrying_C == 50);
  CHECK(p.carrying_W == 25);
  CHECK(p.beta == 0.5);
  CHECK(p.epsilon == 0.5);
  CHECK(p.alpha == 1);
  CHECK(p.b == 1);
  CHECK(p.eta == 1);
  CHECK(p.delta == 1);
  CHECK(p.a == std::vector<double>(4, 1.0));
  CHECK(p.c == std::vector<double>(4, 1.0));
  CHECK(p.effective_capacity == 49);
  CHECK_NOTHROW(p.validate());

  const auto q = default_params(100, 2);
  CHECK(q.carrying_C == 100);
  CHECK(q.carrying_W == 50);
  CHECK(q.effective_capacity == 99);
  CHECK(q.carrying_W / q.capacity == doctest::Approx(0.5));

  const auto single = default_params(50, 1);
  CHECK(single.carrying_W == 25);
  CHECK_NOTHROW(single.validate());

  CHECK(default_effective_capacity(12.5) == doctest::Approx(12.25));
}

TEST_CASE("FluidParams validation lists every offending field") {
  auto p = default_params(50, 4);
  p.a.pop_back();
  p.carrying_W = 60;
  p.effective_capacity = 55;
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 3);
  }
  p = default_params(50, 4);
  p.carrying_W = 10;  // below the fair share B/k
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("ETTBICC rhs at the reference initial state") {
  const auto p = default_params(50, 4);
  const auto d = ettbicc_rhs(p, reference_start());

  // Independent evaluation of the four-flow instantiation.
  const double dC = 50.0 * ((1.0 - 50.0 / 50.0) -
                            0.5 * (1.0 / 51.0 + 2.0 / 52.0 + 1.0 / 51.0 + 3.0 / 53.0));
  const double dW1 = 1.0 * ((1.0 - 1.0 / 25.0) + 0.5 * 50.0 / 51.0 - 50.0 / 51.0);
  const double dQ = 50.0 * (7.0 / 57.0 - std::min(57.0, 49.0) / (50.0 + std::min(57.0, 49.0)));
  CHECK(d.C == doctest::Approx(dC).epsilon(1e-14));
  CHECK(d.W[0] == doctest::Approx(dW1).epsilon(1e-14));
  CHECK(d.Q == doctest::Approx(dQ).epsilon(1e-14));

  CHECK(std::abs(d.C - (-3.35703)) < 1e-4);
  CHECK(std::abs(d.W[0] - 0.46980) < 1e-4);
  CHECK(std::abs(d.Q - (-18.6071)) < 1e-3);
  CHECK(d.W[2] == d.W[0]);
}

TEST_CASE("TTBICC rhs at the reference initial state") {
  const auto p = default_params(50, 4);
  const auto d = ttbicc_rhs(p, reference_start());
  CHECK(d.C == doctest::Approx(50.0 * (0.0 - 0.5 * 7.0) * 1.0));
  CHECK(d.C == doctest::Approx(-175.0));
  CHECK(d.Q == doctest::Approx(-2100.0));
  CHECK(d.W[0] == doctest::Approx(1.0 * ((1.0 - 1.0 / 25.0) + 0.5 * 50.0 - 50.0)));

  auto scaled = p;
  scaled.delta = 0.5;
  const auto e = ttbicc_rhs(scaled, reference_start());
  CHECK(e.C == doctest::Approx(-87.5));
  CHECK(e.Q == doctest::Approx(-1050.0));
  CHECK(e.W == d.W);
}

TEST_CASE("zero state is a fixed point and zero components stay zero") {
  const auto p = default_params(50, 4);
  const FluidState zero{0, 0, {0, 0, 0, 0}};
  for (const auto& d : {ettbicc_rhs(p, zero), ttbicc_rhs(p, zero)}) {
    CHECK(d.C == 0.0);
    CHECK(d.Q == 0.0);
    for (double w : d.W) CHECK(w == 0.0);
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int n = 0; n < 200; ++n) {
    FluidState s{u(rng), u(rng), {u(rng), u(rng), u(rng), u(rng)}};
    const int which = n % 6;
    if (which == 0) s.C = 0;
    else if (which == 1) s.Q = 0;
    else s.W[which - 2] = 0;
    for (const auto& d : {ettbicc_rhs(p, s), ttbicc_rhs(p, s)}) {
      if (which == 0) CHECK(d.C == 0.0);
      else if (which == 1) CHECK(d.Q == 0.0);
      else CHECK(d.W[which - 2] == 0.0);
    }
  }
}

TEST_CASE("rhs is equivariant under permutation of identical flows") {
  const auto p = default_params(50, 4);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int n = 0; n < 100; ++n) {
    FluidState s{u(rng), u(rng), {u(rng), u(rng), u(rng), u(rng)}};
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    FluidState t = s;
    for (int i = 0; i < 4; ++i) t.W[i] = s.W[perm[i]];
    for (auto rhs : {ettbicc_rhs, ttbicc_rhs}) {
      const auto ds = rhs(p, s);
      const auto dt = rhs(p, t);
      for (int i = 0; i < 4; ++i) CHECK(dt.W[i] == ds.W[perm[i]]);
      CHECK(dt.C == doctest::Approx(ds.C).epsilon(1e-12));
      CHECK(dt.Q == doctest::Approx(ds.Q).epsilon(1e-12));
    }
  }
}

TEST_CASE("ratio terms stay in [0, 1] on the non-negative orthant") {
  // Recover each bracket term from the rhs by switching the others off.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  auto p = default_params(50, 1);
  for (int n = 0; n < 500; ++n) {
    const double C = u(rng), Q = u(rng), W = u(rng) + 1e-6;
    const double eps_term = C / (C + W);
    const double b_term = Q + W == 0.0 ? 0.0 : Q / (Q + W);
    CHECK(eps_term >= 0.0);
    CHECK(eps_term <= 1.0);
    CHECK(b_term >= 0.0);
    CHECK(b_term <= 1.0);
    const auto d = ettbicc_rhs(p, FluidState{C, Q, {W}});
    const double bracket = d.W[0] / W;
    const double logistic = 1.0 - W / p.carrying_W;
    CHECK(bracket - logistic >= -1.0 - 1e-12);
    CHECK(bracket - logistic <= 0.5 + 1e-12);
    if (Q > 0.0) {
      const double q_bracket = d.Q / Q;
      CHECK(q_bracket >= -1.0 - 1e-12);
      CHECK(q_bracket <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("rhs rejects invalid states") {
  const auto p = default_params(50, 2);
  CHECK_THROWS_AS(ettbicc_rhs(p, FluidState{std::nan(""), 1, {1, 1}}), std::domain_error);
  CHECK_THROWS_AS(ttbicc_rhs(p, FluidState{1, -1, {1, 1}}), std::domain_error);
  CHECK_THROWS_AS(ettbicc_rhs(p, FluidState{1, 1, {1}}), std::invalid_argument);
}

TEST_CASE("pack and unpack use the (C, Q, W...) layout") {
  const FluidState s{3, 4, {5, 6}};
  CHECK(s.pack() == StateVector{3, 4, 5, 6});
  const auto back = FluidState::unpack(s.pack());
  CHECK(back.C == 3);
  CHECK(back.Q == 4);
  CHECK(back.W == std::vector<double>{5, 6});
  CHECK(s.total_window() == 11);
  CHECK(fluid_state_names(2) == std::vector<std::string>{"C", "Q", "W1", "W2"});
}

TEST_CASE("kink guard fires only next to B_eff") {
  const auto p = default_params(50, 2);
  const auto guard = kink_guard(p, 0.01);  // band 0.5
  CHECK(guard({10, 9, 20, 20}, 0));
  CHECK(guard({10, 9.4, 20, 20}, 0));
  CHECK_FALSE(guard({10, 9.6, 20, 20}, 0));
  CHECK_FALSE(guard({0, 0, 1, 1}, 0));
}

TEST_CASE("reference scenario equilibrium") {
  const auto p = default_params(50, 4);
  const auto coarse = find_equilibrium(FluidModel::Ettbicc, p, reference_start(), 200, 1e-6, 0.01);
  const auto fine = find_equilibrium(FluidModel::Ettbicc, p, reference_start(), 200, 1e-6, 0.005);

  // Step-size agreement before trusting the frozen values.
  CHECK(std::abs(coarse.state.Q - fine.state.Q) < 1e-4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(coarse.state.W[i] - fine.state.W[i]) < 1e-4);

  CHECK(coarse.converged);
  const auto& w = coarse.state.W;
  const double hi = *std::max_element(w.begin(), w.end());
  const double lo = *std::min_element(w.begin(), w.end());
  CHECK((hi - lo) / lo <= 0.01);
  const double util = coarse.state.total_window() / 50.0;
  CHECK(util >= 0.95);
  CHECK(util <= 1.0);

  // Frozen from the dt = 0.01 run. Analytically sum W = B_eff = 49, so
  // W = 12.25, and Q / (Q + W) = 1 - W / 25 gives Q = 12.75.
  CHECK(coarse.state.C < 1e-60);
  CHECK(coarse.state.Q == doctest::Approx(12.75000000080197).epsilon(1e-9));
  for (double wi : w) CHECK(wi == doctest::Approx(12.250000001506736).epsilon(1e-9));
}

TEST_CASE("TTBICC reaches the same windows with a smaller virtual queue") {
  const auto p = default_params(50, 4);
  const auto r = find_equilibrium(FluidModel::Ttbicc, p, reference_start(), 200, 1e-6);
  CHECK(r.converged);
  for (double wi : r.state.W) CHECK(wi == doctest::Approx(12.25).epsilon(1e-9));
  CHECK(r.state.Q == doctest::Approx(0.51).epsilon(1e-9));
}

TEST_CASE("find_equilibrium reports non-convergence instead of throwing") {
  const auto p = default_params(50, 4);
  const auto r = find_equilibrium(FluidModel::Ettbicc, p, reference_start(), 5, 1e-6);
  CHECK_FALSE(r.converged);
  CHECK(r.residual > 1e-6);
}

TEST_CASE("fluid CSV columns") {
  FluidRun run{FluidModel::Ettbicc, default_params(50, 2), FluidState{50, 50, {1, 2}}, {}};
  run.integrator.dt = 0.5;
  run.integrator.t_end = 1.0;
  const auto traj = run_fluid(run);
  std::ostringstream out;
  write_fluid_csv(out, traj, 2);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "t,C,Q,W1,W2,sumW");
  CHECK(first == "0,50,50,1,2,3");
}

TEST_CASE("model names round-trip") {
  CHECK(parse_fluid_model("ettbicc") == FluidModel::Ettbicc);
  CHECK(parse_fluid_model(to_string(FluidModel::Ttbicc)) == FluidModel::Ttbicc);
  CHECK_THROWS_AS(parse_fluid_model("tcp"), std::invalid_argument);
}
