#include "ettbicc/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ettbicc/csv.hpp"
#include "ettbicc/errors.hpp"

namespace ettbicc {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

// x = (C, Q, W1..Wk), out has the same layout.
void ettbicc_derivative(const FluidParams& p, std::span<const double> x, std::span<double> out) {
  const double C = x[0];
  const double Q = x[1];
  const auto W = x.subspan(2);

  double predation = 0.0;
  double load = 0.0;
  double weighted_load = 0.0;
  for (std::size_t i = 0; i < W.size(); ++i) {
    predation += ratio(W[i], C + W[i]);
    load += W[i];
    weighted_load += p.c[i] * W[i];
  }
  const double served = std::min(p.effective_capacity, Q + load);

  out[0] = C * (p.alpha * (1.0 - C / p.carrying_C) - p.beta * predation);
  out[1] = Q * (ratio(weighted_load, Q + weighted_load) - p.eta * ratio(served, Q + served));
  for (std::size_t i = 0; i < W.size(); ++i) {
    out[2 + i] = W[i] * (p.a[i] * (1.0 - W[i] / p.carrying_W) + p.epsilon * ratio(C, C + W[i]) -
                         p.b * ratio(Q, Q + W[i]));
  }
}

void ttbicc_derivative(const FluidParams& p, std::span<const double> x, std::span<double> out) {
  const double C = x[0];
  const double Q = x[1];
  const auto W = x.subspan(2);

  double load = 0.0;
  double weighted_load = 0.0;
  for (std::size_t i = 0; i < W.size(); ++i) {
    load += W[i];
    weighted_load += p.c[i] * W[i];
  }
  const double death = std::min(p.effective_capacity, Q + load);

  out[0] = C * (p.alpha * (1.0 - C / p.carrying_C) - p.beta * load) * p.delta;
  out[1] = Q * (weighted_load - death) * p.delta;
  for (std::size_t i = 0; i < W.size(); ++i) {
    out[2 + i] = W[i] * (p.a[i] * (1.0 - W[i] / p.carrying_W) + p.epsilon * C - p.b * Q);
  }
}

void check_state(const FluidParams& p, const FluidState& s) {
  if (s.W.size() != static_cast<std::size_t>(p.k)) {
    throw std::invalid_argument("state has " + std::to_string(s.W.size()) + " windows, params expect " +
                                std::to_string(p.k));
  }
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  bool good = ok(s.C) && ok(s.Q) && std::all_of(s.W.begin(), s.W.end(), ok);
  if (!good) throw std::domain_error("fluid state must be finite and non-negative");
}

template <typename F>
FluidState apply(const FluidParams& params, const FluidState& state, F derivative) {
  check_state(params, state);
  const StateVector x = state.pack();
  StateVector dx(x.size());
  derivative(params, x, dx);
  return FluidState::unpack(dx);
}

}  // namespace

FluidModel parse_fluid_model(const std::string& name) {
  if (name == "ettbicc") return FluidModel::Ettbicc;
  if (name == "ttbicc") return FluidModel::Ttbicc;
  throw std::invalid_argument("unknown model '" + name + "' (expected ettbicc or ttbicc)");
}

std::string to_string(FluidModel model) {
  return model == FluidModel::Ettbicc ? "ettbicc" : "ttbicc";
}

void FluidParams::validate() const {
  FieldChecker check;
  check.require(k >= 1, "k must be >= 1");
  check.require(positive(capacity), "B must be > 0");
  check.require(positive(alpha), "alpha must be > 0");
  check.require(positive(beta), "beta must be > 0");
  check.require(positive(delta), "delta must be > 0");
  check.require(positive(epsilon), "epsilon must be > 0");
  check.require(positive(b), "b must be > 0");
  check.require(positive(eta), "eta must be > 0");
  check.require(positive(carrying_C), "C_C must be > 0");
  check.require(positive(effective_capacity), "B_eff must be > 0");
  check.require(effective_capacity <= capacity, "B_eff must not exceed B");
  check.require(a.size() == static_cast<std::size_t>(std::max(k, 0)), "a must have k entries");
  check.require(std::all_of(a.begin(), a.end(), positive), "a entries must be > 0");
  check.require(c.size() == static_cast<std::size_t>(std::max(k, 0)), "c must have k entries");
  check.require(std::all_of(c.begin(), c.end(), positive), "c entries must be > 0");
  if (k >= 1 && positive(capacity)) {
    // A single flow still gets the B/2 cap.
    const double lower = std::min(capacity / k, capacity / 2.0);
    check.require(positive(carrying_W) && carrying_W >= lower && carrying_W <= capacity,
                  "C_W must lie in [min(B/k, B/2), B]");
  }
  check.throw_if_any();
}

double default_effective_capacity(double capacity) {
  if (capacity >= 2.0 && std::floor(capacity) == capacity) return capacity - 1.0;
  return capacity * (49.0 / 50.0);
}

FluidParams default_params(double capacity, int k) {
  FluidParams p;
  p.k = k;
  p.capacity = capacity;
  p.alpha = 1.0;
  p.beta = 0.5;
  p.delta = 1.0;
  p.a.assign(static_cast<std::size_t>(std::max(k, 0)), 1.0);
  p.epsilon = 0.5;
  p.b = 1.0;
  p.c.assign(static_cast<std::size_t>(std::max(k, 0)), 1.0);
  p.eta = 1.0;
  p.carrying_C = capacity;
  p.carrying_W = capacity / 2.0;
  p.effective_capacity = default_effective_capacity(capacity);
  return p;
}

double FluidState::total_window() const {
  double s = 0.0;
  for (double w : W) s += w;
  return s;
}

StateVector FluidState::pack() const {
  StateVector x;
  x.reserve(W.size() + 2);
  x.push_back(C);
  x.push_back(Q);
  x.insert(x.end(), W.begin(), W.end());
  return x;
}

FluidState FluidState::unpack(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("packed fluid state needs at least C and Q");
  FluidState s;
  s.C = x[0];
  s.Q = x[1];
  s.W.assign(x.begin() + 2, x.end());
  return s;
}

FluidState ettbicc_rhs(const FluidParams& params, const FluidState& state) {
  return apply(params, state, ettbicc_derivative);
}

FluidState ttbicc_rhs(const FluidParams& params, const FluidState& state) {
  return apply(params, state, ttbicc_derivative);
}

RhsFn fluid_rhs(FluidModel model, const FluidParams& params) {
  params.validate();
  const auto dim = static_cast<std::size_t>(params.k) + 2;
  auto derivative = model == FluidModel::Ettbicc ? ettbicc_derivative : ttbicc_derivative;
  return [params, dim, derivative](const StateVector& x, double) {
    if (x.size() != dim) throw std::invalid_argument("fluid state dimension mismatch");
    StateVector dx(dim);
    derivative(params, x, dx);
    return dx;
  };
}

RefinePredicate kink_guard(const FluidParams& params, double dt) {
  const double band = dt * params.capacity;
  const double knee = params.effective_capacity;
  return [band, knee](const StateVector& x, double) {
    double total = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) total += x[i];  // Q + sum W
    return std::abs(total - knee) < band;
  };
}

std::vector<std::string> fluid_state_names(int k) {
  std::vector<std::string> names{"C", "Q"};
  for (int i = 1; i <= k; ++i) names.push_back("W" + std::to_string(i));
  return names;
}

Trajectory run_fluid(const FluidRun& run) {
  run.params.validate();
  check_state(run.params, run.initial);
  return integrate(fluid_rhs(run.model, run.params), run.initial.pack(), run.integrator,
                   kink_guard(run.params, run.integrator.dt));
}

void write_fluid_csv(std::ostream& out, const Trajectory& trajectory, int k) {
  out << "t,C,Q";
  for (int i = 1; i <= k; ++i) out << ",W" << i;
  out << ",sumW\n";
  for (std::size_t n = 0; n < trajectory.size(); ++n) {
    const auto& x = trajectory.x[n];
    out << format_double(trajectory.t[n]);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      out << ',' << format_double(x[i]);
      if (i >= 2) sum += x[i];
    }
    out << ',' << format_double(sum) << '\n';
  }
}

EquilibriumResult find_equilibrium(FluidModel model, const FluidParams& params,
                                   const FluidState& state0, double horizon, double residual_tol,
                                   double dt) {
  FluidRun run{model, params, state0, IntegratorConfig{}};
  run.integrator.dt = dt;
  run.integrator.t_end = horizon;
  const Trajectory traj = run_fluid(run);

  EquilibriumResult result;
  result.state = FluidState::unpack(traj.final_state());

  const StateVector dx = fluid_rhs(model, params)(traj.final_state(), horizon);
  for (double d : dx) result.residual = std::max(result.residual, std::abs(d));

  const auto n = traj.size();
  const std::size_t tail_start = n - std::max<std::size_t>(1, n / 10);
  for (std::size_t comp = 0; comp < dx.size(); ++comp) {
    double lo = traj.x[tail_start][comp];
    double hi = lo;
    for (std::size_t i = tail_start; i < n; ++i) {
      lo = std::min(lo, traj.x[i][comp]);
      hi = std::max(hi, traj.x[i][comp]);
    }
    result.tail_variation = std::max(result.tail_variation, hi - lo);
  }
  result.converged = result.residual < residual_tol && result.tail_variation < residual_tol;
  return result;
}

}  // namespace ettbicc
