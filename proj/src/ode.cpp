#include "ettbicc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ettbicc/csv.hpp"

namespace ettbicc {

namespace {

void require_finite(const StateVector& v, double t, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw IntegrationError(t, i, what);
    }
  }
}

StateVector axpy(const StateVector& x, double h, const StateVector& k) {
  StateVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * k[i];
  return out;
}

StateVector eval(const RhsFn& rhs, const StateVector& x, double t) {
  StateVector dx = rhs(x, t);
  if (dx.size() != x.size()) {
    throw IntegrationError(t, dx.size(), "rhs changed the state dimension");
  }
  require_finite(dx, t, "non-finite derivative");
  return dx;
}

double max_abs_diff(const StateVector& a, const StateVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

IntegrationError::IntegrationError(double t, std::size_t component, const std::string& what)
    : std::runtime_error(what + " at t=" + format_double(t) + " (component " +
                         std::to_string(component) + ")"),
      t_(t),
      component_(component) {}

StepMethod parse_step_method(const std::string& name) {
  if (name == "rk4-fixed") return StepMethod::Rk4Fixed;
  if (name == "rk4-halving") return StepMethod::Rk4Halving;
  throw std::invalid_argument("unknown integration method '" + name + "'");
}

std::string to_string(StepMethod method) {
  return method == StepMethod::Rk4Fixed ? "rk4-fixed" : "rk4-halving";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be > 0");
  if (dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
  if (method == StepMethod::Rk4Halving && !(tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be > 0 in rk4-halving mode");
  }
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
}

std::vector<double> Trajectory::component(std::size_t component) const {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& s : x) out.push_back(s.at(component));
  return out;
}

StateVector rk4_step(const RhsFn& rhs, const StateVector& state, double t, double dt) {
  const StateVector k1 = eval(rhs, state, t);
  const StateVector k2 = eval(rhs, axpy(state, 0.5 * dt, k1), t + 0.5 * dt);
  const StateVector k3 = eval(rhs, axpy(state, 0.5 * dt, k2), t + 0.5 * dt);
  const StateVector k4 = eval(rhs, axpy(state, dt, k3), t + dt);
  StateVector out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    out[i] = state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  require_finite(out, t + dt, "non-finite state");
  return out;
}

StateVector rk4_halving_step(const RhsFn& rhs, const StateVector& state, double t, double dt,
                             double tolerance, int max_halvings) {
  const double half = 0.5 * dt;
  const StateVector full = rk4_step(rhs, state, t, dt);
  const StateVector composed = rk4_step(rhs, rk4_step(rhs, state, t, half), t + half, half);
  if (max_halvings == 0 || max_abs_diff(full, composed) <= tolerance) return composed;
  const StateVector left = rk4_halving_step(rhs, state, t, half, tolerance, max_halvings - 1);
  return rk4_halving_step(rhs, left, t + half, half, tolerance, max_halvings - 1);
}

Trajectory integrate(const RhsFn& rhs, const StateVector& state0, const IntegratorConfig& config,
                     const RefinePredicate& refine) {
  config.validate();
  require_finite(state0, 0.0, "non-finite initial state");

  // Sample times are i * dt rather than an accumulated sum so that the grid
  // does not drift.
  auto steps = static_cast<long>(std::floor(config.t_end / config.dt * (1.0 + 1e-12)));
  const bool tail = steps * config.dt < config.t_end * (1.0 - 1e-12);

  Trajectory traj;
  traj.t.reserve(steps + 2);
  traj.x.reserve(steps + 2);
  traj.t.push_back(0.0);
  traj.x.push_back(state0);

  auto advance = [&](const StateVector& x, double t, double h) {
    if (config.method == StepMethod::Rk4Halving || (refine && refine(x, t))) {
      return rk4_halving_step(rhs, x, t, h, config.tolerance, config.max_halvings);
    }
    return rk4_step(rhs, x, t, h);
  };

  for (long i = 0; i < steps; ++i) {
    const double t = i * config.dt;
    traj.x.push_back(advance(traj.x.back(), t, config.dt));
    traj.t.push_back((i + 1) * config.dt);
  }
  if (tail) {
    const double t = traj.t.back();
    traj.x.push_back(advance(traj.x.back(), t, config.t_end - t));
    traj.t.push_back(config.t_end);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          std::span<const std::string> names) {
  out << 't';
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << format_double(trajectory.t[i]);
    for (double v : trajectory.x[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace ettbicc
