#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ettbicc {

using StateVector = std::vector<double>;

// Right-hand side of an autonomous or time-dependent system: x' = f(x, t).
using RhsFn = std::function<StateVector(const StateVector&, double)>;

// Returns true for steps that must be refined by step halving even when the
// integrator runs in fixed-step mode (e.g. near a non-smooth point of the rhs).
using RefinePredicate = std::function<bool(const StateVector&, double)>;

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double t, std::size_t component, const std::string& what);

  double time() const { return t_; }
  std::size_t component() const { return component_; }

 private:
  double t_;
  std::size_t component_;
};

enum class StepMethod { Rk4Fixed, Rk4Halving };

StepMethod parse_step_method(const std::string& name);
std::string to_string(StepMethod method);

struct IntegratorConfig {
  double dt = 0.01;
  double t_end = 1.0;
  StepMethod method = StepMethod::Rk4Fixed;
  double tolerance = 1e-9;  // component-wise absolute, halving mode only
  int max_halvings = 20;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<StateVector> x;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
  const StateVector& final_state() const { return x.back(); }

  // Column `component` over all samples.
  std::vector<double> component(std::size_t component) const;
};

// One classical fourth-order Runge-Kutta step. The input state is not modified.
StateVector rk4_step(const RhsFn& rhs, const StateVector& state, double t, double dt);

// Step of length dt refined by recursive halving until the full step and the
// two-half-step composition agree within `tolerance`, at most `max_halvings`
// levels deep.
StateVector rk4_halving_step(const RhsFn& rhs, const StateVector& state, double t, double dt,
                             double tolerance, int max_halvings);

// Samples at t = 0, dt, 2dt, ..., plus t_end when it is not a multiple of dt.
Trajectory integrate(const RhsFn& rhs, const StateVector& state0, const IntegratorConfig& config,
                     const RefinePredicate& refine = {});

// Header `t,<name0>,<name1>,...`, one row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          std::span<const std::string> names);

}  // namespace ettbicc
