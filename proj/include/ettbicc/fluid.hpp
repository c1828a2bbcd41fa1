#pragma once

#include <span>
#include <string>
#include <vector>

#include "ettbicc/ode.hpp"

namespace ettbicc {

enum class FluidModel {
  Ettbicc,  // ratio-dependent C - W - Q chain
  Ttbicc,   // prey-dependent baseline
};

FluidModel parse_fluid_model(const std::string& name);
std::string to_string(FluidModel model);

// Coefficients of the congestion food chain. The canonical list also names
// unit coefficients phi and theta, which no rhs term uses; they are omitted.
struct FluidParams {
  int k = 1;                         // flow count
  double capacity = 1.0;             // bottleneck B, packets/RTT
  double alpha = 1.0;                // growth rate of C
  double beta = 0.5;                 // decrement of C per unit W
  double delta = 1.0;                // prey-dependent model: time scale of C and Q
  std::vector<double> a;             // per-flow growth rates
  double epsilon = 0.5;              // increment of W due to C
  double b = 1.0;                    // decrement of W due to Q
  std::vector<double> c;             // per-flow conversion W -> Q
  double eta = 1.0;                  // death rate of Q
  double carrying_C = 1.0;           // C_C
  double carrying_W = 0.5;           // C_W
  double effective_capacity = 1.0;   // B_eff, the capacity inside min(.)

  // Throws ConfigError listing every violated field.
  void validate() const;
};

// Canonical settings: unit rates, beta = epsilon = 0.5, C_C = B, C_W = B/2,
// alpha = 1 and B_eff = B - 1 for integer B (B * 49/50 otherwise).
FluidParams default_params(double capacity, int k);

double default_effective_capacity(double capacity);

struct FluidState {
  double C = 0.0;
  double Q = 0.0;
  std::vector<double> W;

  double total_window() const;

  // Packed layout (C, Q, W1..Wk).
  StateVector pack() const;
  static FluidState unpack(std::span<const double> x);
};

// Throws std::domain_error on a non-finite or negative state.
FluidState ettbicc_rhs(const FluidParams& params, const FluidState& state);
FluidState ttbicc_rhs(const FluidParams& params, const FluidState& state);

// Packed-vector rhs for the integrator.
RhsFn fluid_rhs(FluidModel model, const FluidParams& params);

// Forces step halving where Q + sum(W) lies within dt * B of B_eff, i.e. next
// to the kink of min(B_eff, Q + sum W).
RefinePredicate kink_guard(const FluidParams& params, double dt);

// Column names (C, Q, W1..Wk) of the packed layout.
std::vector<std::string> fluid_state_names(int k);

struct FluidRun {
  FluidModel model = FluidModel::Ettbicc;
  FluidParams params;
  FluidState initial;
  IntegratorConfig integrator;
};

Trajectory run_fluid(const FluidRun& run);

// Trajectory CSV `t,C,Q,W1..Wk,sumW`.
void write_fluid_csv(std::ostream& out, const Trajectory& trajectory, int k);

struct EquilibriumResult {
  FluidState state;
  bool converged = false;
  double residual = 0.0;        // max-norm of the rhs at the final state
  double tail_variation = 0.0;  // max over components of (max - min) over the last 10%
};

// Forward integration to `horizon`. Non-convergence is reported, not thrown.
EquilibriumResult find_equilibrium(FluidModel model, const FluidParams& params,
                                   const FluidState& state0, double horizon, double residual_tol,
                                   double dt = 0.01);

}  // namespace ettbicc
