#include "ettbicc/food_chain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ettbicc {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be a finite positive number");
  }
}

void require_population(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::domain_error("population sizes must be finite and non-negative");
  }
}

void validate(const TriTrophicParams& p) {
  require_positive(p.alpha, "alpha");
  require_positive(p.beta, "beta");
  require_positive(p.C_p, "C_p");
  require_positive(p.a, "a");
  require_positive(p.C_r, "C_r");
  require_positive(p.epsilon, "epsilon");
  require_positive(p.b, "b");
  require_positive(p.c, "c");
  require_positive(p.h, "h");
  require_positive(p.m1, "m1");
  require_positive(p.m2, "m2");
  require_positive(p.n1, "n1");
  require_positive(p.n2, "n2");
}

template <std::size_t N, typename F>
RhsFn wrap(F derivative) {
  return [derivative](const StateVector& x, double) {
    if (x.size() != N) throw std::invalid_argument("state dimension mismatch");
    StateVector out(N);
    std::array<double, N> d;
    if constexpr (N == 2) {
      d = derivative(x[0], x[1]);
    } else {
      d = derivative(x[0], x[1], x[2]);
    }
    for (std::size_t i = 0; i < N; ++i) out[i] = d[i];
    return out;
  };
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

double functional_response(double m, double x, double n, double y) {
  const double den = x + n * y;
  return den == 0.0 ? 0.0 : m * x / den;
}

LotkaVolterra::LotkaVolterra(const LotkaVolterraParams& params) : params_(params) {
  require_positive(params.a, "a");
  require_positive(params.b, "b");
  require_positive(params.c, "c");
  require_positive(params.h, "h");
  if (params.prey_capacity) require_positive(*params.prey_capacity, "C_r");
}

std::array<double, 2> LotkaVolterra::derivative(double r, double f) const {
  require_population(r);
  require_population(f);
  const auto& p = params_;
  const double growth = p.prey_capacity ? p.a * (1.0 - r / *p.prey_capacity) * r : p.a * r;
  return {growth - p.b * r * f, p.c * r * f - p.h * f};
}

double LotkaVolterra::first_integral(double r, double f) const {
  const auto& p = params_;
  return p.c * r - p.h * std::log(r) + p.b * f - p.a * std::log(f);
}

RhsFn LotkaVolterra::rhs() const {
  return wrap<2>([self = *this](double r, double f) { return self.derivative(r, f); });
}

PreyDependentChain::PreyDependentChain(const TriTrophicParams& params) : params_(params) {
  validate(params);
}

std::array<double, 3> PreyDependentChain::derivative(double p, double r, double f) const {
  require_population(p);
  require_population(r);
  require_population(f);
  const auto& k = params_;
  return {
      p * (k.alpha * (1.0 - p / k.C_p) - k.beta * r),
      r * (k.a * (1.0 - r / k.C_r) + k.epsilon * p - k.b * f),
      f * (k.c * r - k.h),
  };
}

RhsFn PreyDependentChain::rhs() const {
  return wrap<3>([self = *this](double p, double r, double f) { return self.derivative(p, r, f); });
}

RatioDependentChain::RatioDependentChain(const TriTrophicParams& params) : params_(params) {
  validate(params);
}

std::array<double, 3> RatioDependentChain::derivative(double p, double r, double f) const {
  require_population(p);
  require_population(r);
  require_population(f);
  const auto& k = params_;
  return {
      p * (k.alpha * (1.0 - p / k.C_p) - k.beta * ratio(k.m1 * r, p + k.n1 * r)),
      r * (k.a * (1.0 - r / k.C_r) + k.epsilon * functional_response(k.m1, p, k.n1, r) -
           k.b * functional_response(k.m2, f, k.n2, r)),
      f * (functional_response(k.m2, r, k.n2, f) - k.h),
  };
}

RhsFn RatioDependentChain::rhs() const {
  return wrap<3>([self = *this](double p, double r, double f) { return self.derivative(p, r, f); });
}

}  // namespace ettbicc
