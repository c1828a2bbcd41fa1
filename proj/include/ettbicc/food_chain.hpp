#pragma once

#include <array>
#include <optional>

#include "ettbicc/ode.hpp"

namespace ettbicc {

// m * x / (x + n * y), with the 0/0 case defined as 0 so that extinction
// stays absorbing along the axes.
double functional_response(double m, double x, double n, double y);

// Predator-prey pair; `prey_capacity` switches on logistic prey growth.
struct LotkaVolterraParams {
  double a = 1.0;  // prey growth rate
  double b = 1.0;  // prey death rate per encounter
  double c = 1.0;  // conversion efficiency
  double h = 1.0;  // predator death rate
  std::optional<double> prey_capacity;
};

// Plant / herbivore / carnivore chain. m1, m2, n1, n2 are only read by the
// ratio-dependent variant.
struct TriTrophicParams {
  double alpha = 1.0;    // plant growth
  double beta = 1.0;     // plant death per predation
  double C_p = 1.0;      // plant carrying capacity
  double a = 1.0;        // herbivore growth
  double C_r = 1.0;      // herbivore carrying capacity
  double epsilon = 1.0;  // plant -> herbivore conversion
  double b = 1.0;
  double c = 1.0;
  double h = 1.0;
  double m1 = 1.0, m2 = 1.0;  // maximal predator growth rates
  double n1 = 1.0, n2 = 1.0;  // half-saturation constants
};

class LotkaVolterra {
 public:
  explicit LotkaVolterra(const LotkaVolterraParams& params);

  // (dr, df). Throws std::domain_error on negative or non-finite input.
  std::array<double, 2> derivative(double r, double f) const;

  // c*r - h*ln r + b*f - a*ln f; conserved by the unbounded-prey variant.
  double first_integral(double r, double f) const;

  RhsFn rhs() const;
  const LotkaVolterraParams& params() const { return params_; }

 private:
  LotkaVolterraParams params_;
};

class PreyDependentChain {
 public:
  explicit PreyDependentChain(const TriTrophicParams& params);
  std::array<double, 3> derivative(double p, double r, double f) const;
  RhsFn rhs() const;

 private:
  TriTrophicParams params_;
};

// Implemented exactly as printed: the herbivore's loss term saturates in
// f + n2*r while the carnivore's gain term saturates in r + n2*f.
class RatioDependentChain {
 public:
  explicit RatioDependentChain(const TriTrophicParams& params);
  std::array<double, 3> derivative(double p, double r, double f) const;
  RhsFn rhs() const;

 private:
  TriTrophicParams params_;
};

}  // namespace ettbicc
