#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "hybridode/linalg.hpp"

namespace hybridode {

/// F(y, u, t). Must be pure.
using StateFn = std::function<Vector(std::span<const double> y, std::span<const double> u, double t)>;
/// u(t). May return an empty vector when the problem has no external input.
using InputFn = std::function<Vector(double t)>;
/// Closed-form y(t), when one is known.
using ExactFn = std::function<Vector(double t)>;

/// Largest stable explicit-Euler step for a problem, with a human readable
/// description of where it comes from.
struct StepBound {
  double max_dt;
  std::string description;
};

/// dy/dt = A y + F(y, u(t), t), y(0) = y0, t in [0, horizon].
struct IvpProblem {
  std::string name;
  Matrix linear;
  StateFn nonlinear;
  InputFn input;
  Vector y0;
  double horizon;
  std::optional<StepBound> cfl;
  ExactFn exact;

  std::size_t dim() const { return y0.size(); }
  std::size_t input_dim() const { return input(0.0).size(); }
};

/// dy = A y dt + G(y, u, t) dW. The nonlinear slot of `base` does not enter
/// the stochastic step.
struct SdeProblem {
  IvpProblem base;
  StateFn diffusion;
};

struct HeatConfig {
  double diffusivity = 0.1;
  double x_lo = 0.0;
  double x_hi = 10.0;
  double dx = 0.1;
  double horizon = 1.0;
};

/// Throws DimensionError / ConfigError when the problem's invariants fail.
void check_problem(const IvpProblem& p);

StateFn zero_field();
InputFn no_input();

/// Scalar decay dy/dt = -0.1 y + sin(2 pi t), y(0) = 1, T = 1. The forcing is
/// carried in the nonlinear slot: F(y, u, t) = u with u(t) = sin(2 pi t).
IvpProblem linear_decay_forced();
inline constexpr double kDecayRate = -0.1;

/// Heat equation y_t = D y_xx with homogeneous Dirichlet ends, discretized on
/// the interior nodes of a uniform grid. y0 is the indicator of [4.5, 5.5].
IvpProblem heat_mol(const HeatConfig& cfg);
/// Interior node coordinates matching heat_mol's unknowns.
Vector heat_nodes(const HeatConfig& cfg);

/// dy = lambda y dt + sigma dW, scalar.
SdeProblem scalar_sde(double lambda, double sigma, double y0, double horizon);

double analytic_decay(double lambda, double y0, double t);
Vector analytic_linear_system(const Matrix& a, std::span<const double> y0, double t);
/// Closed-form solution of the forced decay problem (variation of constants):
///   e^{lt} + (2 pi e^{lt} - 2 pi cos(2 pi t) - l sin(2 pi t)) / (l^2 + 4 pi^2).
double analytic_decay_forced(double t);

}  // namespace hybridode
