#include "hybridode/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hybridode/errors.hpp"

namespace hybridode {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t heat_cells(const HeatConfig& cfg) {
  if (!(cfg.dx > 0.0) || !(cfg.x_hi > cfg.x_lo) || !(cfg.diffusivity > 0.0) || !(cfg.horizon > 0.0)) {
    throw ConfigError("heat: need dx > 0, x_hi > x_lo, D > 0 and T > 0");
  }
  const double cells = (cfg.x_hi - cfg.x_lo) / cfg.dx;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded) || rounded < 3.0) {
    std::ostringstream msg;
    msg << "heat: dx=" << cfg.dx << " does not split the domain [" << cfg.x_lo << ", " << cfg.x_hi
        << "] into an integer number (>= 3) of cells";
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

void check_problem(const IvpProblem& p) {
  const std::size_t m = p.y0.size();
  if (m == 0) throw DimensionError(p.name + ": empty initial state");
  if (p.linear.rows() != m || p.linear.cols() != m) {
    throw DimensionError(p.name + ": linear operator " + shape_string(p.linear) + " for state of length " +
                         std::to_string(m));
  }
  if (!(p.horizon > 0.0)) throw ConfigError(p.name + ": horizon must be positive");
  if (!p.nonlinear || !p.input) throw ConfigError(p.name + ": nonlinear and input functions are required");
  const Vector u0 = p.input(0.0);
  const Vector f0 = p.nonlinear(p.y0, u0, 0.0);
  if (f0.size() != m) {
    throw DimensionError(p.name + ": nonlinear term has length " + std::to_string(f0.size()) +
                         ", state has length " + std::to_string(m));
  }
}

StateFn zero_field() {
  return [](std::span<const double> y, std::span<const double>, double) { return Vector(y.size(), 0.0); };
}

InputFn no_input() {
  return [](double) { return Vector{}; };
}

IvpProblem linear_decay_forced() {
  IvpProblem p{
      .name = "decay",
      .linear = Matrix{{kDecayRate}},
      .nonlinear = [](std::span<const double>, std::span<const double> u,
                      double) { return Vector(u.begin(), u.end()); },
      .input = [](double t) { return Vector{std::sin(kTwoPi * t)}; },
      .y0 = {1.0},
      .horizon = 1.0,
      .cfl = StepBound{1.0 / std::abs(kDecayRate), "dt <= 1/|lambda|"},
      .exact = [](double t) { return Vector{analytic_decay_forced(t)}; },
  };
  return p;
}

Vector heat_nodes(const HeatConfig& cfg) {
  const std::size_t cells = heat_cells(cfg);
  Vector x(cells - 1);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = cfg.x_lo + static_cast<double>(i + 1) * cfg.dx;
  return x;
}

IvpProblem heat_mol(const HeatConfig& cfg) {
  const Vector x = heat_nodes(cfg);
  const std::size_t m = x.size();

  const double c = cfg.diffusivity / (cfg.dx * cfg.dx);
  Matrix a(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    a(i, i) = -2.0 * c;
    if (i > 0) a(i, i - 1) = c;
    if (i + 1 < m) a(i, i + 1) = c;
  }

  // Indicator of [4.5, 5.5]; the slack absorbs rounding in x_lo + i*dx.
  const double slack = 1e-9 * cfg.dx;
  Vector y0(m);
  for (std::size_t i = 0; i < m; ++i) y0[i] = (x[i] >= 4.5 - slack && x[i] <= 5.5 + slack) ? 1.0 : 0.0;

  IvpProblem p{
      .name = "heat",
      .linear = a,
      .nonlinear = zero_field(),
      .input = no_input(),
      .y0 = y0,
      .horizon = cfg.horizon,
      .cfl = StepBound{cfg.dx * cfg.dx / (2.0 * cfg.diffusivity), "dt <= dx^2/(2D)"},
      .exact = [a, y0](double t) { return analytic_linear_system(a, y0, t); },
  };
  return p;
}

SdeProblem scalar_sde(double lambda, double sigma, double y0, double horizon) {
  IvpProblem base{
      .name = "sde",
      .linear = Matrix{{lambda}},
      .nonlinear = zero_field(),
      .input = no_input(),
      .y0 = {y0},
      .horizon = horizon,
      .cfl = lambda < 0.0 ? std::optional<StepBound>(StepBound{1.0 / std::abs(lambda), "dt <= 1/|lambda|"})
                          : std::nullopt,
      .exact = [lambda, y0](double t) { return Vector{analytic_decay(lambda, y0, t)}; },
  };
  return SdeProblem{
      .base = std::move(base),
      .diffusion = [sigma](std::span<const double> y, std::span<const double>,
                           double) { return Vector(y.size(), sigma); },
  };
}

double analytic_decay(double lambda, double y0, double t) { return std::exp(lambda * t) * y0; }

Vector analytic_linear_system(const Matrix& a, std::span<const double> y0, double t) {
  if (!a.square() || a.rows() != y0.size()) {
    throw DimensionError("analytic_linear_system: operator " + shape_string(a) + " for state of length " +
                         std::to_string(y0.size()));
  }
  return matvec(expm(scaled(a, t), 1e-12), y0);
}

double analytic_decay_forced(double t) {
  constexpr double lambda = kDecayRate;
  constexpr double y0 = 1.0;
  const double e = std::exp(lambda * t);
  const double forced =
      (e * kTwoPi - kTwoPi * std::cos(kTwoPi * t) - lambda * std::sin(kTwoPi * t)) / (lambda * lambda + kTwoPi * kTwoPi);
  return e * y0 + forced;
}

}  // namespace hybridode
