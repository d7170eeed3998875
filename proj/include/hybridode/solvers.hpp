#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hybridode/linalg.hpp"
#include "hybridode/problems.hpp"

namespace hybridode {

/// States on a time grid. times[0] == 0 and times strictly increase.
struct Trajectory {
  Vector times;
  std::vector<Vector> states;

  std::size_t size() const { return times.size(); }
  std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
};

/// Throws DimensionError / ConfigError when the grid or state shapes are invalid.
void check_trajectory(const Trajectory& traj);

enum class Method { euler, exp_split, strang, euler_maruyama };

std::string_view method_name(Method m);
/// Accepts the CLI spellings: euler, exp-split, strang, em.
Method parse_method(std::string_view name);

struct StepConfig {
  double dt = 0.05;
  Method method = Method::euler;
  bool cfl_check = true;
  std::uint64_t seed = 0;
};

/// Number of steps K with K*dt == horizon (relative tolerance 1e-9).
std::size_t step_count(double horizon, double dt);

/// Throws CflError when dt exceeds the problem's explicit-Euler bound.
void check_cfl(const IvpProblem& p, double dt);

/// y + dt (A y + F(y, u(t), t)).
Vector euler_step(const IvpProblem& p, std::span<const double> y, double t, double dt);

/// Linear-nonlinear splitting: e^{A dt} y + dt e^{A dt} F(y, u(t), t).
/// `propagator` must be expm(A dt).
Vector exp_split_step(const IvpProblem& p, std::span<const double> y, double t, double dt,
                      const Matrix& propagator);

/// Strang splitting: half linear step, explicit-Euler nonlinear step at the
/// midpoint, half linear step. `half_propagator` must be expm(A dt / 2).
Vector strang_step(const IvpProblem& p, std::span<const double> y, double t, double dt,
                   const Matrix& half_propagator);

/// y + dt A y + G(y, u(t), t) .* sqrt(dt) xi, with xi standard normal.
Vector euler_maruyama_step(const SdeProblem& p, std::span<const double> y, double t, double dt,
                           std::span<const double> xi);

/// Deterministic integration over [0, p.horizon]. Rejects euler_maruyama.
Trajectory integrate(const IvpProblem& p, const StepConfig& cfg);

/// One Euler-Maruyama sample path. Path `path` draws its noise from a stream
/// derived from (cfg.seed, path), so paths are independent of evaluation order.
Trajectory integrate_path(const SdeProblem& p, const StepConfig& cfg, std::uint64_t path = 0);
Trajectory integrate(const SdeProblem& p, const StepConfig& cfg);

/// Closed-form trajectory on the uniform grid k*dt. Throws ConfigError when
/// the problem carries no exact solution.
Trajectory exact_trajectory(const IvpProblem& p, double dt);

struct EnsembleMoments {
  Trajectory mean;
  Trajectory stddev;  // sample standard deviation (n - 1)
};

EnsembleMoments ensemble_moments(std::span<const Trajectory> paths);

}  // namespace hybridode
