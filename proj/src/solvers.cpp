#include "hybridode/solvers.hpp"

#include <cmath>
#include <sstream>

#include "hybridode/errors.hpp"
#include "hybridode/rng.hpp"

namespace hybridode {

namespace {

void check_state(const IvpProblem& p, std::span<const double> y) {
  if (y.size() != p.dim()) {
    throw DimensionError(p.name + ": state has length " + std::to_string(y.size()) + ", problem dimension is " +
                         std::to_string(p.dim()));
  }
}

void check_propagator(const IvpProblem& p, const Matrix& e) {
  if (e.rows() != p.dim() || e.cols() != p.dim()) {
    throw DimensionError(p.name + ": propagator " + shape_string(e) + " for state of length " +
                         std::to_string(p.dim()));
  }
}

Vector eval_nonlinear(const IvpProblem& p, std::span<const double> y, double t) {
  const Vector u = p.input(t);
  Vector f = p.nonlinear(y, u, t);
  if (f.size() != y.size()) {
    throw DimensionError(p.name + ": nonlinear term has length " + std::to_string(f.size()) +
                         ", state has length " + std::to_string(y.size()));
  }
  return f;
}

}  // namespace

void check_trajectory(const Trajectory& traj) {
  if (traj.times.empty() || traj.times.size() != traj.states.size()) {
    throw DimensionError("trajectory: " + std::to_string(traj.times.size()) + " times and " +
                         std::to_string(traj.states.size()) + " states");
  }
  if (traj.times.front() != 0.0) throw ConfigError("trajectory: first time must be 0");
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    if (!(traj.times[k] > traj.times[k - 1])) throw ConfigError("trajectory: times must strictly increase");
    if (traj.states[k].size() != traj.states.front().size()) {
      throw DimensionError("trajectory: state " + std::to_string(k) + " has length " +
                           std::to_string(traj.states[k].size()));
    }
  }
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::euler: return "euler";
    case Method::exp_split: return "exp-split";
    case Method::strang: return "strang";
    case Method::euler_maruyama: return "em";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "euler") return Method::euler;
  if (name == "exp-split") return Method::exp_split;
  if (name == "strang") return Method::strang;
  if (name == "em") return Method::euler_maruyama;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected euler, exp-split, strang or em)");
}

std::size_t step_count(double horizon, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const double ratio = horizon / dt;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(k * dt - horizon) > 1e-9 * horizon) {
    std::ostringstream msg;
    msg << "dt=" << dt << " does not divide the horizon T=" << horizon;
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(k);
}

void check_cfl(const IvpProblem& p, double dt) {
  if (!p.cfl) return;
  if (dt > p.cfl->max_dt * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "CFL violation for " << p.name << ": dt=" << dt << " exceeds the bound " << p.cfl->description
        << " = " << p.cfl->max_dt;
    throw CflError(msg.str());
  }
}

Vector euler_step(const IvpProblem& p, std::span<const double> y, double t, double dt) {
  check_state(p, y);
  const Vector ay = matvec(p.linear, y);
  const Vector f = eval_nonlinear(p, y, t);
  Vector next(y.begin(), y.end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * (ay[i] + f[i]);
  return next;
}

Vector exp_split_step(const IvpProblem& p, std::span<const double> y, double t, double dt,
                      const Matrix& propagator) {
  check_state(p, y);
  check_propagator(p, propagator);
  const Vector f = eval_nonlinear(p, y, t);
  return scale_add(1.0, matvec(propagator, y), dt, matvec(propagator, f));
}

Vector strang_step(const IvpProblem& p, std::span<const double> y, double t, double dt,
                   const Matrix& half_propagator) {
  check_state(p, y);
  check_propagator(p, half_propagator);
  const Vector z = matvec(half_propagator, y);
  const double mid = t + 0.5 * dt;
  const Vector f = eval_nonlinear(p, z, mid);
  return matvec(half_propagator, scale_add(1.0, z, dt, f));
}

Vector euler_maruyama_step(const SdeProblem& p, std::span<const double> y, double t, double dt,
                           std::span<const double> xi) {
  check_state(p.base, y);
  if (xi.size() != y.size()) {
    throw DimensionError("euler_maruyama_step: noise has length " + std::to_string(xi.size()) +
                         ", state has length " + std::to_string(y.size()));
  }
  const Vector ay = matvec(p.base.linear, y);
  const Vector g = p.diffusion(y, p.base.input(t), t);
  if (g.size() != y.size()) throw DimensionError("euler_maruyama_step: diffusion term has wrong length");
  const double sq = std::sqrt(dt);
  Vector next(y.begin(), y.end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * ay[i] + g[i] * (sq * xi[i]);
  return next;
}

Trajectory integrate(const IvpProblem& p, const StepConfig& cfg) {
  check_problem(p);
  if (cfg.method == Method::euler_maruyama) {
    throw ConfigError("method em needs a stochastic problem");
  }
  if (cfg.cfl_check) check_cfl(p, cfg.dt);
  const std::size_t steps = step_count(p.horizon, cfg.dt);
  const double dt = cfg.dt;

  Matrix propagator = Matrix::identity(p.dim());
  if (cfg.method == Method::exp_split) propagator = expm(scaled(p.linear, dt));
  if (cfg.method == Method::strang) propagator = expm(scaled(p.linear, 0.5 * dt));

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(p.y0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vector& y = traj.states.back();
    Vector next;
    switch (cfg.method) {
      case Method::euler: next = euler_step(p, y, t, dt); break;
      case Method::exp_split: next = exp_split_step(p, y, t, dt, propagator); break;
      case Method::strang: next = strang_step(p, y, t, dt, propagator); break;
      case Method::euler_maruyama: break;
    }
    traj.times.push_back(static_cast<double>(k + 1) * dt);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Trajectory integrate_path(const SdeProblem& p, const StepConfig& cfg, std::uint64_t path) {
  check_problem(p.base);
  if (cfg.method != Method::euler_maruyama) {
    throw ConfigError("stochastic problems integrate with method em only");
  }
  if (cfg.cfl_check) check_cfl(p.base, cfg.dt);
  const std::size_t steps = step_count(p.base.horizon, cfg.dt);
  const double dt = cfg.dt;
  NormalRng rng(derive_seed(cfg.seed, {path}));

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(p.base.y0);
  Vector xi(p.base.dim());
  for (std::size_t k = 0; k < steps; ++k) {
    for (double& v : xi) v = rng();
    Vector next = euler_maruyama_step(p, traj.states.back(), static_cast<double>(k) * dt, dt, xi);
    traj.times.push_back(static_cast<double>(k + 1) * dt);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Trajectory integrate(const SdeProblem& p, const StepConfig& cfg) { return integrate_path(p, cfg, 0); }

Trajectory exact_trajectory(const IvpProblem& p, double dt) {
  if (!p.exact) throw ConfigError(p.name + ": no closed-form solution available");
  const std::size_t steps = step_count(p.horizon, dt);
  Trajectory traj;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    traj.times.push_back(t);
    traj.states.push_back(k == 0 ? p.y0 : p.exact(t));
  }
  return traj;
}

EnsembleMoments ensemble_moments(std::span<const Trajectory> paths) {
  if (paths.size() < 2) throw ConfigError("ensemble needs at least two paths");
  const Trajectory& first = paths.front();
  for (const auto& path : paths) {
    if (path.size() != first.size() || path.dim() != first.dim()) {
      throw DimensionError("ensemble paths do not share a grid");
    }
  }
  const double n = static_cast<double>(paths.size());
  EnsembleMoments out{.mean = {first.times, {}}, .stddev = {first.times, {}}};
  for (std::size_t k = 0; k < first.size(); ++k) {
    Vector mean(first.dim(), 0.0);
    for (const auto& path : paths)
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += path.states[k][i];
    for (double& v : mean) v /= n;
    Vector var(first.dim(), 0.0);
    for (const auto& path : paths)
      for (std::size_t i = 0; i < var.size(); ++i) {
        const double d = path.states[k][i] - mean[i];
        var[i] += d * d;
      }
    for (double& v : var) v = std::sqrt(v / (n - 1.0));
    out.mean.states.push_back(std::move(mean));
    out.stddev.states.push_back(std::move(var));
  }
  return out;
}

}  // namespace hybridode
