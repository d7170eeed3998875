#include "hybridode/hybrid.hpp"

#include <cmath>

#include "hybridode/errors.hpp"

namespace hybridode {

HybridStepper::HybridStepper(Matrix propagator, FeedForwardNet correction, double dt)
    : propagator_(std::move(propagator)), correction_(std::move(correction)), dt_(dt) {
  check_net(correction_);
  if (!propagator_.square()) throw DimensionError("hybrid: propagator " + shape_string(propagator_) + " is not square");
  if (correction_.output_dim() != propagator_.rows()) {
    throw DimensionError("hybrid: network output has length " + std::to_string(correction_.output_dim()) +
                         ", propagator is " + shape_string(propagator_));
  }
  if (correction_.input_dim() < propagator_.rows()) {
    throw DimensionError("hybrid: network input of length " + std::to_string(correction_.input_dim()) +
                         " cannot hold a state of length " + std::to_string(propagator_.rows()));
  }
  if (!(dt_ > 0.0)) throw ConfigError("hybrid: dt must be positive");
}

HybridStepper HybridStepper::for_problem(const IvpProblem& p, FeedForwardNet correction, double dt) {
  if (correction.input_dim() != p.dim() + p.input_dim() || correction.output_dim() != p.dim()) {
    throw DimensionError("hybrid: network maps " + std::to_string(correction.input_dim()) + " -> " +
                         std::to_string(correction.output_dim()) + " but problem " + p.name + " needs " +
                         std::to_string(p.dim() + p.input_dim()) + " -> " + std::to_string(p.dim()));
  }
  return HybridStepper(expm(scaled(p.linear, dt)), std::move(correction), dt);
}

Vector HybridStepper::step(std::span<const double> y, std::span<const double> u) const {
  if (y.size() != propagator_.rows() || y.size() + u.size() != correction_.input_dim()) {
    throw DimensionError("hybrid: state of length " + std::to_string(y.size()) + " and input of length " +
                         std::to_string(u.size()) + " for network input " + std::to_string(correction_.input_dim()));
  }
  const Vector f = forward(correction_, concat(y, u));
  return scale_add(1.0, matvec(propagator_, y), dt_, matvec(propagator_, f));
}

Vector hybrid_step(const HybridStepper& h, std::span<const double> y, double, std::span<const double> u) {
  return h.step(y, u);
}

Dataset make_residual_dataset(const IvpProblem& p, const Trajectory& reference, double dt, DataSource source) {
  check_trajectory(reference);
  if (reference.size() < 2) throw ConfigError("residual dataset: trajectory needs at least two points");
  if (reference.dim() != p.dim()) {
    throw DimensionError("residual dataset: reference states have length " + std::to_string(reference.dim()) +
                         ", problem dimension is " + std::to_string(p.dim()));
  }
  for (std::size_t k = 1; k < reference.size(); ++k) {
    const double step = reference.times[k] - reference.times[k - 1];
    if (std::abs(step - dt) > 1e-9 * dt) throw ConfigError("residual dataset: reference grid step differs from dt");
  }
  const Matrix propagator = expm(scaled(p.linear, dt));
  Dataset ds{.samples = {}, .source = source};
  ds.samples.reserve(reference.size() - 1);
  for (std::size_t k = 1; k < reference.size(); ++k) {
    const Vector& prev = reference.states[k - 1];
    const Vector pulled_back = solve(propagator, reference.states[k]);
    ds.samples.push_back({concat(prev, p.input(reference.times[k - 1])),
                          scale_add(1.0 / dt, pulled_back, -1.0 / dt, prev)});
  }
  return ds;
}

Trajectory hybrid_rollout(const HybridStepper& h, std::span<const double> y0, const InputFn& inputs, double horizon) {
  const std::size_t steps = step_count(horizon, h.dt());
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.emplace_back(y0.begin(), y0.end());
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h.dt();
    traj.states.push_back(hybrid_step(h, traj.states.back(), t, inputs(t)));
    traj.times.push_back(static_cast<double>(k + 1) * h.dt());
  }
  return traj;
}

}  // namespace hybridode
