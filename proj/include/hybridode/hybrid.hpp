#pragma once

#include <span>

#include "hybridode/neuralnet.hpp"
#include "hybridode/problems.hpp"
#include "hybridode/solvers.hpp"
#include "hybridode/training.hpp"

namespace hybridode {

/// Linear-nonlinear splitting with a learned nonlinear slot:
///   y_{k+1} = P y_k + dt P net(y_k || u(t_k)),   P = expm(A dt).
/// The network only supplies the increment the linear propagator misses.
class HybridStepper {
public:
  HybridStepper(Matrix propagator, FeedForwardNet correction, double dt);
  /// Builds P = expm(A dt) from the problem's linear operator.
  static HybridStepper for_problem(const IvpProblem& p, FeedForwardNet correction, double dt);

  const Matrix& propagator() const { return propagator_; }
  const FeedForwardNet& correction() const { return correction_; }
  double dt() const { return dt_; }

  Vector step(std::span<const double> y, std::span<const double> u) const;

private:
  Matrix propagator_;
  FeedForwardNet correction_;
  double dt_;
};

Vector hybrid_step(const HybridStepper& h, std::span<const double> y, double t, std::span<const double> u);

/// Targets that make hybrid_step reproduce `reference`:
///   target_k = (P^{-1} y(t_k) - y(t_{k-1})) / dt,  input_k = y(t_{k-1}) || u(t_{k-1}).
/// P^{-1} is applied by a linear solve. The reference grid spacing must be
/// uniform with step dt.
Dataset make_residual_dataset(const IvpProblem& p, const Trajectory& reference, double dt,
                              DataSource source = DataSource::numerical);

Trajectory hybrid_rollout(const HybridStepper& h, std::span<const double> y0, const InputFn& inputs, double horizon);

}  // namespace hybridode
