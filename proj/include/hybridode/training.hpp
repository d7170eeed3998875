#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hybridode/neuralnet.hpp"
#include "hybridode/problems.hpp"
#include "hybridode/solvers.hpp"

namespace hybridode {

enum class DataSource { numerical, analytic };

/// One teacher-forced pair: input = (y(t_{k-1}) || u(t_{k-1})), target = y(t_k).
/// The constant 1 of the bias is appended by the network, not stored here.
struct Sample {
  Vector input;
  Vector target;
};

struct Dataset {
  std::vector<Sample> samples;
  DataSource source = DataSource::numerical;

  std::size_t size() const { return samples.size(); }
  std::size_t input_dim() const { return samples.front().input.size(); }
  std::size_t target_dim() const { return samples.front().target.size(); }
};

struct EsConfig {
  std::size_t population = 250;
  std::size_t iterations = 100;
  double noise_scale = 0.05;
  std::uint64_t seed = 0;
};

struct SgdConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
};

struct EsResult {
  FeedForwardNet best;
  std::vector<double> history;  // best fitness at each iteration
};

struct SgdResult {
  FeedForwardNet net;
  std::vector<double> history;  // dataset MSE after each epoch
};

/// Rollout-vs-reference comparison. Rows share the reference grid.
struct StepReport {
  struct Row {
    double t;
    Vector reference;
    Vector predicted;
    double abs_error;  // max-norm of predicted - reference
  };
  std::vector<Row> rows;
  double mse = 0.0;        // (1/K) sum_{k>=1} ||predicted_k - reference_k||^2
  double max_error = 0.0;  // max over rows of abs_error
  double runtime_ms = 0.0;
};

Dataset make_dataset(const Trajectory& traj, const InputFn& inputs, DataSource source = DataSource::numerical);
void check_dataset(const Dataset& ds);

/// (1/|ds|) sum ||forward(input) - target||^2.
double mse(const FeedForwardNet& net, const Dataset& ds);

/// ceil(population / 5).
std::size_t elite_count(std::size_t population);

/// Evolution strategy. Each iteration scores every individual by mse, sorts
/// ascending (ties by position), keeps the fittest fifth untouched and
/// replaces each remaining individual at sorted position i with a copy of
/// elite (i mod E) plus noise_scale * N(0, 1) on every weight.
EsResult train_es(const Dataset& ds, const std::vector<std::size_t>& layer_dims, const EsConfig& cfg);

/// Single-sample SGD on the squared error, samples visited in a seeded
/// shuffled order each epoch. Throws DivergenceError when the dataset MSE
/// exceeds 1e6 or stops being finite.
SgdResult train_sgd(const Dataset& ds, FeedForwardNet net, const SgdConfig& cfg);

/// One step of w <- w - rate * grad.
void apply_gradient(FeedForwardNet& net, const Gradient& grad, double rate);

/// Free-running prediction: y_k = forward(net, y_{k-1} || u(t_{k-1})).
Trajectory rollout(const FeedForwardNet& net, std::span<const double> y0, const InputFn& inputs, double dt,
                   double horizon);
Trajectory rollout_on_grid(const FeedForwardNet& net, std::span<const double> y0, const InputFn& inputs,
                           std::span<const double> times);

StepReport compare_trajectories(const Trajectory& reference, const Trajectory& predicted);

/// Rolls the network out from the reference's initial state on the
/// reference's grid and scores it.
StepReport validate(const FeedForwardNet& net, const Trajectory& reference, const InputFn& inputs);

}  // namespace hybridode
