#include "hybridode/training.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "hybridode/errors.hpp"
#include "hybridode/kernels.hpp"
#include "hybridode/rng.hpp"

namespace hybridode {

namespace {

void check_compatible(const FeedForwardNet& net, const Dataset& ds) {
  check_dataset(ds);
  if (net.input_dim() != ds.input_dim() || net.output_dim() != ds.target_dim()) {
    throw DimensionError("network maps " + std::to_string(net.input_dim()) + " -> " +
                         std::to_string(net.output_dim()) + " but dataset pairs " + std::to_string(ds.input_dim()) +
                         " -> " + std::to_string(ds.target_dim()));
  }
}

}  // namespace

Dataset make_dataset(const Trajectory& traj, const InputFn& inputs, DataSource source) {
  check_trajectory(traj);
  if (traj.size() < 2) throw ConfigError("make_dataset: trajectory needs at least two points");
  Dataset ds{.samples = {}, .source = source};
  ds.samples.reserve(traj.size() - 1);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    ds.samples.push_back({concat(traj.states[k - 1], inputs(traj.times[k - 1])), traj.states[k]});
  }
  return ds;
}

void check_dataset(const Dataset& ds) {
  if (ds.samples.empty()) throw ConfigError("dataset is empty");
  for (const auto& s : ds.samples) {
    if (s.input.size() != ds.input_dim() || s.target.size() != ds.target_dim()) {
      throw DimensionError("dataset samples differ in length");
    }
  }
}

double mse(const FeedForwardNet& net, const Dataset& ds) {
  check_compatible(net, ds);
  double total = 0.0;
  for (const auto& s : ds.samples) {
    const Vector y = forward(net, s.input);
    double e = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double r = y[i] - s.target[i];
      e += r * r;
    }
    total += e;
  }
  return total / static_cast<double>(ds.size());
}

std::size_t elite_count(std::size_t population) { return (population + 4) / 5; }

EsResult train_es(const Dataset& ds, const std::vector<std::size_t>& layer_dims, const EsConfig& cfg) {
  if (cfg.population < 5) throw ConfigError("ES population must be at least 5");
  if (cfg.iterations < 1) throw ConfigError("ES needs at least one iteration");
  if (!(cfg.noise_scale > 0.0)) throw ConfigError("ES noise scale must be positive");

  std::vector<FeedForwardNet> population;
  population.reserve(cfg.population);
  for (std::size_t i = 0; i < cfg.population; ++i) {
    population.push_back(init_weights(layer_dims, derive_seed(cfg.seed, {0, i})));
  }
  check_compatible(population.front(), ds);

  const std::size_t elites = elite_count(cfg.population);
  std::vector<std::size_t> order(cfg.population);
  EsResult result{.best = population.front(), .history = {}};
  result.history.reserve(cfg.iterations);

  for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
    std::vector<double> fitness = kernels::population_mse_parallel(population, ds);
    for (double& f : fitness)
      if (std::isnan(f)) f = std::numeric_limits<double>::infinity();
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
    result.history.push_back(fitness[order.front()]);

    // The last sort already identifies the answer; another noisy generation
    // would never be scored.
    if (iter + 1 == cfg.iterations) {
      result.best = population[order.front()];
      break;
    }

    std::vector<FeedForwardNet> next;
    next.reserve(cfg.population);
    for (std::size_t pos = 0; pos < elites; ++pos) next.push_back(std::move(population[order[pos]]));
    for (std::size_t pos = elites; pos < cfg.population; ++pos) next.push_back(next[pos % elites]);

#pragma omp parallel for schedule(static)
    for (std::size_t pos = elites; pos < cfg.population; ++pos) {
      NormalRng rng(derive_seed(cfg.seed, {iter + 1, pos}));
      for (auto& w : next[pos].weights)
        for (double& v : w.entries()) v += cfg.noise_scale * rng();
    }
    population = std::move(next);
  }
  return result;
}

void apply_gradient(FeedForwardNet& net, const Gradient& grad, double rate) {
  if (grad.layers.size() != net.weights.size()) throw DimensionError("gradient does not match network depth");
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    auto w = net.weights[l].entries();
    auto g = grad.layers[l].entries();
    if (w.size() != g.size()) throw DimensionError("gradient layer " + std::to_string(l) + " has the wrong shape");
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= rate * g[i];
  }
}

SgdResult train_sgd(const Dataset& ds, FeedForwardNet net, const SgdConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0)) throw ConfigError("SGD learning rate must be non-negative");
  if (cfg.epochs < 1) throw ConfigError("SGD needs at least one epoch");
  check_net(net);
  check_compatible(net, ds);

  std::mt19937_64 engine(cfg.seed);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  SgdResult result{.net = std::move(net), .history = {}};
  result.history.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), engine);
    for (std::size_t idx : order) {
      const auto& s = ds.samples[idx];
      const LossAndGradient lg = backprop(result.net, s.input, s.target);
      apply_gradient(result.net, lg.grad, cfg.learning_rate);
    }
    const double err = mse(result.net, ds);
    if (!std::isfinite(err) || err > 1e6) {
      std::ostringstream msg;
      msg << "SGD diverged at epoch " << epoch + 1 << " (MSE " << err << ") with learning rate eta="
          << cfg.learning_rate << "; try a smaller --lr";
      throw DivergenceError(msg.str());
    }
    result.history.push_back(err);
  }
  return result;
}

Trajectory rollout_on_grid(const FeedForwardNet& net, std::span<const double> y0, const InputFn& inputs,
                           std::span<const double> times) {
  if (net.output_dim() != y0.size()) {
    throw DimensionError("rollout: network output has length " + std::to_string(net.output_dim()) +
                         ", state has length " + std::to_string(y0.size()));
  }
  Trajectory traj{.times = Vector(times.begin(), times.end()), .states = {}};
  traj.states.reserve(times.size());
  traj.states.emplace_back(y0.begin(), y0.end());
  for (std::size_t k = 1; k < times.size(); ++k) {
    traj.states.push_back(forward(net, concat(traj.states.back(), inputs(times[k - 1]))));
  }
  return traj;
}

Trajectory rollout(const FeedForwardNet& net, std::span<const double> y0, const InputFn& inputs, double dt,
                   double horizon) {
  const std::size_t steps = step_count(horizon, dt);
  Vector times(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) times[k] = static_cast<double>(k) * dt;
  return rollout_on_grid(net, y0, inputs, times);
}

StepReport compare_trajectories(const Trajectory& reference, const Trajectory& predicted) {
  check_trajectory(reference);
  check_trajectory(predicted);
  if (reference.size() != predicted.size() || reference.dim() != predicted.dim()) {
    throw DimensionError("compare: reference has " + std::to_string(reference.size()) + " states of length " +
                         std::to_string(reference.dim()) + ", prediction has " + std::to_string(predicted.size()) +
                         " of length " + std::to_string(predicted.dim()));
  }
  StepReport report;
  double sum = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    if (reference.times[k] != predicted.times[k]) throw ConfigError("compare: time grids differ");
    const Vector& r = reference.states[k];
    const Vector& p = predicted.states[k];
    double sq = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) sq += (p[i] - r[i]) * (p[i] - r[i]);
    if (k > 0) sum += sq;
    const double err = max_abs_diff(p, r);
    report.max_error = std::max(report.max_error, err);
    report.rows.push_back({reference.times[k], r, p, err});
  }
  if (reference.size() > 1) report.mse = sum / static_cast<double>(reference.size() - 1);
  return report;
}

StepReport validate(const FeedForwardNet& net, const Trajectory& reference, const InputFn& inputs) {
  check_trajectory(reference);
  if (net.output_dim() != reference.dim()) {
    throw DimensionError("validate: network output has length " + std::to_string(net.output_dim()) +
                         ", reference states have length " + std::to_string(reference.dim()));
  }
  const auto start = std::chrono::steady_clock::now();
  const Trajectory predicted = rollout_on_grid(net, reference.states.front(), inputs, reference.times);
  StepReport report = compare_trajectories(reference, predicted);
  report.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hybridode
