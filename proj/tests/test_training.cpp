#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hybridode/errors.hpp"
#include "hybridode/rng.hpp"
#include "hybridode/training.hpp"

using namespace hybridode;

namespace {

Dataset decay_dataset(double dt = 0.05) {
  const IvpProblem p = linear_decay_forced();
  return make_dataset(integrate(p, StepConfig{.dt = dt}), p.input);
}

}  // namespace

TEST_CASE("make_dataset") {
  const Trajectory two{.times = {0.0, 0.5}, .states = {{1.0}, {2.0}}};
  const Dataset one = make_dataset(two, no_input());
  REQUIRE(one.size() == 1);
  CHECK(one.samples[0].input == Vector{1.0});
  CHECK(one.samples[0].target == Vector{2.0});

  const Dataset ds = decay_dataset();
  CHECK(ds.size() == 20);
  CHECK(ds.input_dim() == 2);
  CHECK(ds.samples[0].input[0] == 1.0);
  CHECK(ds.samples[0].input[1] == 0.0);
  CHECK(ds.samples[0].target[0] == doctest::Approx(1.0 + 0.05 * -0.1).epsilon(1e-15));

  const Trajectory flat{.times = {0.0, 1.0, 2.0}, .states = {{4.0}, {4.0}, {4.0}}};
  for (const auto& s : make_dataset(flat, no_input()).samples) {
    CHECK(s.input == Vector{4.0});
    CHECK(s.target == Vector{4.0});
  }

  const Trajectory single{.times = {0.0}, .states = {{1.0}}};
  CHECK_THROWS_AS(make_dataset(single, no_input()), ConfigError);
}

TEST_CASE("mse") {
  Dataset ones;
  for (int i = 0; i < 5; ++i) ones.samples.push_back({Vector{double(i)}, Vector{1.0}});
  CHECK(mse(make_net({1, 3, 1}), ones) == 1.0);

  FeedForwardNet ident = make_net({1, 1});
  ident.weights[0] = Matrix{{1.0, 0.0}};
  Dataset same;
  for (int i = 0; i < 5; ++i) same.samples.push_back({Vector{double(i)}, Vector{double(i)}});
  CHECK(mse(ident, same) == 0.0);

  const Dataset ds = decay_dataset();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FeedForwardNet net = init_weights({2, 10, 1}, seed);
    double total = 0.0;
    for (const auto& s : ds.samples) total += backprop(net, s.input, s.target).loss;
    const double m = mse(net, ds);
    CHECK(m >= 0.0);
    CHECK(std::abs(m - total / ds.size()) <= 1e-12 * std::max(1.0, m));
  }

  CHECK_THROWS_AS(mse(make_net({2, 1}), Dataset{}), ConfigError);
  CHECK_THROWS_AS(mse(make_net({3, 2, 1}), ds), DimensionError);
}

TEST_CASE("elite count") {
  CHECK(elite_count(5) == 1);
  CHECK(elite_count(6) == 2);
  CHECK(elite_count(250) == 50);
}

TEST_CASE("train_es structure") {
  const Dataset ds = decay_dataset();
  const EsResult r = train_es(ds, {2, 10, 1}, EsConfig{.population = 5, .iterations = 1, .noise_scale = 0.05});
  CHECK(r.history.size() == 1);
  // With one iteration the answer is the best initial individual.
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < 5; ++i) best = std::min(best, mse(init_weights({2, 10, 1}, derive_seed(0, {0, i})), ds));
  CHECK(r.history.front() == best);
  CHECK(mse(r.best, ds) == best);
}

TEST_CASE("train_es with vanishing noise freezes the elite") {
  const Dataset ds = decay_dataset();
  const EsResult r = train_es(ds, {2, 10, 1}, EsConfig{.population = 10, .iterations = 6, .noise_scale = 1e-300});
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] == r.history[0]);
}

TEST_CASE("train_es is deterministic and monotone") {
  const Dataset ds = decay_dataset();
  const EsConfig cfg{.population = 40, .iterations = 30, .noise_scale = 0.05, .seed = 5};
  const EsResult a = train_es(ds, {2, 10, 1}, cfg);
  const EsResult b = train_es(ds, {2, 10, 1}, cfg);
  CHECK(a.best == b.best);
  CHECK(a.history == b.history);
  for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i] <= a.history[i - 1]);
  CHECK(a.history.back() < a.history.front());

  EsConfig other = cfg;
  other.seed = 6;
  CHECK(train_es(ds, {2, 10, 1}, other).best != a.best);
}

TEST_CASE("train_es config validation") {
  const Dataset ds = decay_dataset();
  CHECK_THROWS_AS(train_es(ds, {2, 3, 1}, EsConfig{.population = 4}), ConfigError);
  CHECK_THROWS_AS(train_es(ds, {2, 3, 1}, EsConfig{.iterations = 0}), ConfigError);
  CHECK_THROWS_AS(train_es(ds, {2, 3, 1}, EsConfig{.noise_scale = 0.0}), ConfigError);
  CHECK_THROWS_AS(train_es(ds, {3, 3, 1}, EsConfig{.population = 5, .iterations = 1}), DimensionError);
}

TEST_CASE("train_sgd") {
  const Dataset ds = decay_dataset();
  const FeedForwardNet start = init_weights({2, 10, 1}, 7);

  const SgdResult frozen = train_sgd(ds, start, SgdConfig{.learning_rate = 0.0, .epochs = 3});
  CHECK(frozen.net == start);
  CHECK(frozen.history == std::vector<double>(3, mse(start, ds)));

  // One sample, 1 -> 1 linear net, input 1, target 0.
  Dataset single;
  single.samples.push_back({Vector{1.0}, Vector{0.0}});
  FeedForwardNet lin = make_net({1, 1});
  const double a = 0.3, b = -0.7, eta = 0.05;
  lin.weights[0] = Matrix{{a, b}};
  const SgdResult stepped = train_sgd(single, lin, SgdConfig{.learning_rate = eta, .epochs = 1});
  CHECK(stepped.net.weights[0](0, 0) == doctest::Approx(a - 2 * eta * (a + b)).epsilon(1e-15));
  CHECK(stepped.net.weights[0](0, 1) == doctest::Approx(b - 2 * eta * (a + b)).epsilon(1e-15));

  const SgdResult r1 = train_sgd(ds, start, SgdConfig{.learning_rate = 0.1, .epochs = 20, .seed = 3});
  const SgdResult r2 = train_sgd(ds, start, SgdConfig{.learning_rate = 0.1, .epochs = 20, .seed = 3});
  CHECK(r1.net == r2.net);
  CHECK(r1.history.back() < mse(start, ds));
}

TEST_CASE("train_sgd divergence guard names the learning rate") {
  const Dataset ds = decay_dataset();
  try {
    train_sgd(ds, init_weights({2, 10, 1}, 7), SgdConfig{.learning_rate = 50.0, .epochs = 50});
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("eta=50") != std::string::npos);
  }
}

TEST_CASE("rollout") {
  FeedForwardNet ident = make_net({1, 1});
  ident.weights[0] = Matrix{{1.0, 0.0}};
  const Trajectory flat = rollout(ident, Vector{2.5}, no_input(), 0.1, 1.0);
  CHECK(flat.size() == 11);
  for (const auto& s : flat.states) CHECK(s == Vector{2.5});

  FeedForwardNet twice = make_net({2, 1});
  twice.weights[0] = Matrix{{2.0, 1.0, 0.0}};
  const IvpProblem decay = linear_decay_forced();
  const Trajectory one = rollout(twice, Vector{1.0}, decay.input, 1.0, 1.0);
  REQUIRE(one.size() == 2);
  CHECK(one.states[1] == forward(twice, Vector{1.0, decay.input(0.0)[0]}));

  CHECK_THROWS_AS(rollout(twice, Vector{1.0, 2.0}, decay.input, 1.0, 1.0), DimensionError);
}

TEST_CASE("validate") {
  const IvpProblem decay = linear_decay_forced();
  const FeedForwardNet net = init_weights({2, 10, 1}, 1);
  const Trajectory self = rollout(net, decay.y0, decay.input, 0.05, 1.0);
  const StepReport zero = validate(net, self, decay.input);
  CHECK(zero.mse == 0.0);
  CHECK(zero.max_error == 0.0);
  CHECK(zero.rows.size() == 21);

  const Trajectory exact = exact_trajectory(decay, 0.05);
  const StepReport untrained = validate(net, exact, decay.input);
  CHECK(untrained.mse > 0.0);
  CHECK(untrained.max_error > 0.0);
  for (const auto& row : untrained.rows) CHECK(row.abs_error >= 0.0);

  CHECK_THROWS_AS(validate(make_net({2, 3, 2}), exact, decay.input), DimensionError);
}

TEST_CASE("permuting a trained network keeps its dataset error") {
  const Dataset ds = decay_dataset();
  const EsResult r = train_es(ds, {2, 10, 1}, EsConfig{.population = 30, .iterations = 10, .seed = 2});
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> perm(10);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(std::abs(mse(permute_hidden(r.best, 0, perm), ds) - mse(r.best, ds)) <= 1e-12);
  }
}
