#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial twin that computes
// every output element with the same operation order, so the two agree
// bitwise; the serial versions exist for tests and benchmarks.

#include <cstddef>
#include <span>
#include <vector>

#include "hybridode/neuralnet.hpp"
#include "hybridode/solvers.hpp"
#include "hybridode/training.hpp"

namespace hybridode::kernels {

/// c (n x m) = a (n x k) * b (k x m), row-major.
void matmul_serial(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t n,
                   std::size_t k, std::size_t m);
void matmul_parallel(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t n,
                     std::size_t k, std::size_t m);

/// mse(population[i], ds) for every individual.
std::vector<double> population_mse_serial(std::span<const FeedForwardNet> population, const Dataset& ds);
std::vector<double> population_mse_parallel(std::span<const FeedForwardNet> population, const Dataset& ds);

/// Euler-Maruyama paths 0 .. paths-1 of integrate_path.
std::vector<Trajectory> em_paths_serial(const SdeProblem& p, const StepConfig& cfg, std::size_t paths);
std::vector<Trajectory> em_paths_parallel(const SdeProblem& p, const StepConfig& cfg, std::size_t paths);

}  // namespace hybridode::kernels
