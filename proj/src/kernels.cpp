#include "hybridode/kernels.hpp"

#include <exception>

#include "hybridode/errors.hpp"

namespace hybridode::kernels {

namespace {

void check_matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t n,
                  std::size_t k, std::size_t m) {
  if (a.size() != n * k || b.size() != k * m || c.size() != n * m) throw DimensionError("matmul kernel: buffer sizes");
}

inline void matmul_row(const double* a, const double* b, double* c, std::size_t k, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) c[j] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const double aip = a[p];
    const double* brow = b + p * m;
    for (std::size_t j = 0; j < m; ++j) c[j] += aip * brow[j];
  }
}

// Worth spawning threads only past this many multiply-adds.
constexpr std::size_t kParallelMatmulWork = 1 << 15;

}  // namespace

void matmul_serial(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t n,
                   std::size_t k, std::size_t m) {
  check_matmul(a, b, c, n, k, m);
  for (std::size_t i = 0; i < n; ++i) matmul_row(a.data() + i * k, b.data(), c.data() + i * m, k, m);
}

void matmul_parallel(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t n,
                     std::size_t k, std::size_t m) {
  check_matmul(a, b, c, n, k, m);
  const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n * k * m >= kParallelMatmulWork)
  for (long i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    matmul_row(a.data() + r * k, b.data(), c.data() + r * m, k, m);
  }
}

std::vector<double> population_mse_serial(std::span<const FeedForwardNet> population, const Dataset& ds) {
  std::vector<double> out(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) out[i] = mse(population[i], ds);
  return out;
}

std::vector<double> population_mse_parallel(std::span<const FeedForwardNet> population, const Dataset& ds) {
  check_dataset(ds);
  std::vector<double> out(population.size());
  std::exception_ptr failure;
  const long count = static_cast<long>(population.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = mse(population[static_cast<std::size_t>(i)], ds);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Trajectory> em_paths_serial(const SdeProblem& p, const StepConfig& cfg, std::size_t paths) {
  std::vector<Trajectory> out;
  out.reserve(paths);
  for (std::size_t i = 0; i < paths; ++i) out.push_back(integrate_path(p, cfg, i));
  return out;
}

std::vector<Trajectory> em_paths_parallel(const SdeProblem& p, const StepConfig& cfg, std::size_t paths) {
  // Validate once up front so per-path failures cannot differ.
  check_problem(p.base);
  if (cfg.method != Method::euler_maruyama) throw ConfigError("stochastic problems integrate with method em only");
  if (cfg.cfl_check) check_cfl(p.base, cfg.dt);
  step_count(p.base.horizon, cfg.dt);

  std::vector<Trajectory> out(paths);
  std::exception_ptr failure;
  const long count = static_cast<long>(paths);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = integrate_path(p, cfg, static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace hybridode::kernels
