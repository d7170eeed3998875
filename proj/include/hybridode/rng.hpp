#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hybridode {

/// Mixes a base seed with stream coordinates (iteration, index, ...) into an
/// independent 64-bit seed. Pure function, so concurrent consumers can derive
/// their own streams without coordination.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords);

/// Seedable standard-normal source. Box-Muller on 53-bit uniforms drawn from
/// mt19937_64, so output is identical across standard libraries.
class NormalRng {
public:
  explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

  double operator()();

private:
  double uniform_open();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hybridode
