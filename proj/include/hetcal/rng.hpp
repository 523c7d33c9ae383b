// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hetcal {

std::uint64_t splitmix64(std::uint64_t x);

/// Stable seed for a sub-stream addressed by a path of indices
/// (sweep point, repeat, stream id, ...). Identical inputs give an
/// identical seed on every platform.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

/// Deterministic random stream with the distributions the simulator
/// needs. The variate algorithms are implemented here (not taken from
/// <random>) so that a seed reproduces the same trace bytes on every
/// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal (Box-Muller, pairs cached).
  double normal();

  /// Gamma(shape, scale = 1/shape): unit mean, variance 1/shape.
  /// Marsaglia-Tsang squeeze; shape >= 1.
  double gamma_unit_mean(int shape);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hetcal
