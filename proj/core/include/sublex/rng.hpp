#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sublex {

/// SplitMix64 finalizer (Steele, Lea & Flood's SplitMix generator's output
/// mixing function). Used to derive independent per-path seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed for path number `path_index` under a master seed: the SplitMix64
/// mix of master_seed advanced by (path_index + 1) golden-gamma increments.
/// Documented so that externally produced paths can be reproduced.
constexpr std::uint64_t derive_path_seed(std::uint64_t master_seed,
                                         std::uint64_t path_index) noexcept {
  return mix64(master_seed + 0x9E3779B97F4A7C15ull * (path_index + 1));
}

/// Deterministic uniform source. The engine is std::mt19937_64, whose output
/// sequence is pinned by the C++ standard, and the [0,1) mapping takes the
/// top 53 bits explicitly. std::uniform_real_distribution is deliberately
/// not used anywhere: its output is implementation-defined and would break
/// bit-level reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53-bit resolution: (x >> 11) * 2^-53.
  double next_u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Neumaier-compensated accumulator for long running sums; keeps partial
/// means accurate to ~1 ulp over millions of terms.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + carry; }
};

}  // namespace sublex
