#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "torusfio/types.hpp"

namespace torusfio {

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for stream `index` under `master`: two splitmix64 rounds over the pair,
/// so parallel and serial consumers see the same numbers per index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Stream {
 public:
  Stream(std::uint64_t master, std::uint64_t index) : engine_(derive_seed(master, index)) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  /// Complex normal with E|z|^2 = 1.
  Complex complex_normal() {
    const double s = 1.0 / std::sqrt(2.0);
    double re = normal();
    double im = normal();
    return {s * re, s * im};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace torusfio
