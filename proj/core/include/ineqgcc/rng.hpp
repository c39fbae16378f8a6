#pragma once

#include <cstdint>

namespace ineqgcc {

/// Counter-based generator: output i of stream (seed, stream) is
/// splitmix64(key + i * golden), key derived from (seed, stream). Streams for
/// distinct (seed, stream) pairs are independent of evaluation order.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform();
  /// Standard normal by inversion of the uniform draw.
  double normal();
  bool bernoulli(double p);
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ineqgcc
