#include "ineqgcc/rng.hpp"

#include "ineqgcc/distributions.hpp"

namespace ineqgcc {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
__extension__ using u128 = unsigned __int128;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed + kGolden) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return splitmix64(key_ + counter_ * kGolden);
}

double Rng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_quantile(uniform()); }

bool Rng::bernoulli(double p) { return uniform() < p; }

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift; the bias is below 2^-64 * bound.
  return static_cast<std::uint64_t>(
      (static_cast<u128>(next_u64()) * bound) >> 64);
}

}  // namespace ineqgcc
