#include "iocforge/rng.hpp"

#include <cmath>
#include <numbers>

namespace iocforge {

namespace {

// splitmix64 (Steele, Lea, Flood); full 64-bit period, trivially seedable.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t DeterministicRng::next_u64() { return splitmix64(state_); }

double DeterministicRng::next_unit() {
  // 53 random mantissa bits -> [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double DeterministicRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

double DeterministicRng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - next_unit();  // (0, 1], keeps log() finite
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t state = master;
  (void)splitmix64(state);
  state ^= 0x9e3779b97f4a7c15ULL * (stream + 1);
  (void)splitmix64(state);
  state ^= 0xbf58476d1ce4e5b9ULL * (index + 1);
  return splitmix64(state);
}

}  // namespace iocforge
