#pragma once

#include <cstdint>

namespace iocforge {

// Deterministic, platform-independent random source. The standard
// <random> distributions are implementation-defined, so sweeps that must
// reproduce byte-identical artifacts across toolchains use this instead.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller.
  double gaussian();

  std::uint64_t next_u64();

 private:
  double next_unit();  // [0, 1)

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable per-trial seed derivation: mixes a master seed with a stream id
// (e.g. the sweep parameter) and an index (e.g. the trial number), so
// concurrent trials never share generator state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

}  // namespace iocforge
