#pragma once

#include <cstdint>
#include <random>

namespace rglat {

// SplitMix64 finalizer, used to whiten (seed, stream, slot) keys.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One random stream per (master seed, stream index, draw slot). mt19937_64 and
// the 53-bit mapping below are pinned by the standard, so a stream's output
// depends only on its key -- never on thread count or library version. This is
// what makes sampled data byte-identical across schedules.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream = 0,
                     std::uint64_t slot = 0)
      : engine_(mix64(mix64(mix64(master_seed) ^ stream) ^ slot)) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rglat
