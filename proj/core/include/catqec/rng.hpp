#pragma once

#include <cstdint>

namespace catqec {

/// Deterministic xorshift-based generator with an explicit uniform mapping,
/// so streams are bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ull)) {
    // a couple of warm-up rounds so nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  uint64_t next_u64() {
    state_ = splitmix(state_);
    return state_;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; convenient for log-sampling.
  double uniform_pos() { return 1.0 - uniform(); }

  /// Derive an independent stream, e.g. one per trajectory.
  static uint64_t derive_seed(uint64_t master, uint64_t index) {
    return splitmix(splitmix(master + 0x632be59bd9b4e019ull * (index + 1)));
  }

 private:
  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  uint64_t state_;
};

}  // namespace catqec
