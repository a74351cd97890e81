#pragma once

#include <cstdint>
#include <random>

namespace vecspot {

// Seeded RNG with hand-mapped distributions so streams are reproducible
// across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive
    const double span = static_cast<double>(hi) - lo + 1.0;
    int v = lo + static_cast<int>(uniform() * span);
    return v > hi ? hi : v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vecspot
