#pragma once

#include <cstdint>
#include <vector>

#include "vecspot/geometry.hpp"

namespace vecspot {

// Fixed toy taxonomy: things door=1 (arc + leaf line), window=2 (parallel
// lines), table=3 (line rectangle); stuff wall=4 (boundary line runs),
// railing=5 (rail plus repeated posts).
struct SynthClasses {
  static constexpr int kDoor = 1;
  static constexpr int kWindow = 2;
  static constexpr int kTable = 3;
  static constexpr int kWall = 4;
  static constexpr int kRailing = 5;
  static constexpr int kCount = 5;
};

struct SynthConfig {
  uint64_t seed = 7;
  int count = 1;
  double width = 1000.0;
  double height = 800.0;
  int doors_min = 2, doors_max = 4;
  int windows_min = 2, windows_max = 4;
  int tables_min = 1, tables_max = 2;
  int railings_min = 0, railings_max = 2;  // railing groups; one stuff symbol
  bool include_walls = true;
  double noise = 0.0;  // endpoint jitter in drawing units
};

// Deterministic for a fixed seed. Layer ids equal class ids, so layer
// priors correlate with classes.
std::vector<Drawing> generate(const SynthConfig& cfg);

}  // namespace vecspot
