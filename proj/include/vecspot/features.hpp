#pragma once

#include <array>
#include <span>
#include <vector>

#include "vecspot/geometry.hpp"
#include "vecspot/sampler.hpp"

namespace vecspot {

// Whether the token z-slot carries the normalized layer id (prior available)
// or the normalized primitive id.
enum class PriorMode { WithLayerPrior, WithoutPrior };

struct LineToken {
  std::array<double, 3> coord{};  // (c_x, c_y, z-slot)
  std::array<double, 7> feat{};   // (l, d_x, d_y, c_x, c_y, c_x^p, c_y^p)
  int primitive_id = 0;
  int layer = 0;
};

// Min-max scaling of drawing coordinates into [-0.5, 0.5]^2.
Point2 normalize_point(Point2 p, const Drawing& drawing);

// Min-max scaling of an integer id into [-0.5, 0.5]; a degenerate range
// (min == max) maps to 0. Throws std::out_of_range for values outside it.
double normalize_id(int value, int min_value, int max_value);

// Mean of segment midpoints. Segments must already be normalized.
Point2 primitive_centroid(std::span<const LineSegment> segments);

// Token for one normalized segment. `z_slot` is the mode-dependent third
// coordinate, already normalized.
LineToken line_token(const LineSegment& segment, Point2 centroid, double z_slot);

struct TokenSet {
  std::vector<LineToken> tokens;               // one per segment, drawing order
  std::vector<std::pair<int, int>> ranges;     // per-primitive [begin, end)
  std::vector<int> primitive_ids;              // per primitive, drawing order
  std::vector<int> primitive_layers;           // per primitive
};

// Normalizes all segments of a tokenized drawing and builds line tokens,
// including per-primitive centroids and the mode-dependent z-slot.
TokenSet build_tokens(const TokenizedDrawing& tokenized, const Drawing& drawing,
                      PriorMode mode);

}  // namespace vecspot
