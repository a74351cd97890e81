#pragma once

#include <utility>
#include <vector>

#include "vecspot/geometry.hpp"

namespace vecspot {

struct LineSegment {
  Point2 start;
  Point2 end;
  int primitive_id = 0;
  int layer = 0;
};

struct SamplingConfig {
  double alpha_sample = 0.01;  // fraction of min(width, height)
  int k_init_line = 2;
  int k_init_other = 9;
  int k_max = 4096;  // safety cap for pathological primitives
};

struct SampleResult {
  std::vector<Point2> points;  // gamma(t_i), t_i = (i-1)/(K-1)
  bool hit_cap = false;        // K reached k_max with the constraint still violated
};

// Uniform samples over the primitive path, growing K from its initial value
// until every adjacent pair is within alpha_sample * min(width, height).
SampleResult sample_points(const Primitive& primitive, const Drawing& drawing,
                           const SamplingConfig& cfg);

// Pairwise-connects adjacent points into K-1 segments tagged with the
// primitive's id and layer. Throws std::invalid_argument on fewer than 2 points.
std::vector<LineSegment> to_segments(const std::vector<Point2>& points,
                                     const Primitive& primitive);

struct TokenizedDrawing {
  std::vector<LineSegment> segments;
  // Per-primitive [begin, end) into `segments`, in drawing primitive order.
  std::vector<std::pair<int, int>> ranges;
  int capped_primitives = 0;
};

// Concatenation of to_segments over all primitives in drawing order.
// Parallel over primitives; output identical to tokenize_drawing_serial.
TokenizedDrawing tokenize_drawing(const Drawing& drawing, const SamplingConfig& cfg);
TokenizedDrawing tokenize_drawing_serial(const Drawing& drawing, const SamplingConfig& cfg);

// Point-strategy token count for a primitive: the K sample points themselves.
// Used by the tokens-report comparison between line and point representations.
struct TokenCounts {
  long long line_tokens = 0;   // sum of K_j - 1
  long long point_tokens = 0;  // sum of K_j
};
TokenCounts count_tokens(const Drawing& drawing, const SamplingConfig& cfg);

}  // namespace vecspot
