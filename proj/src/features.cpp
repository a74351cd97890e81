#include "vecspot/features.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vecspot {

Point2 normalize_point(Point2 p, const Drawing& drawing) {
  if (!(drawing.width > 0.0 && drawing.height > 0.0)) {
    throw std::invalid_argument("normalize_point: drawing extents must be positive");
  }
  return {(p.x - drawing.origin.x) / drawing.width - 0.5,
          (p.y - drawing.origin.y) / drawing.height - 0.5};
}

double normalize_id(int value, int min_value, int max_value) {
  if (value < min_value || value > max_value) {
    throw std::out_of_range("normalize_id: value outside [min, max]");
  }
  if (min_value == max_value) return 0.0;
  return static_cast<double>(value - min_value) / (max_value - min_value) - 0.5;
}

Point2 primitive_centroid(std::span<const LineSegment> segments) {
  if (segments.empty()) {
    throw std::invalid_argument("primitive_centroid: no segments");
  }
  double sx = 0.0, sy = 0.0;
  for (const LineSegment& s : segments) {
    sx += 0.5 * (s.start.x + s.end.x);
    sy += 0.5 * (s.start.y + s.end.y);
  }
  const double inv = 1.0 / static_cast<double>(segments.size());
  return {sx * inv, sy * inv};
}

LineToken line_token(const LineSegment& segment, Point2 centroid, double z_slot) {
  const double x1 = segment.start.x, y1 = segment.start.y;
  const double x2 = segment.end.x, y2 = segment.end.y;
  const double l = std::hypot(x2 - x1, y2 - y1);
  const double cx = 0.5 * (x1 + x2);
  const double cy = 0.5 * (y1 + y2);
  double dx = 0.0, dy = 0.0;
  if (l > 0.0) {
    dx = (x1 - x2) / l;
    dy = (y1 - y2) / l;
  }
  LineToken token;
  token.coord = {cx, cy, z_slot};
  token.feat = {l, dx, dy, cx, cy, centroid.x, centroid.y};
  token.primitive_id = segment.primitive_id;
  token.layer = segment.layer;
  return token;
}

TokenSet build_tokens(const TokenizedDrawing& tokenized, const Drawing& drawing,
                      PriorMode mode) {
  // Ranges over ids present in the drawing, for the mode-dependent z-slot.
  int layer_min = std::numeric_limits<int>::max();
  int layer_max = std::numeric_limits<int>::min();
  int id_min = std::numeric_limits<int>::max();
  int id_max = std::numeric_limits<int>::min();
  for (const Primitive& p : drawing.primitives) {
    layer_min = std::min(layer_min, p.layer);
    layer_max = std::max(layer_max, p.layer);
    id_min = std::min(id_min, p.id);
    id_max = std::max(id_max, p.id);
  }

  std::vector<LineSegment> normalized(tokenized.segments.size());
  for (size_t i = 0; i < tokenized.segments.size(); ++i) {
    normalized[i] = tokenized.segments[i];
    normalized[i].start = normalize_point(normalized[i].start, drawing);
    normalized[i].end = normalize_point(normalized[i].end, drawing);
  }

  TokenSet set;
  set.tokens.reserve(normalized.size());
  set.ranges = tokenized.ranges;
  set.primitive_ids.reserve(drawing.primitives.size());
  set.primitive_layers.reserve(drawing.primitives.size());
  for (size_t j = 0; j < tokenized.ranges.size(); ++j) {
    const auto [begin, end] = tokenized.ranges[j];
    const Primitive& prim = drawing.primitives[j];
    set.primitive_ids.push_back(prim.id);
    set.primitive_layers.push_back(prim.layer);
    const Point2 centroid = primitive_centroid(
        std::span<const LineSegment>(normalized.data() + begin, end - begin));
    const double z_slot = mode == PriorMode::WithLayerPrior
                              ? normalize_id(prim.layer, layer_min, layer_max)
                              : normalize_id(prim.id, id_min, id_max);
    for (int i = begin; i < end; ++i) {
      set.tokens.push_back(line_token(normalized[i], centroid, z_slot));
    }
  }
  return set;
}

}  // namespace vecspot
