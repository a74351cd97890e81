#include "vecspot/sampler.hpp"

#include <algorithm>
#include <stdexcept>

namespace vecspot {

namespace {

bool constraint_satisfied(const std::vector<Point2>& points, double max_dist) {
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    if (distance(points[i], points[i + 1]) > max_dist) return false;
  }
  return true;
}

std::vector<Point2> uniform_samples(const Primitive& primitive, int k) {
  std::vector<Point2> points(k);
  for (int i = 0; i < k; ++i) {
    points[i] = path_point(primitive, static_cast<double>(i) / (k - 1));
  }
  return points;
}

}  // namespace

SampleResult sample_points(const Primitive& primitive, const Drawing& drawing,
                           const SamplingConfig& cfg) {
  if (!(drawing.width > 0.0 && drawing.height > 0.0)) {
    throw std::invalid_argument("sample_points: drawing extents must be positive");
  }
  const double max_dist = cfg.alpha_sample * std::min(drawing.width, drawing.height);
  int k = primitive.is_line() ? cfg.k_init_line : cfg.k_init_other;

  SampleResult result;
  result.points = uniform_samples(primitive, k);
  while (!constraint_satisfied(result.points, max_dist)) {
    if (k >= cfg.k_max) {
      result.hit_cap = true;
      break;
    }
    ++k;
    result.points = uniform_samples(primitive, k);
  }
  return result;
}

std::vector<LineSegment> to_segments(const std::vector<Point2>& points,
                                     const Primitive& primitive) {
  if (points.size() < 2) {
    throw std::invalid_argument("to_segments: need at least 2 points");
  }
  std::vector<LineSegment> segments(points.size() - 1);
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    segments[i] = {points[i], points[i + 1], primitive.id, primitive.layer};
  }
  return segments;
}

namespace {

TokenizedDrawing assemble(const Drawing& drawing,
                          std::vector<std::vector<LineSegment>>&& per_primitive,
                          const std::vector<char>& capped) {
  TokenizedDrawing out;
  size_t total = 0;
  for (const auto& segs : per_primitive) total += segs.size();
  out.segments.reserve(total);
  out.ranges.reserve(per_primitive.size());
  for (size_t j = 0; j < per_primitive.size(); ++j) {
    const int begin = static_cast<int>(out.segments.size());
    out.segments.insert(out.segments.end(), per_primitive[j].begin(),
                        per_primitive[j].end());
    out.ranges.emplace_back(begin, static_cast<int>(out.segments.size()));
    out.capped_primitives += capped[j] ? 1 : 0;
  }
  (void)drawing;
  return out;
}

}  // namespace

TokenizedDrawing tokenize_drawing(const Drawing& drawing, const SamplingConfig& cfg) {
  const int n = static_cast<int>(drawing.primitives.size());
  std::vector<std::vector<LineSegment>> per_primitive(n);
  std::vector<char> capped(n, 0);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n; ++j) {
    SampleResult s = sample_points(drawing.primitives[j], drawing, cfg);
    per_primitive[j] = to_segments(s.points, drawing.primitives[j]);
    capped[j] = s.hit_cap ? 1 : 0;
  }
  return assemble(drawing, std::move(per_primitive), capped);
}

TokenizedDrawing tokenize_drawing_serial(const Drawing& drawing,
                                         const SamplingConfig& cfg) {
  const int n = static_cast<int>(drawing.primitives.size());
  std::vector<std::vector<LineSegment>> per_primitive(n);
  std::vector<char> capped(n, 0);
  for (int j = 0; j < n; ++j) {
    SampleResult s = sample_points(drawing.primitives[j], drawing, cfg);
    per_primitive[j] = to_segments(s.points, drawing.primitives[j]);
    capped[j] = s.hit_cap ? 1 : 0;
  }
  return assemble(drawing, std::move(per_primitive), capped);
}

TokenCounts count_tokens(const Drawing& drawing, const SamplingConfig& cfg) {
  TokenCounts counts;
  for (const Primitive& p : drawing.primitives) {
    const SampleResult s = sample_points(p, drawing, cfg);
    const long long k = static_cast<long long>(s.points.size());
    counts.point_tokens += k;
    counts.line_tokens += k - 1;
  }
  return counts;
}

}  // namespace vecspot
