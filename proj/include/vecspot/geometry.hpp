#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace vecspot {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

double distance(Point2 a, Point2 b);

struct LineGeom {
  Point2 a;
  Point2 b;
};

// Angles in radians; the sweep runs from start_angle to end_angle in the
// stored direction (end < start sweeps clockwise).
struct ArcGeom {
  Point2 center;
  double radius = 0.0;
  double start_angle = 0.0;
  double end_angle = 0.0;
};

struct CircleGeom {
  Point2 center;
  double radius = 0.0;
};

struct EllipseGeom {
  Point2 center;
  double rx = 0.0;
  double ry = 0.0;
  double rotation = 0.0;
};

struct CubicBezier {
  Point2 p0, p1, p2, p3;
};

struct CubicPathGeom {
  std::vector<CubicBezier> segments;
};

using PrimitiveGeom =
    std::variant<LineGeom, ArcGeom, CircleGeom, EllipseGeom, CubicPathGeom>;

enum class PrimitiveKind { Line, Arc, Circle, Ellipse, CubicPath };

struct Primitive {
  int id = 0;
  int layer = 0;
  PrimitiveGeom geom = LineGeom{};
  std::optional<int> gt_label;     // class index in 1..K
  std::optional<int> gt_instance;  // symbol index

  PrimitiveKind kind() const { return static_cast<PrimitiveKind>(geom.index()); }
  bool is_line() const { return kind() == PrimitiveKind::Line; }
};

struct LayerInfo {
  int id = 0;
  std::string name;
};

struct Drawing {
  std::vector<Primitive> primitives;
  Point2 origin;
  double width = 0.0;
  double height = 0.0;
  int class_count = 0;
  std::set<int> thing_classes;
  std::set<int> stuff_classes;
  std::vector<LayerInfo> layers;
};

// Parametric point gamma(t) on the primitive path, t in [0,1]. Closed shapes
// (circle, ellipse) start and end at the parameter-0 point. Throws
// std::domain_error for t outside [0,1].
Point2 path_point(const Primitive& primitive, double t);

// Arc length. Analytic for line/arc/circle, adaptive Gauss-Legendre
// quadrature at 1e-6 relative tolerance for ellipse and cubic paths.
// Degenerate zero-length primitives return 0.
double primitive_length(const Primitive& primitive);

}  // namespace vecspot
