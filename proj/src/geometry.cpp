#include "vecspot/geometry.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace vecspot {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Point2 bezier_point(const CubicBezier& c, double s) {
  const double u = 1.0 - s;
  const double b0 = u * u * u;
  const double b1 = 3.0 * u * u * s;
  const double b2 = 3.0 * u * s * s;
  const double b3 = s * s * s;
  return {b0 * c.p0.x + b1 * c.p1.x + b2 * c.p2.x + b3 * c.p3.x,
          b0 * c.p0.y + b1 * c.p1.y + b2 * c.p2.y + b3 * c.p3.y};
}

// |B'(s)| of a cubic segment.
double bezier_speed(const CubicBezier& c, double s) {
  const double u = 1.0 - s;
  const double dx = 3.0 * (u * u * (c.p1.x - c.p0.x) + 2.0 * u * s * (c.p2.x - c.p1.x) +
                           s * s * (c.p3.x - c.p2.x));
  const double dy = 3.0 * (u * u * (c.p1.y - c.p0.y) + 2.0 * u * s * (c.p2.y - c.p1.y) +
                           s * s * (c.p3.y - c.p2.y));
  return std::hypot(dx, dy);
}

// 7-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 7> kGlNode = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr std::array<double, 7> kGlWeight = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
    0.1294849661688697};

double gl7(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 7; ++i) {
    acc += kGlWeight[i] * f(mid + half * kGlNode[i]);
  }
  return acc * half;
}

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double whole, double rel_tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl7(f, a, mid);
  const double right = gl7(f, mid, b);
  const double sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) <= rel_tol * std::max(std::abs(sum), 1e-12)) {
    return sum;
  }
  return adaptive_quad(f, a, mid, left, rel_tol, depth - 1) +
         adaptive_quad(f, mid, b, right, rel_tol, depth - 1);
}

double arc_length_of(const std::function<double(double)>& speed, double a, double b,
                     double rel_tol) {
  return adaptive_quad(speed, a, b, gl7(speed, a, b), rel_tol, 32);
}

constexpr double kLengthRelTol = 1e-6;

}  // namespace

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point2 path_point(const Primitive& primitive, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("path_point: parameter t outside [0,1]");
  }
  return std::visit(
      [t](const auto& g) -> Point2 {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, LineGeom>) {
          return {g.a.x + t * (g.b.x - g.a.x), g.a.y + t * (g.b.y - g.a.y)};
        } else if constexpr (std::is_same_v<G, ArcGeom>) {
          const double ang = g.start_angle + t * (g.end_angle - g.start_angle);
          return {g.center.x + g.radius * std::cos(ang),
                  g.center.y + g.radius * std::sin(ang)};
        } else if constexpr (std::is_same_v<G, CircleGeom>) {
          const double ang = kTwoPi * t;
          return {g.center.x + g.radius * std::cos(ang),
                  g.center.y + g.radius * std::sin(ang)};
        } else if constexpr (std::is_same_v<G, EllipseGeom>) {
          const double ang = kTwoPi * t;
          const double ex = g.rx * std::cos(ang);
          const double ey = g.ry * std::sin(ang);
          const double cr = std::cos(g.rotation);
          const double sr = std::sin(g.rotation);
          return {g.center.x + cr * ex - sr * ey, g.center.y + sr * ex + cr * ey};
        } else {
          static_assert(std::is_same_v<G, CubicPathGeom>);
          if (g.segments.empty()) {
            throw std::invalid_argument("path_point: empty cubic path");
          }
          const int n = static_cast<int>(g.segments.size());
          const double u = t * n;
          const int i = std::min(static_cast<int>(u), n - 1);
          return bezier_point(g.segments[i], u - i);
        }
      },
      primitive.geom);
}

double primitive_length(const Primitive& primitive) {
  return std::visit(
      [](const auto& g) -> double {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, LineGeom>) {
          return distance(g.a, g.b);
        } else if constexpr (std::is_same_v<G, ArcGeom>) {
          return g.radius * std::abs(g.end_angle - g.start_angle);
        } else if constexpr (std::is_same_v<G, CircleGeom>) {
          return kTwoPi * g.radius;
        } else if constexpr (std::is_same_v<G, EllipseGeom>) {
          const double rx = g.rx;
          const double ry = g.ry;
          auto speed = [rx, ry](double t) {
            const double ang = kTwoPi * t;
            const double sx = rx * std::sin(ang);
            const double cy = ry * std::cos(ang);
            return kTwoPi * std::hypot(sx, cy);
          };
          return arc_length_of(speed, 0.0, 1.0, kLengthRelTol);
        } else {
          static_assert(std::is_same_v<G, CubicPathGeom>);
          double total = 0.0;
          for (const CubicBezier& seg : g.segments) {
            auto speed = [&seg](double s) { return bezier_speed(seg, s); };
            total += arc_length_of(speed, 0.0, 1.0, kLengthRelTol);
          }
          return total;
        }
      },
      primitive.geom);
}

}  // namespace vecspot
