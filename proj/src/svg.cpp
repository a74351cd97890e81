#include "vecspot/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vecspot {

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* kPalette[16] = {
    "#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085",
    "#f39c12", "#2c3e50", "#e74c3c", "#3498db", "#2ecc71", "#9b59b6",
    "#e67e22", "#1abc9c", "#f1c40f", "#7f8c8d"};

constexpr const char* kGray = "#808080";

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string hsl_to_hex(double h, double s, double l) {
  const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = l - 0.5 * c;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround((r + m) * 255.0)),
                static_cast<int>(std::lround((g + m) * 255.0)),
                static_cast<int>(std::lround((b + m) * 255.0)));
  return buf;
}

// Elliptical arc as <= 90-degree parameter chunks, each an exact A command.
void append_elliptic_arc(std::ostringstream& d, Point2 center, double rx, double ry,
                         double rotation, double a0, double a1) {
  const double cr = std::cos(rotation), sr = std::sin(rotation);
  auto at = [&](double ang) -> Point2 {
    const double ex = rx * std::cos(ang), ey = ry * std::sin(ang);
    return {center.x + cr * ex - sr * ey, center.y + sr * ex + cr * ey};
  };
  const double span = a1 - a0;
  const int chunks = std::max(1, static_cast<int>(std::ceil(std::abs(span) / (0.5 * kPi))));
  const double rot_deg = rotation * 180.0 / kPi;
  const int sweep = span >= 0.0 ? 1 : 0;
  Point2 p = at(a0);
  d << "M " << fmt(p.x) << " " << fmt(p.y);
  for (int i = 1; i <= chunks; ++i) {
    const Point2 q = at(a0 + span * i / chunks);
    d << " A " << fmt(rx) << " " << fmt(ry) << " " << fmt(rot_deg) << " 0 " << sweep
      << " " << fmt(q.x) << " " << fmt(q.y);
  }
}

std::string path_data(const PrimitiveGeom& geom) {
  std::ostringstream d;
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, LineGeom>) {
          d << "M " << fmt(g.a.x) << " " << fmt(g.a.y) << " L " << fmt(g.b.x) << " "
            << fmt(g.b.y);
        } else if constexpr (std::is_same_v<G, ArcGeom>) {
          append_elliptic_arc(d, g.center, g.radius, g.radius, 0.0, g.start_angle,
                              g.end_angle);
        } else if constexpr (std::is_same_v<G, CircleGeom>) {
          append_elliptic_arc(d, g.center, g.radius, g.radius, 0.0, 0.0, 2.0 * kPi);
          d << " Z";
        } else if constexpr (std::is_same_v<G, EllipseGeom>) {
          append_elliptic_arc(d, g.center, g.rx, g.ry, g.rotation, 0.0, 2.0 * kPi);
          d << " Z";
        } else {
          static_assert(std::is_same_v<G, CubicPathGeom>);
          d << "M " << fmt(g.segments.front().p0.x) << " " << fmt(g.segments.front().p0.y);
          for (const CubicBezier& c : g.segments) {
            d << " C " << fmt(c.p1.x) << " " << fmt(c.p1.y) << ", " << fmt(c.p2.x) << " "
              << fmt(c.p2.y) << ", " << fmt(c.p3.x) << " " << fmt(c.p3.y);
          }
        }
      },
      geom);
  return d.str();
}

const char* mode_name(ColoringMode mode) {
  switch (mode) {
    case ColoringMode::GroundTruth: return "gt";
    case ColoringMode::SemanticPred: return "semantic";
    case ColoringMode::Panoptic: return "panoptic";
  }
  return "?";
}

}  // namespace

std::string class_color(int label) { return kPalette[(label - 1) % 16]; }

std::string render_svg(const Drawing& drawing, ColoringMode mode,
                       const RefinedSemantic* semantic,
                       const PanopticAssignment* panoptic,
                       std::vector<std::string>* warnings) {
  if (mode == ColoringMode::SemanticPred && !semantic) {
    throw std::invalid_argument("render_svg: semantic coloring requires predictions");
  }
  if (mode == ColoringMode::Panoptic && !panoptic) {
    throw std::invalid_argument("render_svg: panoptic coloring requires an assignment");
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(drawing.width)
      << "\" height=\"" << fmt(drawing.height) << "\" viewBox=\"" << fmt(drawing.origin.x)
      << " " << fmt(drawing.origin.y) << " " << fmt(drawing.width) << " "
      << fmt(drawing.height) << "\">\n";
  svg << "<!-- coloring: " << mode_name(mode) << " -->\n";
  // Flip to keep y up, as in the drawing coordinates.
  svg << "<g transform=\"translate(0 " << fmt(2.0 * drawing.origin.y + drawing.height)
      << ") scale(1 -1)\" fill=\"none\" stroke-width=\"1.5\">\n";

  for (size_t i = 0; i < drawing.primitives.size(); ++i) {
    const Primitive& p = drawing.primitives[i];
    std::string color = kGray;
    switch (mode) {
      case ColoringMode::GroundTruth:
        if (p.gt_label) {
          color = class_color(*p.gt_label);
        } else if (warnings) {
          warnings->push_back("primitive " + std::to_string(p.id) + " has no gt label");
        }
        break;
      case ColoringMode::SemanticPred: {
        const int label = semantic->label[i];
        if (label >= 1 && label <= drawing.class_count) {
          color = class_color(label);
        } else if (warnings) {
          warnings->push_back("primitive " + std::to_string(p.id) +
                              " has no semantic prediction");
        }
        break;
      }
      case ColoringMode::Panoptic: {
        const int label = panoptic->label[i];
        if (label >= 1) {
          const long long z = panoptic->instance[i];
          color = hsl_to_hex(std::fmod(53.0 * label + 47.0 * static_cast<double>(z), 360.0),
                             0.65, 0.45);
        } else if (warnings) {
          warnings->push_back("primitive " + std::to_string(p.id) +
                              " is unassigned in the panoptic result");
        }
        break;
      }
    }
    svg << "<path d=\"" << path_data(p.geom) << "\" stroke=\"" << color << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace vecspot
