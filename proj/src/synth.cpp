#include "vecspot/synth.hpp"

#include <cmath>
#include <numeric>

#include "vecspot/rng.hpp"

namespace vecspot {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Builder {
  Drawing drawing;
  Rng& rng;
  double noise;
  int next_id = 1;
  long long next_instance = 1;

  Point2 jitter(Point2 p) {
    if (noise <= 0.0) return p;
    return {p.x + rng.uniform(-noise, noise), p.y + rng.uniform(-noise, noise)};
  }

  void add(PrimitiveGeom geom, int label, long long instance) {
    Primitive p;
    p.id = next_id++;
    p.layer = label;  // layer ids equal class ids in the toy corpus
    p.geom = std::move(geom);
    p.gt_label = label;
    p.gt_instance = static_cast<int>(instance);
    drawing.primitives.push_back(std::move(p));
  }

  void add_line(Point2 a, Point2 b, int label, long long instance) {
    add(LineGeom{jitter(a), jitter(b)}, label, instance);
  }

  void door(Point2 hinge, double radius, int orientation) {
    const long long inst = next_instance++;
    const double base = orientation * 0.5 * kPi;
    const Point2 leaf_end{hinge.x + radius * std::cos(base),
                          hinge.y + radius * std::sin(base)};
    add_line(hinge, leaf_end, SynthClasses::kDoor, inst);
    Point2 c = jitter(hinge);
    double r = radius;
    if (noise > 0.0) r = std::max(1.0, r + rng.uniform(-noise, noise));
    add(ArcGeom{c, r, base, base + 0.5 * kPi}, SynthClasses::kDoor, inst);
  }

  void window(Point2 center, double length, bool horizontal) {
    const long long inst = next_instance++;
    const double half = 0.5 * length;
    const double gap = 2.5;
    if (horizontal) {
      add_line({center.x - half, center.y - gap}, {center.x + half, center.y - gap},
               SynthClasses::kWindow, inst);
      add_line({center.x - half, center.y + gap}, {center.x + half, center.y + gap},
               SynthClasses::kWindow, inst);
    } else {
      add_line({center.x - gap, center.y - half}, {center.x - gap, center.y + half},
               SynthClasses::kWindow, inst);
      add_line({center.x + gap, center.y - half}, {center.x + gap, center.y + half},
               SynthClasses::kWindow, inst);
    }
  }

  void table(Point2 center, double w, double h) {
    const long long inst = next_instance++;
    const double hw = 0.5 * w, hh = 0.5 * h;
    const Point2 a{center.x - hw, center.y - hh}, b{center.x + hw, center.y - hh};
    const Point2 c{center.x + hw, center.y + hh}, d{center.x - hw, center.y + hh};
    add_line(a, b, SynthClasses::kTable, inst);
    add_line(b, c, SynthClasses::kTable, inst);
    add_line(c, d, SynthClasses::kTable, inst);
    add_line(d, a, SynthClasses::kTable, inst);
  }

  void railing(Point2 start, int posts, long long inst) {
    const double spacing = 7.0;
    const double post_len = 9.0;
    add_line(start, {start.x + spacing * (posts - 1), start.y},
             SynthClasses::kRailing, inst);
    for (int i = 0; i < posts; ++i) {
      const double x = start.x + spacing * i;
      add_line({x, start.y}, {x, start.y - post_len}, SynthClasses::kRailing, inst);
    }
  }

  void walls(double margin, long long inst) {
    const double w = drawing.width, h = drawing.height;
    const Point2 c0{margin, margin}, c1{w - margin, margin};
    const Point2 c2{w - margin, h - margin}, c3{margin, h - margin};
    // Each side split into two runs so the stuff symbol spans several
    // primitives.
    auto side = [&](Point2 a, Point2 b) {
      const Point2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
      add_line(a, mid, SynthClasses::kWall, inst);
      add_line(mid, b, SynthClasses::kWall, inst);
    };
    side(c0, c1);
    side(c1, c2);
    side(c2, c3);
    side(c3, c0);
  }
};

}  // namespace

std::vector<Drawing> generate(const SynthConfig& cfg) {
  std::vector<Drawing> drawings;
  drawings.reserve(cfg.count);
  for (int d = 0; d < cfg.count; ++d) {
    Rng rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(d + 1)));
    Builder b{Drawing{}, rng, cfg.noise};
    b.drawing.origin = {0.0, 0.0};
    b.drawing.width = cfg.width;
    b.drawing.height = cfg.height;
    b.drawing.class_count = SynthClasses::kCount;
    b.drawing.thing_classes = {SynthClasses::kDoor, SynthClasses::kWindow,
                               SynthClasses::kTable};
    b.drawing.stuff_classes = {SynthClasses::kWall, SynthClasses::kRailing};
    b.drawing.layers = {{SynthClasses::kDoor, "door"},
                        {SynthClasses::kWindow, "window"},
                        {SynthClasses::kTable, "table"},
                        {SynthClasses::kWall, "wall"},
                        {SynthClasses::kRailing, "railing"}};

    const double margin = 40.0;
    if (cfg.include_walls) b.walls(margin, b.next_instance++);

    // Shuffled interior grid cells; one symbol per cell keeps placements
    // overlap-free.
    const double cell = 90.0;
    const double inner = margin + 30.0;
    std::vector<Point2> cells;
    for (double y = inner + 0.5 * cell; y + 0.5 * cell < cfg.height - inner; y += cell) {
      for (double x = inner + 0.5 * cell; x + 0.5 * cell < cfg.width - inner; x += cell) {
        cells.push_back({x, y});
      }
    }
    for (size_t i = cells.size(); i > 1; --i) {
      std::swap(cells[i - 1], cells[rng.uniform_int(0, static_cast<int>(i) - 1)]);
    }

    size_t cell_idx = 0;
    auto take_cell = [&]() -> Point2 {
      const Point2 c = cells[cell_idx % cells.size()];
      ++cell_idx;
      return {c.x + rng.uniform(-12.0, 12.0), c.y + rng.uniform(-12.0, 12.0)};
    };

    const int doors = rng.uniform_int(cfg.doors_min, cfg.doors_max);
    const int windows = rng.uniform_int(cfg.windows_min, cfg.windows_max);
    const int tables = rng.uniform_int(cfg.tables_min, cfg.tables_max);
    const int railings = rng.uniform_int(cfg.railings_min, cfg.railings_max);

    for (int i = 0; i < doors; ++i) {
      b.door(take_cell(), rng.uniform(20.0, 32.0), rng.uniform_int(0, 3));
    }
    for (int i = 0; i < windows; ++i) {
      b.window(take_cell(), rng.uniform(26.0, 44.0), rng.uniform_int(0, 1) == 0);
    }
    for (int i = 0; i < tables; ++i) {
      b.table(take_cell(), rng.uniform(30.0, 50.0), rng.uniform(22.0, 40.0));
    }
    if (railings > 0) {
      const long long inst = b.next_instance++;  // one stuff symbol per drawing
      for (int i = 0; i < railings; ++i) {
        const Point2 c = take_cell();
        b.railing({c.x - 20.0, c.y}, rng.uniform_int(4, 6), inst);
      }
    }
    drawings.push_back(std::move(b.drawing));
  }
  return drawings;
}

}  // namespace vecspot
