#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "vecspot/io_json.hpp"
#include "vecspot/model.hpp"
#include "vecspot/svg.hpp"
#include "vecspot/synth.hpp"

using namespace vecspot;

namespace {

const char* kMinimalDrawing = R"({
  "origin": {"x": 0, "y": 0},
  "width": 10,
  "height": 10,
  "classes": {"things": [1], "stuffs": [2]},
  "layers": [{"id": 1, "name": "a"}],
  "primitives": [
    {"id": 1, "layer": 1, "kind": "line", "params": {"x1": 0, "y1": 0, "x2": 5, "y2": 0}}
  ]
})";

}  // namespace

TEST_CASE("minimal drawing parses") {
  const Drawing d = parse_drawing(kMinimalDrawing);
  CHECK(d.primitives.size() == 1);
  CHECK(d.class_count == 2);
  CHECK(d.primitives[0].is_line());
}

TEST_CASE("duplicate primitive id is rejected by name") {
  std::string doc = kMinimalDrawing;
  const std::string needle = "]\n}";
  doc.replace(doc.rfind("  ]"), 3,
              R"(,    {"id": 1, "layer": 1, "kind": "circle", "params": {"cx": 3, "cy": 3, "r": 1}}
  ])");
  try {
    parse_drawing(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate primitive id 1") != std::string::npos);
    CHECK(e.where() == "/primitives/1/id");
  }
}

TEST_CASE("unknown fields: strict rejects with a pointer path, lenient warns") {
  std::string doc = kMinimalDrawing;
  doc.insert(doc.find("\"width\""), "\"custom\": 1, ");
  try {
    parse_drawing(doc, true);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.where() == "/custom");
  }
  std::vector<std::string> warnings;
  const Drawing d = parse_drawing(doc, false, &warnings);
  CHECK(d.primitives.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("/custom") != std::string::npos);
}

TEST_CASE("validation failures carry JSON pointer paths") {
  std::string bad_radius = kMinimalDrawing;
  bad_radius.replace(bad_radius.find("\"kind\": \"line\""), 14, "\"kind\": \"circle\"");
  bad_radius.replace(bad_radius.find("{\"x1\": 0, \"y1\": 0, \"x2\": 5, \"y2\": 0}"), 37,
                     "{\"cx\": 0, \"cy\": 0, \"r\": -1}");
  CHECK_THROWS_AS(parse_drawing(bad_radius), ParseError);

  std::string bad_layer = kMinimalDrawing;
  bad_layer.replace(bad_layer.find("\"layer\": 1"), 10, "\"layer\": 9");
  try {
    parse_drawing(bad_layer);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.where() == "/primitives/0/layer");
  }
}

TEST_CASE("drawing round-trips structurally") {
  SynthConfig cfg;
  cfg.seed = 3;
  cfg.count = 2;
  cfg.noise = 0.8;
  for (const Drawing& original : generate(cfg)) {
    const std::string bytes = serialize_drawing(original);
    const Drawing back = parse_drawing(bytes);
    CHECK(serialize_drawing(back) == bytes);
    REQUIRE(back.primitives.size() == original.primitives.size());
    for (size_t i = 0; i < original.primitives.size(); ++i) {
      CHECK(back.primitives[i].id == original.primitives[i].id);
      CHECK(back.primitives[i].layer == original.primitives[i].layer);
      CHECK(back.primitives[i].kind() == original.primitives[i].kind());
      CHECK(back.primitives[i].gt_label == original.primitives[i].gt_label);
      CHECK(primitive_length(back.primitives[i]) ==
            doctest::Approx(primitive_length(original.primitives[i])).epsilon(1e-12));
    }
  }
}

TEST_CASE("all primitive kinds round-trip") {
  Drawing d;
  d.origin = {0, 0};
  d.width = 100;
  d.height = 100;
  d.class_count = 1;
  d.thing_classes = {1};
  d.layers = {{1, "l"}};
  Primitive p;
  p.layer = 1;
  p.id = 1;
  p.geom = LineGeom{{1, 2}, {3, 4}};
  d.primitives.push_back(p);
  p.id = 2;
  p.geom = ArcGeom{{5, 5}, 2.0, 0.25, 2.5};
  d.primitives.push_back(p);
  p.id = 3;
  p.geom = CircleGeom{{9, 9}, 1.5};
  d.primitives.push_back(p);
  p.id = 4;
  p.geom = EllipseGeom{{20, 20}, 4.0, 2.0, 0.3};
  d.primitives.push_back(p);
  p.id = 5;
  p.geom = CubicPathGeom{{CubicBezier{{0, 0}, {1, 2}, {3, 2}, {4, 0}},
                          CubicBezier{{4, 0}, {5, -2}, {6, -2}, {7, 0}}}};
  d.primitives.push_back(p);

  const Drawing back = parse_drawing(serialize_drawing(d));
  CHECK(serialize_drawing(back) == serialize_drawing(d));
  CHECK(std::get<CubicPathGeom>(back.primitives[4].geom).segments.size() == 2);
}

TEST_CASE("predictions and panoptic files round-trip") {
  Predictions preds;
  preds.semantic = {{1, 2, 0.75}, {2, 1, 0.5}};
  preds.instances = {{1, 0.9, {1, 2}}};
  const Predictions back = parse_predictions(serialize_predictions(preds));
  CHECK(back.semantic.size() == 2);
  CHECK(back.semantic[0].primitive_id == 1);
  CHECK(back.semantic[0].label == 2);
  CHECK(back.instances[0].primitive_ids == std::vector<int>{1, 2});

  SynthConfig cfg;
  cfg.count = 1;
  const Drawing d = generate(cfg)[0];
  PanopticAssignment assignment;
  assignment.label.assign(d.primitives.size(), 0);
  assignment.instance.assign(d.primitives.size(), 0);
  assignment.label[0] = 4;
  assignment.instance[0] = 7;
  const PanopticAssignment back2 =
      parse_panoptic(serialize_panoptic(assignment, d), d);
  CHECK(back2.label == assignment.label);
  CHECK(back2.instance == assignment.instance);
}

TEST_CASE("token tensor files") {
  SynthConfig cfg;
  cfg.count = 1;
  const Drawing d = generate(cfg)[0];
  SamplingConfig sampling;
  sampling.alpha_sample = 0.05;
  const TokenSet tokens =
      build_tokens(tokenize_drawing(d, sampling), d, PriorMode::WithLayerPrior);

  const std::vector<char> bin = serialize_tokens_binary(tokens);
  REQUIRE(bin.size() == 8 + 24 + tokens.tokens.size() * 10 * sizeof(double));
  uint64_t n = 0;
  std::memcpy(&n, bin.data() + 8, 8);
  CHECK(n == tokens.tokens.size());
  double first_coord = 0.0;
  std::memcpy(&first_coord, bin.data() + 32, 8);
  CHECK(first_coord == tokens.tokens[0].coord[0]);

  const std::string js = serialize_tokens_json(tokens);
  CHECK(js.find("\"n_lines\"") != std::string::npos);
}

TEST_CASE("svg rendering modes") {
  SynthConfig cfg;
  cfg.count = 1;
  cfg.seed = 8;
  const Drawing d = generate(cfg)[0];

  const std::string gt_svg = render_svg(d, ColoringMode::GroundTruth);
  CHECK(gt_svg.find("<svg") != std::string::npos);
  CHECK(gt_svg.find("<!-- coloring: gt -->") != std::string::npos);
  CHECK(gt_svg == render_svg(d, ColoringMode::GroundTruth));  // deterministic

  // Perfect semantic predictions color identically to ground truth.
  RefinedSemantic sem;
  for (const Primitive& p : d.primitives) {
    sem.label.push_back(*p.gt_label);
    sem.score.push_back(1.0);
  }
  const std::string sem_svg = render_svg(d, ColoringMode::SemanticPred, &sem);
  std::string gt_body = gt_svg;
  std::string sem_body = sem_svg;
  gt_body.erase(gt_body.find("<!--"), gt_body.find("-->") + 4 - gt_body.find("<!--"));
  sem_body.erase(sem_body.find("<!--"), sem_body.find("-->") + 4 - sem_body.find("<!--"));
  CHECK(gt_body == sem_body);

  // A primitive without a prediction renders gray with a warning.
  RefinedSemantic missing = sem;
  missing.label[0] = d.class_count + 1;
  std::vector<std::string> warnings;
  const std::string gray_svg =
      render_svg(d, ColoringMode::SemanticPred, &missing, nullptr, &warnings);
  CHECK(gray_svg.find("#808080") != std::string::npos);
  CHECK(warnings.size() == 1);

  // Empty drawing renders an empty canvas.
  Drawing empty;
  empty.width = 50;
  empty.height = 40;
  const std::string empty_svg = render_svg(empty, ColoringMode::GroundTruth);
  CHECK(empty_svg.find("width=\"50\"") != std::string::npos);
  CHECK(empty_svg.find("<path") == std::string::npos);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  ModelConfig cfg;
  cfg.encoder.embed_dim = 16;
  cfg.encoder.depth = 1;
  cfg.encoder.heads = 2;
  cfg.encoder.window = 8;
  cfg.decoder.embed_dim = 16;
  cfg.decoder.layers = 2;
  cfg.decoder.heads = 2;
  cfg.decoder.class_count = 5;
  const SpottingModel model(cfg);

  const std::string dir = std::filesystem::temp_directory_path() / "vecspot_ckpt_test";
  std::filesystem::create_directories(dir);
  const std::string prefix = dir + "/model";
  model.save(prefix);
  const SpottingModel loaded = SpottingModel::load(prefix);

  const nn::ParamList a = model.params();
  const nn::ParamList b = loaded.params();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    REQUIRE(a[i].second.val().size() == b[i].second.val().size());
    for (size_t k = 0; k < a[i].second.val().size(); ++k) {
      CHECK(a[i].second.val().a[k] == b[i].second.val().a[k]);
    }
  }
  // Re-saving writes identical bytes.
  loaded.save(prefix + "_2");
  CHECK(read_file(prefix + ".weights.bin") == read_file(prefix + "_2.weights.bin"));
  std::filesystem::remove_all(dir);
}
