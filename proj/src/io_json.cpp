#include "vecspot/io_json.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace vecspot {

using json = nlohmann::ordered_json;

namespace {

void check_known_fields(const json& obj, const std::set<std::string>& known,
                        const std::string& where, bool strict,
                        std::vector<std::string>* warnings) {
  for (const auto& [key, value] : obj.items()) {
    if (known.count(key)) continue;
    const std::string path = where + "/" + key;
    if (strict) throw ParseError(path, "unknown field");
    if (warnings) warnings->push_back("ignoring unknown field " + path);
  }
}

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ParseError(where + "/" + key, "expected a number");
  }
  const double v = obj[key].get<double>();
  if (!std::isfinite(v)) throw ParseError(where + "/" + key, "must be finite");
  return v;
}

int require_int(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw ParseError(where + "/" + key, "expected an integer");
  }
  return obj[key].get<int>();
}

PrimitiveGeom parse_geom(const std::string& kind, const json& params,
                         const std::string& where, bool strict,
                         std::vector<std::string>* warnings) {
  if (kind == "line") {
    check_known_fields(params, {"x1", "y1", "x2", "y2"}, where, strict, warnings);
    return LineGeom{{require_number(params, "x1", where), require_number(params, "y1", where)},
                    {require_number(params, "x2", where), require_number(params, "y2", where)}};
  }
  if (kind == "arc") {
    check_known_fields(params, {"cx", "cy", "r", "start_angle", "end_angle"}, where,
                       strict, warnings);
    ArcGeom g{{require_number(params, "cx", where), require_number(params, "cy", where)},
              require_number(params, "r", where),
              require_number(params, "start_angle", where),
              require_number(params, "end_angle", where)};
    if (!(g.radius > 0.0)) throw ParseError(where + "/r", "radius must be > 0");
    return g;
  }
  if (kind == "circle") {
    check_known_fields(params, {"cx", "cy", "r"}, where, strict, warnings);
    CircleGeom g{{require_number(params, "cx", where), require_number(params, "cy", where)},
                 require_number(params, "r", where)};
    if (!(g.radius > 0.0)) throw ParseError(where + "/r", "radius must be > 0");
    return g;
  }
  if (kind == "ellipse") {
    check_known_fields(params, {"cx", "cy", "rx", "ry", "rotation"}, where, strict,
                       warnings);
    EllipseGeom g{{require_number(params, "cx", where), require_number(params, "cy", where)},
                  require_number(params, "rx", where),
                  require_number(params, "ry", where),
                  require_number(params, "rotation", where)};
    if (!(g.rx > 0.0 && g.ry > 0.0)) {
      throw ParseError(where, "ellipse semi-axes must be > 0");
    }
    return g;
  }
  if (kind == "cubic-path") {
    check_known_fields(params, {"segments"}, where, strict, warnings);
    if (!params.contains("segments") || !params["segments"].is_array() ||
        params["segments"].empty()) {
      throw ParseError(where + "/segments", "expected a non-empty array");
    }
    CubicPathGeom g;
    for (size_t i = 0; i < params["segments"].size(); ++i) {
      const json& seg = params["segments"][i];
      const std::string seg_where = where + "/segments/" + std::to_string(i);
      if (!seg.is_array() || seg.size() != 8) {
        throw ParseError(seg_where, "expected 8 numbers (4 control points)");
      }
      double v[8];
      for (size_t k = 0; k < 8; ++k) {
        if (!seg[k].is_number() || !std::isfinite(seg[k].get<double>())) {
          throw ParseError(seg_where + "/" + std::to_string(k), "expected a finite number");
        }
        v[k] = seg[k].get<double>();
      }
      g.segments.push_back({{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}});
    }
    return g;
  }
  throw ParseError(where + "/kind", "unknown primitive kind '" + kind + "'");
}

json geom_to_json(const PrimitiveGeom& geom, std::string* kind) {
  json params;
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, LineGeom>) {
          *kind = "line";
          params = {{"x1", g.a.x}, {"y1", g.a.y}, {"x2", g.b.x}, {"y2", g.b.y}};
        } else if constexpr (std::is_same_v<G, ArcGeom>) {
          *kind = "arc";
          params = {{"cx", g.center.x},
                    {"cy", g.center.y},
                    {"r", g.radius},
                    {"start_angle", g.start_angle},
                    {"end_angle", g.end_angle}};
        } else if constexpr (std::is_same_v<G, CircleGeom>) {
          *kind = "circle";
          params = {{"cx", g.center.x}, {"cy", g.center.y}, {"r", g.radius}};
        } else if constexpr (std::is_same_v<G, EllipseGeom>) {
          *kind = "ellipse";
          params = {{"cx", g.center.x},
                    {"cy", g.center.y},
                    {"rx", g.rx},
                    {"ry", g.ry},
                    {"rotation", g.rotation}};
        } else {
          *kind = "cubic-path";
          json segs = json::array();
          for (const CubicBezier& c : g.segments) {
            segs.push_back({c.p0.x, c.p0.y, c.p1.x, c.p1.y, c.p2.x, c.p2.y, c.p3.x, c.p3.y});
          }
          params = {{"segments", std::move(segs)}};
        }
      },
      geom);
  return params;
}

}  // namespace

Drawing parse_drawing(const std::string& bytes, bool strict,
                      std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "top level must be an object");
  check_known_fields(
      doc, {"origin", "width", "height", "classes", "layers", "primitives"}, "",
      strict, warnings);

  Drawing d;
  if (!doc.contains("origin") || !doc["origin"].is_object()) {
    throw ParseError("/origin", "expected an object");
  }
  check_known_fields(doc["origin"], {"x", "y"}, "/origin", strict, warnings);
  d.origin = {require_number(doc["origin"], "x", "/origin"),
              require_number(doc["origin"], "y", "/origin")};
  d.width = require_number(doc, "width", "");
  d.height = require_number(doc, "height", "");
  if (!(d.width > 0.0) || !(d.height > 0.0)) {
    throw ParseError("/width", "drawing extents must be positive");
  }

  if (!doc.contains("classes") || !doc["classes"].is_object()) {
    throw ParseError("/classes", "expected an object");
  }
  check_known_fields(doc["classes"], {"things", "stuffs"}, "/classes", strict, warnings);
  for (const char* key : {"things", "stuffs"}) {
    const std::string where = std::string("/classes/") + key;
    if (!doc["classes"].contains(key) || !doc["classes"][key].is_array()) {
      throw ParseError(where, "expected an array");
    }
    for (const json& v : doc["classes"][key]) {
      if (!v.is_number_integer() || v.get<int>() < 1) {
        throw ParseError(where, "class indices must be positive integers");
      }
      if (std::strcmp(key, "things") == 0) {
        d.thing_classes.insert(v.get<int>());
      } else {
        d.stuff_classes.insert(v.get<int>());
      }
    }
  }
  for (int c : d.thing_classes) {
    if (d.stuff_classes.count(c)) {
      throw ParseError("/classes", "class " + std::to_string(c) + " is both thing and stuff");
    }
  }
  d.class_count = 0;
  for (int c : d.thing_classes) d.class_count = std::max(d.class_count, c);
  for (int c : d.stuff_classes) d.class_count = std::max(d.class_count, c);

  std::set<int> layer_ids;
  if (doc.contains("layers")) {
    if (!doc["layers"].is_array()) throw ParseError("/layers", "expected an array");
    for (size_t i = 0; i < doc["layers"].size(); ++i) {
      const std::string where = "/layers/" + std::to_string(i);
      const json& l = doc["layers"][i];
      if (!l.is_object()) throw ParseError(where, "expected an object");
      check_known_fields(l, {"id", "name"}, where, strict, warnings);
      LayerInfo info;
      info.id = require_int(l, "id", where);
      info.name = l.contains("name") && l["name"].is_string() ? l["name"].get<std::string>() : "";
      if (!layer_ids.insert(info.id).second) {
        throw ParseError(where + "/id", "duplicate layer id " + std::to_string(info.id));
      }
      d.layers.push_back(std::move(info));
    }
  }

  if (!doc.contains("primitives") || !doc["primitives"].is_array()) {
    throw ParseError("/primitives", "expected an array");
  }
  std::set<int> seen_ids;
  for (size_t i = 0; i < doc["primitives"].size(); ++i) {
    const std::string where = "/primitives/" + std::to_string(i);
    const json& pj = doc["primitives"][i];
    if (!pj.is_object()) throw ParseError(where, "expected an object");
    check_known_fields(pj, {"id", "layer", "kind", "params", "gt_label", "gt_instance"},
                       where, strict, warnings);
    Primitive p;
    p.id = require_int(pj, "id", where);
    if (!seen_ids.insert(p.id).second) {
      throw ParseError(where + "/id", "duplicate primitive id " + std::to_string(p.id));
    }
    p.layer = require_int(pj, "layer", where);
    if (!layer_ids.empty() && !layer_ids.count(p.layer)) {
      throw ParseError(where + "/layer",
                       "layer " + std::to_string(p.layer) + " not declared in /layers");
    }
    if (!pj.contains("kind") || !pj["kind"].is_string()) {
      throw ParseError(where + "/kind", "expected a string");
    }
    if (!pj.contains("params") || !pj["params"].is_object()) {
      throw ParseError(where + "/params", "expected an object");
    }
    p.geom = parse_geom(pj["kind"].get<std::string>(), pj["params"], where + "/params",
                        strict, warnings);
    if (pj.contains("gt_label")) {
      const int label = require_int(pj, "gt_label", where);
      if (label < 1 || label > d.class_count ||
          (!d.thing_classes.count(label) && !d.stuff_classes.count(label))) {
        throw ParseError(where + "/gt_label",
                         "label " + std::to_string(label) + " not in declared classes");
      }
      p.gt_label = label;
    }
    if (pj.contains("gt_instance")) p.gt_instance = require_int(pj, "gt_instance", where);
    d.primitives.push_back(std::move(p));
  }
  return d;
}

std::string serialize_drawing(const Drawing& d) {
  json doc;
  doc["origin"] = {{"x", d.origin.x}, {"y", d.origin.y}};
  doc["width"] = d.width;
  doc["height"] = d.height;
  doc["classes"] = {{"things", d.thing_classes}, {"stuffs", d.stuff_classes}};
  doc["layers"] = json::array();
  for (const LayerInfo& l : d.layers) {
    doc["layers"].push_back({{"id", l.id}, {"name", l.name}});
  }
  doc["primitives"] = json::array();
  for (const Primitive& p : d.primitives) {
    std::string kind;
    json params = geom_to_json(p.geom, &kind);
    json pj = {{"id", p.id}, {"layer", p.layer}, {"kind", kind}, {"params", std::move(params)}};
    if (p.gt_label) pj["gt_label"] = *p.gt_label;
    if (p.gt_instance) pj["gt_instance"] = *p.gt_instance;
    doc["primitives"].push_back(std::move(pj));
  }
  return doc.dump(2) + "\n";
}

Predictions parse_predictions(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  Predictions preds;
  if (doc.contains("semantic")) {
    for (size_t i = 0; i < doc["semantic"].size(); ++i) {
      const json& s = doc["semantic"][i];
      const std::string where = "/semantic/" + std::to_string(i);
      preds.semantic.push_back({require_int(s, "primitive_id", where),
                                require_int(s, "label", where),
                                require_number(s, "score", where)});
    }
  }
  if (doc.contains("instances")) {
    for (size_t i = 0; i < doc["instances"].size(); ++i) {
      const json& s = doc["instances"][i];
      const std::string where = "/instances/" + std::to_string(i);
      InstancePred p;
      p.label = require_int(s, "label", where);
      p.score = require_number(s, "score", where);
      if (!s.contains("primitive_ids") || !s["primitive_ids"].is_array()) {
        throw ParseError(where + "/primitive_ids", "expected an array");
      }
      for (const json& v : s["primitive_ids"]) p.primitive_ids.push_back(v.get<int>());
      preds.instances.push_back(std::move(p));
    }
  }
  return preds;
}

std::string serialize_predictions(const Predictions& preds) {
  json doc;
  doc["semantic"] = json::array();
  for (const SemanticPred& s : preds.semantic) {
    doc["semantic"].push_back(
        {{"primitive_id", s.primitive_id}, {"label", s.label}, {"score", s.score}});
  }
  doc["instances"] = json::array();
  for (const InstancePred& p : preds.instances) {
    doc["instances"].push_back(
        {{"label", p.label}, {"score", p.score}, {"primitive_ids", p.primitive_ids}});
  }
  return doc.dump(2) + "\n";
}

PanopticAssignment parse_panoptic(const std::string& bytes, const Drawing& drawing) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  const auto positions = primitive_positions(drawing);
  PanopticAssignment out;
  out.label.assign(drawing.primitives.size(), 0);
  out.instance.assign(drawing.primitives.size(), 0);
  if (!doc.contains("assignments") || !doc["assignments"].is_array()) {
    throw ParseError("/assignments", "expected an array");
  }
  for (size_t i = 0; i < doc["assignments"].size(); ++i) {
    const json& a = doc["assignments"][i];
    const std::string where = "/assignments/" + std::to_string(i);
    const int id = require_int(a, "primitive_id", where);
    const auto it = positions.find(id);
    if (it == positions.end()) {
      throw ParseError(where + "/primitive_id",
                       "unknown primitive id " + std::to_string(id));
    }
    out.label[it->second] = require_int(a, "label", where);
    out.instance[it->second] = require_int(a, "instance", where);
  }
  return out;
}

std::string serialize_panoptic(const PanopticAssignment& assignment,
                               const Drawing& drawing) {
  json doc;
  doc["assignments"] = json::array();
  for (size_t i = 0; i < drawing.primitives.size(); ++i) {
    if (assignment.label[i] == 0) continue;
    doc["assignments"].push_back({{"primitive_id", drawing.primitives[i].id},
                                  {"label", assignment.label[i]},
                                  {"instance", assignment.instance[i]}});
  }
  return doc.dump(2) + "\n";
}

std::string serialize_tokens_json(const TokenSet& tokens) {
  json doc;
  doc["n_lines"] = tokens.tokens.size();
  doc["coord_dim"] = 3;
  doc["feat_dim"] = 7;
  doc["tokens"] = json::array();
  for (const LineToken& t : tokens.tokens) {
    doc["tokens"].push_back({{"primitive_id", t.primitive_id},
                             {"layer", t.layer},
                             {"coord", t.coord},
                             {"feat", t.feat}});
  }
  return doc.dump(2) + "\n";
}

std::vector<char> serialize_tokens_binary(const TokenSet& tokens) {
  const uint64_t header[3] = {tokens.tokens.size(), 3, 7};
  std::vector<char> bytes;
  bytes.reserve(8 * 3 + tokens.tokens.size() * 10 * 8 + 8);
  const char magic[8] = {'V', 'S', 'T', 'K', 'N', '1', 0, 0};
  bytes.insert(bytes.end(), magic, magic + 8);
  const char* h = reinterpret_cast<const char*>(header);
  bytes.insert(bytes.end(), h, h + sizeof(header));
  auto append = [&bytes](const double* v, size_t n) {
    const char* p = reinterpret_cast<const char*>(v);
    bytes.insert(bytes.end(), p, p + n * sizeof(double));
  };
  for (const LineToken& t : tokens.tokens) append(t.coord.data(),
                                                  t.coord.size());
  for (const LineToken& t : tokens.tokens) append(t.feat.data(), t.feat.size());
  return bytes;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_file(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace vecspot
