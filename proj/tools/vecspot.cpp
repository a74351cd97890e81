// Command-line front end: synth, sample, featurize, infer, train-toy,
// refine, eval, render, tokens-report.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "vecspot/io_json.hpp"
#include "vecspot/pipeline.hpp"
#include "vecspot/svg.hpp"
#include "vecspot/synth.hpp"

namespace fs = std::filesystem;
using namespace vecspot;

namespace {

// VECSPOT_SEED overrides every seed option.
std::optional<uint64_t> env_seed() {
  const char* v = std::getenv("VECSPOT_SEED");
  if (!v || !*v) return std::nullopt;
  return std::strtoull(v, nullptr, 10);
}

uint64_t pick_seed(uint64_t cli_seed) { return env_seed().value_or(cli_seed); }

PriorMode parse_prior(const std::string& s) {
  if (s == "with" || s == "with_layer_prior") return PriorMode::WithLayerPrior;
  if (s == "without" || s == "without_prior") return PriorMode::WithoutPrior;
  throw CLI::ValidationError("--prior must be 'with' or 'without'");
}

std::vector<std::string> drawing_paths(const std::string& input) {
  std::vector<std::string> paths;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
  } else {
    paths.push_back(input);
  }
  if (paths.empty()) throw std::runtime_error("no drawing files under " + input);
  return paths;
}

std::vector<NamedDrawing> load_drawings(const std::string& input, bool strict) {
  std::vector<NamedDrawing> out;
  for (const std::string& path : drawing_paths(input)) {
    std::vector<std::string> warnings;
    NamedDrawing named;
    named.name = fs::path(path).stem().string();
    named.drawing = parse_drawing(read_file(path), strict, &warnings);
    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w);
    out.push_back(std::move(named));
  }
  return out;
}

ModelConfig default_model_config(int class_count, PriorMode prior, uint64_t seed) {
  ModelConfig mc;
  mc.encoder.embed_dim = 32;
  mc.encoder.depth = 2;
  mc.encoder.heads = 4;
  mc.encoder.window = 32;
  mc.encoder.seed = seed;
  mc.decoder.embed_dim = 32;
  mc.decoder.layers = 6;
  mc.decoder.heads = 4;
  mc.decoder.class_count = class_count;
  mc.decoder.seed = seed ^ 0x5bd1e995U;
  mc.prior = prior;
  return mc;
}

int run(int argc, char** argv) {
  CLI::App app{"vecspot: panoptic symbol spotting on vector drawings"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "generate labeled synthetic drawings");
  SynthConfig synth_cfg;
  std::string synth_out = "out";
  synth_cmd->add_option("--seed", synth_cfg.seed);
  synth_cmd->add_option("--count", synth_cfg.count);
  synth_cmd->add_option("--width", synth_cfg.width);
  synth_cmd->add_option("--height", synth_cfg.height);
  synth_cmd->add_option("--noise", synth_cfg.noise);
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->callback([&] {
    synth_cfg.seed = pick_seed(synth_cfg.seed);
    fs::create_directories(synth_out);
    const auto drawings = generate(synth_cfg);
    for (size_t i = 0; i < drawings.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "drawing_%04zu.json", i);
      write_file(synth_out + "/" + name, serialize_drawing(drawings[i]));
    }
    std::printf("wrote %zu drawings to %s\n", drawings.size(), synth_out.c_str());
  });

  // ---- sample ----
  auto* sample_cmd = app.add_subcommand("sample", "tokenize a drawing into segments");
  std::string sample_in, sample_out, sample_strategy = "line";
  double sample_alpha = 0.01;
  sample_cmd->add_option("--alpha", sample_alpha);
  sample_cmd->add_option("--input", sample_in)->required();
  sample_cmd->add_option("--output", sample_out)->required();
  sample_cmd->add_option("--strategy", sample_strategy)
      ->check(CLI::IsMember({"line", "point"}));
  sample_cmd->callback([&] {
    const Drawing d = parse_drawing(read_file(sample_in));
    SamplingConfig cfg;
    cfg.alpha_sample = sample_alpha;
    nlohmann::ordered_json doc;
    doc["strategy"] = sample_strategy;
    doc["alpha_sample"] = sample_alpha;
    if (sample_strategy == "line") {
      const TokenizedDrawing tok = tokenize_drawing(d, cfg);
      if (tok.capped_primitives > 0) {
        std::fprintf(stderr, "warning: %d primitives hit the sample cap\n",
                     tok.capped_primitives);
      }
      doc["segments"] = nlohmann::ordered_json::array();
      for (const LineSegment& s : tok.segments) {
        doc["segments"].push_back({{"x1", s.start.x},
                                   {"y1", s.start.y},
                                   {"x2", s.end.x},
                                   {"y2", s.end.y},
                                   {"primitive_id", s.primitive_id},
                                   {"layer", s.layer}});
      }
      doc["ranges"] = tok.ranges;
    } else {
      // Point tokens: the K sample points themselves, coordinate-only.
      doc["points"] = nlohmann::ordered_json::array();
      for (const Primitive& p : d.primitives) {
        const SampleResult r = sample_points(p, d, cfg);
        if (r.hit_cap) {
          std::fprintf(stderr, "warning: primitive %d hit the sample cap\n", p.id);
        }
        for (const Point2& pt : r.points) {
          doc["points"].push_back(
              {{"x", pt.x}, {"y", pt.y}, {"primitive_id", p.id}, {"layer", p.layer}});
        }
      }
    }
    write_file(sample_out, doc.dump(2) + "\n");
  });

  // ---- featurize ----
  auto* feat_cmd = app.add_subcommand("featurize", "emit the line token tensors");
  std::string feat_in, feat_out, feat_prior = "with", feat_format = "json";
  double feat_alpha = 0.01;
  feat_cmd->add_option("--alpha", feat_alpha);
  feat_cmd->add_option("--input", feat_in)->required();
  feat_cmd->add_option("--output", feat_out)->required();
  feat_cmd->add_option("--prior", feat_prior);
  feat_cmd->add_option("--format", feat_format)->check(CLI::IsMember({"json", "bin"}));
  feat_cmd->callback([&] {
    const Drawing d = parse_drawing(read_file(feat_in));
    SamplingConfig cfg;
    cfg.alpha_sample = feat_alpha;
    const TokenSet tokens =
        build_tokens(tokenize_drawing(d, cfg), d, parse_prior(feat_prior));
    if (feat_format == "json") {
      write_file(feat_out, serialize_tokens_json(tokens));
    } else {
      write_file(feat_out, serialize_tokens_binary(tokens));
    }
  });

  // ---- infer ----
  auto* infer_cmd = app.add_subcommand("infer", "run the spotting model");
  std::string infer_in, infer_out, infer_ckpt, infer_prior = "with";
  double infer_alpha = 0.01;
  uint64_t infer_seed = 1;
  infer_cmd->add_option("--input", infer_in)->required();
  infer_cmd->add_option("--output", infer_out)->required();
  infer_cmd->add_option("--checkpoint", infer_ckpt);
  infer_cmd->add_option("--alpha", infer_alpha);
  infer_cmd->add_option("--prior", infer_prior);
  infer_cmd->add_option("--seed", infer_seed);
  infer_cmd->callback([&] {
    const Drawing d = parse_drawing(read_file(infer_in));
    std::optional<SpottingModel> model;
    if (!infer_ckpt.empty()) {
      model.emplace(SpottingModel::load(infer_ckpt));
    } else {
      model.emplace(default_model_config(d.class_count, parse_prior(infer_prior),
                                         pick_seed(infer_seed)));
    }
    SamplingConfig cfg;
    cfg.alpha_sample = infer_alpha;
    const TokenSet tokens =
        build_tokens(tokenize_drawing(d, cfg), d, model->config().prior);
    write_file(infer_out, serialize_predictions(model->infer(tokens)));
  });

  // ---- train-toy ----
  auto* train_cmd = app.add_subcommand("train-toy", "fit the model on labeled drawings");
  std::string train_data, train_out, train_prior = "with";
  TrainConfig train_cfg;
  double train_alpha = 0.05;
  int train_dim = 32, train_depth = 2, train_layers = 6, train_threads = 0;
  train_cmd->add_option("--data", train_data)->required();
  train_cmd->add_option("--out", train_out)->required();
  train_cmd->add_option("--epochs", train_cfg.epochs);
  train_cmd->add_option("--lr", train_cfg.lr);
  train_cmd->add_option("--grad-clip", train_cfg.grad_clip);
  train_cmd->add_option("--seed", train_cfg.seed);
  train_cmd->add_option("--alpha", train_alpha);
  train_cmd->add_option("--prior", train_prior);
  train_cmd->add_option("--embed-dim", train_dim);
  train_cmd->add_option("--depth", train_depth);
  train_cmd->add_option("--decoder-layers", train_layers);
  train_cmd->add_option("--threads", train_threads);
  train_cmd->add_flag("--verbose", train_cfg.verbose);
  train_cmd->callback([&] {
    set_num_threads(train_threads);
    train_cfg.seed = pick_seed(train_cfg.seed);
    const auto drawings = load_drawings(train_data, true);
    if (drawings.empty()) throw std::runtime_error("no training drawings");
    int class_count = 0;
    for (const auto& nd : drawings) {
      class_count = std::max(class_count, nd.drawing.class_count);
    }
    ModelConfig mc =
        default_model_config(class_count, parse_prior(train_prior), train_cfg.seed);
    mc.encoder.embed_dim = mc.decoder.embed_dim = train_dim;
    mc.encoder.depth = train_depth;
    mc.decoder.layers = train_layers;
    SpottingModel model(mc);

    SamplingConfig sampling;
    sampling.alpha_sample = train_alpha;
    std::vector<TrainingExample> examples;
    examples.reserve(drawings.size());
    for (const auto& nd : drawings) {
      examples.push_back(make_training_example(nd.drawing, sampling, mc.prior));
    }
    const auto history = train_toy(model, examples, train_cfg);
    model.save(train_out);
    std::printf("trained %d epochs on %zu drawings, final loss %.4f\n",
                train_cfg.epochs, examples.size(), history.back().mean_total);
    std::printf("checkpoint: %s.manifest.json / %s.weights.bin\n", train_out.c_str(),
                train_out.c_str());
  });

  // ---- refine ----
  auto* refine_cmd = app.add_subcommand("refine", "branch fusion refinement + assembly");
  std::string refine_in, refine_drawing, refine_out;
  bool skip_bfr = false;
  refine_cmd->add_option("--input", refine_in)->required();
  refine_cmd->add_option("--drawing", refine_drawing)->required();
  refine_cmd->add_option("--output", refine_out)->required();
  refine_cmd->add_flag("--skip-bfr", skip_bfr);
  refine_cmd->callback([&] {
    const Drawing d = parse_drawing(read_file(refine_drawing));
    const Predictions preds = parse_predictions(read_file(refine_in));
    const RefinedPrediction refined =
        skip_bfr ? passthrough_refinement(preds, d) : branch_fusion_refine(preds, d);
    write_file(refine_out, serialize_panoptic(assemble_panoptic(refined, d), d));
  });

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "panoptic + semantic quality report");
  std::string eval_gt, eval_pred, eval_report, wf1_weight = "linear";
  eval_cmd->add_option("--gt", eval_gt)->required();
  eval_cmd->add_option("--pred", eval_pred)->required();
  eval_cmd->add_option("--report", eval_report)->required();
  eval_cmd->add_option("--wf1-weight", wf1_weight)
      ->check(CLI::IsMember({"linear", "log1p"}));
  eval_cmd->callback([&] {
    const auto gt_paths = drawing_paths(eval_gt);
    std::vector<std::string> pred_paths;
    if (fs::is_directory(eval_pred)) {
      for (const std::string& g : gt_paths) {
        pred_paths.push_back(
            (fs::path(eval_pred) / (fs::path(g).stem().string() + ".panoptic.json"))
                .string());
      }
    } else {
      pred_paths.push_back(eval_pred);
    }
    if (gt_paths.size() != pred_paths.size()) {
      throw std::runtime_error("gt/pred drawing counts differ");
    }
    PQAccumulator acc;
    std::set<int> things, stuffs;
    std::vector<int> pred_labels, gt_labels;
    std::vector<double> lengths;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (size_t i = 0; i < gt_paths.size(); ++i) {
      const Drawing d = parse_drawing(read_file(gt_paths[i]));
      things.insert(d.thing_classes.begin(), d.thing_classes.end());
      stuffs.insert(d.stuff_classes.begin(), d.stuff_classes.end());
      const PanopticAssignment assignment =
          parse_panoptic(read_file(pred_paths[i]), d);
      const LengthMap lmap = primitive_lengths(d);
      const PQReport pq =
          panoptic_quality(symbols_from_assignment(assignment, d), symbols_from_gt(d),
                           lmap, d.thing_classes, d.stuff_classes);
      acc.add(pq);
      rows.push_back({{"name", fs::path(gt_paths[i]).stem().string()},
                      {"pq", pq.total.pq},
                      {"rq", pq.total.rq},
                      {"sq", pq.total.sq}});
      for (size_t k = 0; k < d.primitives.size(); ++k) {
        if (!d.primitives[k].gt_label) continue;
        gt_labels.push_back(*d.primitives[k].gt_label);
        pred_labels.push_back(assignment.label[k] == 0 ? d.class_count + 1
                                                       : assignment.label[k]);
        lengths.push_back(lmap.at(d.primitives[k].id));
      }
    }
    const PQReport total = acc.finalize(things, stuffs);
    const F1Report f1 = semantic_f1(pred_labels, gt_labels, lengths);

    nlohmann::ordered_json doc;
    doc["pq"] = total.total.pq;
    doc["rq"] = total.total.rq;
    doc["sq"] = total.total.sq;
    doc["pq_thing"] = total.thing.pq;
    doc["pq_stuff"] = total.stuff.pq;
    doc["tp"] = total.counts.tp;
    doc["fp"] = total.counts.fp;
    doc["fn"] = total.counts.fn;
    doc["f1"] = f1.f1;
    doc["wf1"] = wf1_weight == "linear" ? f1.wf1 : f1.wf1_log1p;
    doc["wf1_weight"] = wf1_weight;
    doc["wf1_linear"] = f1.wf1;
    doc["wf1_log1p"] = f1.wf1_log1p;
    doc["per_class"] = nlohmann::ordered_json::array();
    for (const auto& [label, s] : total.per_class) {
      const PQTriple t = pq_from_stats(s);
      doc["per_class"].push_back({{"label", label},
                                  {"pq", t.pq},
                                  {"rq", t.rq},
                                  {"sq", t.sq},
                                  {"tp", s.tp},
                                  {"fp", s.fp},
                                  {"fn", s.fn}});
    }
    doc["drawings"] = std::move(rows);
    write_file(eval_report, doc.dump(2) + "\n");
    std::printf("PQ %.4f (thing %.4f, stuff %.4f)  F1 %.4f  wF1 %.4f\n",
                total.total.pq, total.thing.pq, total.stuff.pq, f1.f1,
                wf1_weight == "linear" ? f1.wf1 : f1.wf1_log1p);
  });

  // ---- render ----
  auto* render_cmd = app.add_subcommand("render", "render a drawing to SVG");
  std::string render_in, render_out, render_mode = "gt", render_pred, render_pan;
  render_cmd->add_option("--input", render_in)->required();
  render_cmd->add_option("--output", render_out)->required();
  render_cmd->add_option("--coloring", render_mode)
      ->check(CLI::IsMember({"gt", "semantic", "panoptic"}));
  render_cmd->add_option("--pred", render_pred);
  render_cmd->add_option("--panoptic", render_pan);
  render_cmd->callback([&] {
    const Drawing d = parse_drawing(read_file(render_in));
    std::vector<std::string> warnings;
    std::string svg;
    if (render_mode == "gt") {
      svg = render_svg(d, ColoringMode::GroundTruth, nullptr, nullptr, &warnings);
    } else if (render_mode == "semantic") {
      if (render_pred.empty()) throw std::runtime_error("--pred required for semantic");
      const Predictions preds = parse_predictions(read_file(render_pred));
      const RefinedSemantic sem = initial_semantic(preds, d);
      svg = render_svg(d, ColoringMode::SemanticPred, &sem, nullptr, &warnings);
    } else {
      if (render_pan.empty()) throw std::runtime_error("--panoptic required");
      const PanopticAssignment pan = parse_panoptic(read_file(render_pan), d);
      svg = render_svg(d, ColoringMode::Panoptic, nullptr, &pan, &warnings);
    }
    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w);
    write_file(render_out, svg);
  });

  // ---- tokens-report ----
  auto* tokens_cmd =
      app.add_subcommand("tokens-report", "line vs point token counts per drawing");
  std::string tokens_in, tokens_report_path;
  double tokens_alpha = 0.01;
  tokens_cmd->add_option("--input", tokens_in)->required();
  tokens_cmd->add_option("--alpha", tokens_alpha);
  tokens_cmd->add_option("--report", tokens_report_path)->required();
  tokens_cmd->callback([&] {
    SamplingConfig cfg;
    cfg.alpha_sample = tokens_alpha;
    std::vector<TokensReportRow> rows;
    for (const auto& nd : load_drawings(tokens_in, true)) {
      const TokenCounts counts = count_tokens(nd.drawing, cfg);
      rows.push_back({nd.name, counts.line_tokens, counts.point_tokens});
      std::printf("%-24s line %8lld  point %8lld  ratio %.3f\n", nd.name.c_str(),
                  counts.line_tokens, counts.point_tokens,
                  counts.point_tokens > 0 ? static_cast<double>(counts.line_tokens) /
                                                static_cast<double>(counts.point_tokens)
                                          : 0.0);
    }
    write_file(tokens_report_path, tokens_report_json(rows));
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
