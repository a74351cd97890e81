#include "vecspot/pipeline.hpp"

#include <json.hpp>

#include <filesystem>

#include "vecspot/bfr.hpp"
#include "vecspot/io_json.hpp"
#include "vecspot/svg.hpp"

namespace vecspot {

using json = nlohmann::ordered_json;

namespace {

struct PerDrawing {
  DrawingOutcome outcome;
  PQReport pq;
  std::vector<int> pred_labels;
  std::vector<int> gt_labels;
  std::vector<double> lengths;
  std::string predictions_json;
  std::string panoptic_json;
  std::string svg;
};

PerDrawing process_one(const SpottingModel& model, const NamedDrawing& named,
                       const PipelineConfig& cfg) {
  PerDrawing result;
  result.outcome.name = named.name;
  try {
    const Drawing& drawing = named.drawing;
    const TokenCounts counts = count_tokens(drawing, cfg.sampling);
    result.outcome.line_tokens = counts.line_tokens;
    result.outcome.point_tokens = counts.point_tokens;

    const TokenSet tokens = build_tokens(tokenize_drawing(drawing, cfg.sampling),
                                         drawing, model.config().prior);
    const Predictions preds = model.infer(tokens);
    const RefinedPrediction refined = cfg.skip_bfr
                                          ? passthrough_refinement(preds, drawing)
                                          : branch_fusion_refine(preds, drawing);
    const PanopticAssignment assignment = assemble_panoptic(refined, drawing);

    const LengthMap lengths = primitive_lengths(drawing);
    const SymbolSet gt = symbols_from_gt(drawing);
    const SymbolSet pred = symbols_from_assignment(assignment, drawing);
    result.pq = panoptic_quality(pred, gt, lengths, drawing.thing_classes,
                                 drawing.stuff_classes);
    result.outcome.pq = result.pq;

    for (size_t i = 0; i < drawing.primitives.size(); ++i) {
      if (!drawing.primitives[i].gt_label) continue;
      result.gt_labels.push_back(*drawing.primitives[i].gt_label);
      result.pred_labels.push_back(refined.semantic.label[i]);
      result.lengths.push_back(lengths.at(drawing.primitives[i].id));
    }

    if (!cfg.out_dir.empty()) {
      result.predictions_json = serialize_predictions(preds);
      result.panoptic_json = serialize_panoptic(assignment, drawing);
      if (cfg.write_svg) {
        result.svg = render_svg(drawing, ColoringMode::Panoptic, nullptr, &assignment);
      }
    }
    result.outcome.ok = true;
  } catch (const std::exception& e) {
    result.outcome.ok = false;
    result.outcome.error = e.what();
  }
  return result;
}

PipelineResult assemble_result(std::vector<PerDrawing>&& rows,
                               const std::vector<NamedDrawing>& drawings,
                               const PipelineConfig& cfg) {
  PipelineResult result;
  PQAccumulator acc;
  std::vector<int> pred_labels, gt_labels;
  std::vector<double> lengths;
  std::set<int> things, stuffs;
  for (const NamedDrawing& d : drawings) {
    things.insert(d.drawing.thing_classes.begin(), d.drawing.thing_classes.end());
    stuffs.insert(d.drawing.stuff_classes.begin(), d.drawing.stuff_classes.end());
  }
  for (PerDrawing& row : rows) {
    result.drawings.push_back(row.outcome);
    if (!row.outcome.ok) continue;
    acc.add(row.pq);
    pred_labels.insert(pred_labels.end(), row.pred_labels.begin(), row.pred_labels.end());
    gt_labels.insert(gt_labels.end(), row.gt_labels.begin(), row.gt_labels.end());
    lengths.insert(lengths.end(), row.lengths.begin(), row.lengths.end());
  }
  result.pq = acc.finalize(things, stuffs);
  result.f1 = gt_labels.empty() ? F1Report{}
                                : semantic_f1(pred_labels, gt_labels, lengths);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].outcome.ok) continue;
      const std::string base = cfg.out_dir + "/" + drawings[i].name;
      write_file(base + ".predictions.json", rows[i].predictions_json);
      write_file(base + ".panoptic.json", rows[i].panoptic_json);
      if (cfg.write_svg) write_file(base + ".svg", rows[i].svg);
    }
    write_file(cfg.out_dir + "/report.json", report_to_json(result));
  }
  return result;
}

}  // namespace

PipelineResult run_pipeline(const SpottingModel& model,
                            const std::vector<NamedDrawing>& drawings,
                            const PipelineConfig& cfg) {
  std::vector<PerDrawing> rows(drawings.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(drawings.size()); ++i) {
    rows[i] = process_one(model, drawings[i], cfg);
  }
  return assemble_result(std::move(rows), drawings, cfg);
}

PipelineResult run_pipeline_serial(const SpottingModel& model,
                                   const std::vector<NamedDrawing>& drawings,
                                   const PipelineConfig& cfg) {
  std::vector<PerDrawing> rows(drawings.size());
  for (size_t i = 0; i < drawings.size(); ++i) {
    rows[i] = process_one(model, drawings[i], cfg);
  }
  return assemble_result(std::move(rows), drawings, cfg);
}

namespace {

json stats_json(const ClassStats& s, const PQTriple& t) {
  return {{"pq", t.pq}, {"rq", t.rq},         {"sq", t.sq},
          {"tp", s.tp}, {"fp", s.fp},         {"fn", s.fn},
          {"iou_sum", s.iou_sum}};
}

}  // namespace

std::string report_to_json(const PipelineResult& result) {
  json doc;
  doc["panoptic"] = stats_json(result.pq.counts, result.pq.total);
  doc["panoptic_thing"] = stats_json(result.pq.thing_counts, result.pq.thing);
  doc["panoptic_stuff"] = stats_json(result.pq.stuff_counts, result.pq.stuff);
  doc["per_class"] = json::array();
  for (const auto& [label, s] : result.pq.per_class) {
    json row = stats_json(s, pq_from_stats(s));
    row["label"] = label;
    doc["per_class"].push_back(std::move(row));
  }
  doc["semantic"] = {{"f1", result.f1.f1},
                     {"wf1", result.f1.wf1},
                     {"wf1_log1p", result.f1.wf1_log1p}};
  doc["semantic_per_class"] = json::array();
  for (const auto& [label, c] : result.f1.per_class) {
    doc["semantic_per_class"].push_back({{"label", label},
                                         {"tp", c.tp},
                                         {"fp", c.fp},
                                         {"fn", c.fn},
                                         {"precision", c.precision},
                                         {"recall", c.recall},
                                         {"f1", c.f1}});
  }
  doc["drawings"] = json::array();
  for (const DrawingOutcome& d : result.drawings) {
    json row = {{"name", d.name},
                {"ok", d.ok},
                {"line_tokens", d.line_tokens},
                {"point_tokens", d.point_tokens}};
    if (d.ok) {
      row["pq"] = d.pq.total.pq;
      row["rq"] = d.pq.total.rq;
      row["sq"] = d.pq.total.sq;
    } else {
      row["error"] = d.error;
    }
    doc["drawings"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string tokens_report_json(const std::vector<TokensReportRow>& rows) {
  json doc;
  long long line_total = 0, point_total = 0;
  doc["drawings"] = json::array();
  for (const TokensReportRow& r : rows) {
    line_total += r.line_tokens;
    point_total += r.point_tokens;
    doc["drawings"].push_back({{"name", r.name},
                               {"line_tokens", r.line_tokens},
                               {"point_tokens", r.point_tokens},
                               {"ratio", r.point_tokens > 0
                                             ? static_cast<double>(r.line_tokens) /
                                                   static_cast<double>(r.point_tokens)
                                             : 0.0}});
  }
  doc["total"] = {{"line_tokens", line_total},
                  {"point_tokens", point_total},
                  {"ratio", point_total > 0 ? static_cast<double>(line_total) /
                                                  static_cast<double>(point_total)
                                            : 0.0}};
  return doc.dump(2) + "\n";
}

}  // namespace vecspot
