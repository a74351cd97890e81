#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vecspot/metrics.hpp"
#include "vecspot/model.hpp"
#include "vecspot/sampler.hpp"
#include "vecspot/train.hpp"

namespace vecspot {

struct NamedDrawing {
  std::string name;
  Drawing drawing;
};

struct PipelineConfig {
  SamplingConfig sampling;
  bool skip_bfr = false;
  bool write_svg = true;
  std::string out_dir;  // empty: no artifacts written
};

struct DrawingOutcome {
  std::string name;
  bool ok = false;
  std::string error;
  PQReport pq;
  long long line_tokens = 0;
  long long point_tokens = 0;
};

struct PipelineResult {
  PQReport pq;     // aggregated over drawings
  F1Report f1;     // micro over all primitives
  std::vector<DrawingOutcome> drawings;
};

// sample -> featurize -> infer -> refine -> assemble -> evaluate, per
// drawing (parallel across drawings, aggregation in index order). Per-drawing
// failures are recorded and do not abort the batch.
PipelineResult run_pipeline(const SpottingModel& model,
                            const std::vector<NamedDrawing>& drawings,
                            const PipelineConfig& cfg);

// Serial reference for the batch loop; identical output.
PipelineResult run_pipeline_serial(const SpottingModel& model,
                                   const std::vector<NamedDrawing>& drawings,
                                   const PipelineConfig& cfg);

std::string report_to_json(const PipelineResult& result);

struct TokensReportRow {
  std::string name;
  long long line_tokens = 0;
  long long point_tokens = 0;
};

std::string tokens_report_json(const std::vector<TokensReportRow>& rows);

}  // namespace vecspot
