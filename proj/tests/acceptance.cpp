// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier end-to-end checks (toy training, determinism) live here
// rather than in the unit suites.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "vecspot/io_json.hpp"
#include "vecspot/pipeline.hpp"
#include "vecspot/svg.hpp"
#include "vecspot/synth.hpp"

using namespace vecspot;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string&)> run;
};

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---------- shared helpers ----------

Drawing frame_drawing(double w, double h) {
  Drawing d;
  d.origin = {0, 0};
  d.width = w;
  d.height = h;
  d.class_count = 2;
  d.thing_classes = {1};
  d.stuff_classes = {2};
  return d;
}

Point2 rand_point(Rng& rng, const Drawing& d, double margin = 0.0) {
  return {rng.uniform(margin, d.width - margin), rng.uniform(margin, d.height - margin)};
}

Primitive rand_primitive(int kind, int id, Rng& rng, const Drawing& d) {
  constexpr double kTwoPi = 6.283185307179586;
  const double r_max = 0.2 * std::min(d.width, d.height);
  Primitive p;
  p.id = id;
  p.layer = 1;
  switch (kind % 5) {
    case 0:
      p.geom = LineGeom{rand_point(rng, d), rand_point(rng, d)};
      break;
    case 1: {
      const double a0 = rng.uniform(0.0, kTwoPi);
      double sweep = rng.uniform(-kTwoPi, kTwoPi);
      if (std::abs(sweep) < 0.1) sweep = 0.5;
      p.geom = ArcGeom{rand_point(rng, d, r_max), rng.uniform(1.0, r_max), a0, a0 + sweep};
      break;
    }
    case 2:
      p.geom = CircleGeom{rand_point(rng, d, r_max), rng.uniform(1.0, r_max)};
      break;
    case 3:
      p.geom = EllipseGeom{rand_point(rng, d, r_max), rng.uniform(1.0, r_max),
                           rng.uniform(1.0, r_max), rng.uniform(0.0, kTwoPi)};
      break;
    default: {
      CubicPathGeom path;
      Point2 prev = rand_point(rng, d);
      const int n = rng.uniform_int(1, 3);
      for (int i = 0; i < n; ++i) {
        CubicBezier c{prev, rand_point(rng, d), rand_point(rng, d), rand_point(rng, d)};
        prev = c.p3;
        path.segments.push_back(c);
      }
      p.geom = path;
      break;
    }
  }
  return p;
}

// ---------- criterion 1 ----------

bool sampling_constraint_suite(std::string& detail) {
  const double t0 = now_seconds();
  Rng rng(4242);
  const Drawing d = frame_drawing(220, 160);
  const double alphas[3] = {0.1, 0.05, 0.01};
  int grown = 0;
  for (int i = 0; i < 1000; ++i) {
    const Primitive p = rand_primitive(i, i, rng, d);
    for (double alpha : alphas) {
      SamplingConfig cfg;
      cfg.alpha_sample = alpha;
      const double bound = alpha * std::min(d.width, d.height);
      const SampleResult r = sample_points(p, d, cfg);
      if (r.hit_cap) {
        detail = "sample cap hit unexpectedly";
        return false;
      }
      for (size_t k = 0; k + 1 < r.points.size(); ++k) {
        if (distance(r.points[k], r.points[k + 1]) > bound + 1e-9) {
          detail = "adjacent distance above the bound";
          return false;
        }
      }
      const int k_final = static_cast<int>(r.points.size());
      const int k_init = p.is_line() ? cfg.k_init_line : cfg.k_init_other;
      if (k_final > k_init) {
        ++grown;
        double worst = 0.0;
        for (int j = 0; j + 1 < k_final - 1; ++j) {
          const Point2 a = path_point(p, static_cast<double>(j) / (k_final - 2));
          const Point2 b = path_point(p, static_cast<double>(j + 1) / (k_final - 2));
          worst = std::max(worst, distance(a, b));
        }
        if (worst <= bound) {
          detail = "K was not minimal";
          return false;
        }
      }
    }
  }
  const double elapsed = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "1000 primitives x 3 alphas, %d grown, %.2f s",
                grown, elapsed);
  detail = buf;
  return elapsed < 10.0 && grown > 0;
}

// ---------- criterion 2 ----------

bool feature_reconstruction(std::string& detail) {
  Rng rng(777);
  int nonzero = 0;
  for (int i = 0; i < 10000; ++i) {
    LineSegment seg{{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)},
                    {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)},
                    1,
                    1};
    const LineToken t = line_token(seg, {0, 0}, 0.0);
    const double l = t.feat[0];
    if (l > 0.0) {
      ++nonzero;
      if (std::abs(std::hypot(t.feat[1], t.feat[2]) - 1.0) > 1e-12) {
        detail = "direction is not unit length";
        return false;
      }
    }
    const double sx = t.feat[3] + 0.5 * l * t.feat[1];
    const double sy = t.feat[4] + 0.5 * l * t.feat[2];
    const double ex = t.feat[3] - 0.5 * l * t.feat[1];
    const double ey = t.feat[4] - 0.5 * l * t.feat[2];
    if (std::hypot(sx - seg.start.x, sy - seg.start.y) > 1e-9 ||
        std::hypot(ex - seg.end.x, ey - seg.end.y) > 1e-9) {
      detail = "endpoint reconstruction above 1e-9";
      return false;
    }
  }
  detail = "10000 segments reconstructed, " + std::to_string(nonzero) + " non-degenerate";
  return true;
}

// ---------- criterion 3 ----------

bool pooling_oracle(std::string& detail) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = rng.uniform_int(1, 6);
    const int cols = rng.uniform_int(1, 8);
    Mat m(rows, cols);
    for (double& x : m.a) x = rng.uniform(-10.0, 10.0);
    const Mat pooled = line_pooling(ag::Tensor::constant(m), {{0, rows}}).val();
    for (int c = 0; c < cols; ++c) {
      double mx = m(0, c), mean = 0.0;
      for (int r = 0; r < rows; ++r) {
        mx = std::max(mx, m(r, c));
        mean += m(r, c);
      }
      mean /= rows;
      if (std::abs(pooled(0, c) - (mx + mean)) > 1e-12) {
        detail = "pooling deviates from the max+mean oracle";
        return false;
      }
    }
    // Permutation invariance: reverse the rows.
    Mat rev(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) rev(r, c) = m(rows - 1 - r, c);
    const Mat pooled_rev = line_pooling(ag::Tensor::constant(rev), {{0, rows}}).val();
    for (int c = 0; c < cols; ++c) {
      if (std::abs(pooled(0, c) - pooled_rev(0, c)) > 1e-12) {
        detail = "pooling is not permutation invariant";
        return false;
      }
    }
  }
  detail = "1000 random blocks match within 1e-12";
  return true;
}

// ---------- criterion 4 ----------

bool loss_gradient_check(std::string& detail) {
  const double t0 = now_seconds();

  // Fixed toy: 5 line primitives on two layers, 2 gt instances.
  Drawing d = frame_drawing(100, 100);
  d.class_count = 3;
  d.thing_classes = {1, 2};
  d.stuff_classes = {3};
  for (int i = 0; i < 5; ++i) {
    Primitive p;
    p.id = i + 1;
    p.layer = i < 2 ? 1 : 2;
    p.geom = LineGeom{{10.0 + 12.0 * i, 20.0}, {16.0 + 12.0 * i, 26.0 + 3.0 * i}};
    p.gt_label = i < 2 ? 1 : (i < 4 ? 2 : 3);
    p.gt_instance = i < 2 ? 1 : (i < 4 ? 2 : 3);
    d.primitives.push_back(std::move(p));
  }

  ModelConfig mc;
  mc.encoder.embed_dim = 16;
  mc.encoder.depth = 1;
  mc.encoder.heads = 2;
  mc.encoder.window = 8;
  mc.encoder.seed = 12;
  mc.decoder.embed_dim = 16;
  mc.decoder.layers = 6;
  mc.decoder.heads = 2;
  mc.decoder.class_count = 3;
  mc.decoder.seed = 13;
  mc.loss = LossWeights{2.5, 5.0, 5.0, 5.0};

  SamplingConfig sampling;
  sampling.alpha_sample = 0.05;
  const TokenSet tokens = build_tokens(tokenize_drawing(d, sampling), d, mc.prior);

  std::vector<GtInstance> gt(2);
  gt[0].label = 1;
  gt[0].mask = {1, 1, 0, 0, 0};
  gt[1].label = 2;
  gt[1].mask = {0, 0, 1, 1, 0};
  const std::vector<int> gt_labels = {1, 1, 2, 2, 3};

  SpottingModel model(mc);
  nn::ParamList params = model.params();
  // Non-zero LFE fusion so its gradient path is exercised too.
  Rng lfe_rng(55);
  for (auto& [name, p] : params) {
    if (name.find("lfe.fuse") != std::string::npos) {
      for (double& x : p.value_mut().a) x = lfe_rng.uniform(-0.2, 0.2);
    }
  }

  // Full selection: every head contributes and the graph is deterministic.
  auto full_loss = [&](LossBreakdown* bd) {
    ag::Tensor feats = model.primitive_features(tokens);
    std::vector<int> all(feats.rows());
    for (int i = 0; i < feats.rows(); ++i) all[i] = i;
    const DecodeOutput out = model.decoder().run(feats, all);
    return spotting_loss(out, gt, gt_labels, mc.loss, bd);
  };

  for (auto& [name, p] : params) p.zero_grad();
  LossBreakdown bd;
  ag::Tensor loss = full_loss(&bd);
  ag::backward(loss);

  long checked = 0;
  double worst = 0.0;
  std::string worst_name;
  const double h = 1e-5;
  for (auto& [name, p] : params) {
    Mat& v = p.value_mut();
    for (size_t i = 0; i < v.size(); ++i) {
      const double keep = v.a[i];
      v.a[i] = keep + h;
      const double up = full_loss(nullptr).val()(0, 0);
      v.a[i] = keep - h;
      const double down = full_loss(nullptr).val()(0, 0);
      v.a[i] = keep;
      const double fd = (up - down) / (2.0 * h);
      const double an = p.grad().a[i];
      const double err =
          std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
      if (err > worst) {
        worst = err;
        worst_name = name;
      }
      ++checked;
    }
  }
  const double elapsed = now_seconds() - t0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "%ld weights checked, worst rel err %.2e (%s), loss %.3f, %.1f s",
                checked, worst, worst_name.c_str(), bd.total, elapsed);
  detail = buf;
  return worst < 1e-4 && elapsed < 60.0;
}

// ---------- criteria 5 and 6 ----------

double oracle_iou(const Symbol& a, const Symbol& b, const LengthMap& lengths) {
  std::set<int> sa(a.primitive_ids.begin(), a.primitive_ids.end());
  std::set<int> sb(b.primitive_ids.begin(), b.primitive_ids.end());
  std::set<int> all = sa;
  all.insert(sb.begin(), sb.end());
  double inter = 0.0, uni = 0.0;
  for (int id : all) {
    const double w = std::log1p(lengths.at(id));
    uni += w;
    if (sa.count(id) && sb.count(id)) inter += w;
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

bool pq_oracle_equivalence(std::string& detail) {
  Rng rng(90210);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.uniform_int(2, 8);
    LengthMap lengths;
    for (int i = 1; i <= n; ++i) lengths[i] = rng.uniform(0.0, 40.0);

    auto make_side = [&](SymbolSet& side) {
      std::vector<int> ids(n);
      for (int i = 0; i < n; ++i) ids[i] = i + 1;
      for (size_t i = ids.size(); i > 1; --i) {
        std::swap(ids[i - 1], ids[rng.uniform_int(0, static_cast<int>(i) - 1)]);
      }
      const int symbols = rng.uniform_int(1, 3);
      size_t cursor = 0;
      for (int k = 0; k < symbols && cursor < ids.size(); ++k) {
        Symbol sym;
        sym.label = rng.uniform_int(1, 2);
        sym.instance = k + 1;
        const size_t take = static_cast<size_t>(rng.uniform_int(1, 3));
        for (size_t t = 0; t < take && cursor < ids.size(); ++t) {
          sym.primitive_ids.push_back(ids[cursor++]);
        }
        side.symbols.push_back(std::move(sym));
      }
    };
    SymbolSet pred, gt;
    make_side(pred);
    make_side(gt);

    // Exhaustive pairing with uniqueness assertions.
    std::vector<int> pred_hits(pred.symbols.size(), 0), gt_hits(gt.symbols.size(), 0);
    std::set<int> labels;
    for (const Symbol& s : pred.symbols) labels.insert(s.label);
    for (const Symbol& s : gt.symbols) labels.insert(s.label);
    long long tp = 0;
    double iou_sum = 0.0;
    for (int label : labels) {
      double class_sum = 0.0;
      for (size_t p = 0; p < pred.symbols.size(); ++p) {
        if (pred.symbols[p].label != label) continue;
        for (size_t g = 0; g < gt.symbols.size(); ++g) {
          if (gt.symbols[g].label != label) continue;
          const double iou = oracle_iou(pred.symbols[p], gt.symbols[g], lengths);
          if (iou > 0.5) {
            pred_hits[p]++;
            gt_hits[g]++;
            class_sum += iou;
            ++tp;
          }
        }
      }
      iou_sum += class_sum;
    }
    for (int hcount : pred_hits) {
      if (hcount > 1) {
        detail = "matching uniqueness violated (pred)";
        return false;
      }
    }
    for (int hcount : gt_hits) {
      if (hcount > 1) {
        detail = "matching uniqueness violated (gt)";
        return false;
      }
    }
    const long long fp = static_cast<long long>(pred.symbols.size()) - tp;
    const long long fn = static_cast<long long>(gt.symbols.size()) - tp;
    const double denom = static_cast<double>(tp) + 0.5 * fp + 0.5 * fn;
    const double oracle_pq = denom > 0.0 ? iou_sum / denom : 0.0;

    const PQReport got = panoptic_quality(pred, gt, lengths, {1}, {2});
    if (got.total.pq != oracle_pq || got.counts.tp != tp || got.counts.fp != fp ||
        got.counts.fn != fn) {
      detail = "implementation deviates from the exhaustive oracle";
      return false;
    }

    // Identity scene scores exactly 1 whenever its union has weight.
    bool has_weight = false;
    for (const Symbol& s : gt.symbols) {
      for (int id : s.primitive_ids) has_weight = has_weight || lengths.at(id) > 0.0;
    }
    if (has_weight) {
      const PQReport self = panoptic_quality(gt, gt, lengths, {1}, {2});
      if (std::abs(self.total.pq - 1.0) > 1e-12) {
        detail = "identity scene PQ != 1";
        return false;
      }
    }
  }
  detail = "500 random scenes equal the oracle exactly";
  return true;
}

bool iou_hand_case(std::string& detail) {
  const double e = std::exp(1.0);
  LengthMap lengths = {{1, e - 1.0}, {2, e * e - 1.0}, {3, e - 1.0}};
  const Symbol a{1, 1, {1, 2}};
  const Symbol b{1, 2, {2, 3}};
  const double iou = symbol_iou(a, b, lengths);
  detail = "IoU = " + std::to_string(iou);
  return iou == 0.5;
}

// ---------- criterion 7 ----------

bool bfr_properties(std::string& detail) {
  Rng rng(1337);

  // Worked example: semantic 0.6 vs covering proposals {0.7, 0.5}.
  {
    Drawing d = frame_drawing(10, 10);
    d.class_count = 4;
    d.thing_classes = {1, 2};
    d.stuff_classes = {3, 4};
    Primitive p;
    p.id = 1;
    p.layer = 1;
    p.geom = LineGeom{{0, 0}, {1, 0}};
    d.primitives.push_back(p);
    Predictions preds;
    preds.semantic = {{1, 3, 0.6}};
    preds.instances = {{2, 0.7, {1}}, {1, 0.5, {1}}};
    const auto positions = primitive_positions(d);
    const RefinedSemantic refined =
        override_semantic(initial_semantic(preds, d), preds.instances, positions);
    if (refined.label[0] != 2 || refined.score[0] != 0.7) {
      detail = "worked override example failed";
      return false;
    }
  }

  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.uniform_int(1, 12);
    Drawing d = frame_drawing(10, 10);
    d.class_count = 4;
    d.thing_classes = {1, 2};
    d.stuff_classes = {3, 4};
    for (int i = 1; i <= n; ++i) {
      Primitive p;
      p.id = i;
      p.layer = 1;
      p.geom = LineGeom{{0.0, static_cast<double>(i)}, {1.0, static_cast<double>(i)}};
      d.primitives.push_back(std::move(p));
    }
    Predictions preds;
    for (int i = 1; i <= n; ++i) {
      preds.semantic.push_back({i, rng.uniform_int(1, 5), rng.uniform(0.0, 1.0)});
    }
    const int proposals = rng.uniform_int(0, 5);
    for (int p = 0; p < proposals; ++p) {
      InstancePred prop;
      prop.label = rng.uniform_int(1, 4);
      prop.score = rng.uniform(0.0, 1.0);
      for (int i = 1; i <= n; ++i) {
        if (rng.uniform() < 0.4) prop.primitive_ids.push_back(i);
      }
      preds.instances.push_back(std::move(prop));
    }

    const RefinedSemantic before = initial_semantic(preds, d);
    const RefinedPrediction once = branch_fusion_refine(preds, d);

    for (int i = 0; i < n; ++i) {
      if (once.semantic.score[i] < before.score[i]) {
        detail = "override decreased a semantic score";
        return false;
      }
    }
    for (const InstancePred& prop : once.proposals) {
      for (int id : prop.primitive_ids) {
        if (once.semantic.label[id - 1] != prop.label) {
          detail = "post-remask purity violated";
          return false;
        }
      }
    }
    Predictions again;
    for (int i = 0; i < n; ++i) {
      again.semantic.push_back({i + 1, once.semantic.label[i], once.semantic.score[i]});
    }
    again.instances = once.proposals;
    const RefinedPrediction twice = branch_fusion_refine(again, d);
    if (twice.semantic.label != once.semantic.label ||
        twice.semantic.score != once.semantic.score ||
        twice.proposals.size() != once.proposals.size()) {
      detail = "refinement is not idempotent";
      return false;
    }
    for (size_t k = 0; k < once.proposals.size(); ++k) {
      if (twice.proposals[k].label != once.proposals[k].label ||
          twice.proposals[k].primitive_ids != once.proposals[k].primitive_ids) {
        detail = "refinement is not idempotent (proposals)";
        return false;
      }
    }
  }
  detail = "1000 randomized prediction sets hold all three properties";
  return true;
}

// ---------- criteria 8 and 10 ----------

struct ToyRun {
  double pq_with_bfr = 0.0;
  double pq_skip_bfr = 0.0;
  double seconds = 0.0;
};

ToyRun toy_training_run(PriorMode prior) {
  SynthConfig synth_cfg;
  synth_cfg.seed = 2024;
  synth_cfg.count = 50;
  const auto drawings = generate(synth_cfg);

  ModelConfig mc;
  mc.encoder.embed_dim = 32;
  mc.encoder.depth = 2;
  mc.encoder.heads = 4;
  mc.encoder.window = 32;
  mc.encoder.seed = 1;
  mc.decoder.embed_dim = 32;
  mc.decoder.layers = 6;
  mc.decoder.heads = 4;
  mc.decoder.class_count = SynthClasses::kCount;
  mc.decoder.seed = 2;
  mc.prior = prior;

  SamplingConfig sampling;
  sampling.alpha_sample = 0.05;

  const double t0 = now_seconds();
  SpottingModel model(mc);
  std::vector<TrainingExample> examples;
  examples.reserve(drawings.size());
  for (const Drawing& d : drawings) {
    examples.push_back(make_training_example(d, sampling, mc.prior));
  }
  TrainConfig tc;
  tc.epochs = 60;
  tc.lr = 0.5;
  tc.grad_clip = 1.0;
  tc.seed = 99;
  train_toy(model, examples, tc);

  std::vector<NamedDrawing> named;
  for (size_t i = 0; i < drawings.size(); ++i) {
    named.push_back({"d" + std::to_string(i), drawings[i]});
  }
  PipelineConfig pc;
  pc.sampling = sampling;
  pc.write_svg = false;
  ToyRun run;
  run.pq_with_bfr = run_pipeline(model, named, pc).pq.total.pq;
  pc.skip_bfr = true;
  run.pq_skip_bfr = run_pipeline(model, named, pc).pq.total.pq;
  run.seconds = now_seconds() - t0;
  return run;
}

ToyRun g_with_prior;  // shared between criteria 8 and 10

bool toy_end_to_end(std::string& detail) {
  set_num_threads(1);
  g_with_prior = toy_training_run(PriorMode::WithLayerPrior);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "PQ %.4f with BFR, %.4f without, %.0f s single-threaded",
                g_with_prior.pq_with_bfr, g_with_prior.pq_skip_bfr,
                g_with_prior.seconds);
  detail = buf;
  return g_with_prior.pq_with_bfr >= 0.80 &&
         g_with_prior.pq_with_bfr >= g_with_prior.pq_skip_bfr &&
         g_with_prior.seconds < 600.0;
}

bool token_economy(std::string& detail) {
  SynthConfig cfg;
  cfg.seed = 31415;
  cfg.count = 100;
  SamplingConfig sampling;
  sampling.alpha_sample = 0.05;
  long long line_total = 0, point_total = 0;
  for (const Drawing& d : generate(cfg)) {
    const TokenCounts counts = count_tokens(d, sampling);
    if (counts.line_tokens > counts.point_tokens) {
      detail = "a drawing had more line tokens than point tokens";
      return false;
    }
    line_total += counts.line_tokens;
    point_total += counts.point_tokens;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "100 drawings: %lld line vs %lld point tokens (%.1f%%)",
                line_total, point_total,
                100.0 * static_cast<double>(line_total) / static_cast<double>(point_total));
  detail = buf;
  return true;
}

bool prior_mode_direction(std::string& detail) {
  set_num_threads(1);
  const ToyRun without = toy_training_run(PriorMode::WithoutPrior);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "PQ with prior %.4f vs without %.4f",
                g_with_prior.pq_with_bfr, without.pq_with_bfr);
  detail = buf;
  return g_with_prior.pq_with_bfr >= without.pq_with_bfr;
}

// ---------- criterion 11 ----------

bool determinism(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "vecspot_acceptance_det";
  fs::remove_all(base);

  auto run_once = [&](const std::string& tag) {
    SynthConfig synth_cfg;
    synth_cfg.seed = 606;
    synth_cfg.count = 8;
    synth_cfg.noise = 0.4;
    const auto drawings = generate(synth_cfg);
    ModelConfig mc;
    mc.encoder.embed_dim = 32;
    mc.encoder.depth = 2;
    mc.encoder.heads = 4;
    mc.encoder.window = 32;
    mc.encoder.seed = 7;
    mc.decoder.embed_dim = 32;
    mc.decoder.layers = 6;
    mc.decoder.heads = 4;
    mc.decoder.class_count = SynthClasses::kCount;
    mc.decoder.seed = 8;
    const SpottingModel model(mc);
    std::vector<NamedDrawing> named;
    for (size_t i = 0; i < drawings.size(); ++i) {
      named.push_back({"d" + std::to_string(i), drawings[i]});
    }
    PipelineConfig pc;
    pc.sampling.alpha_sample = 0.05;
    pc.out_dir = (base / tag).string();
    run_pipeline(model, named, pc);
    return pc.out_dir;
  };

  const std::string dir_a = run_once("a");
  const std::string dir_b = run_once("b");
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const std::string name = entry.path().filename().string();
    if (read_file(entry.path().string()) != read_file(dir_b + "/" + name)) {
      detail = name + " differs between runs";
      return false;
    }
    ++files;
  }
  fs::remove_all(base);
  detail = std::to_string(files) + " artifacts byte-identical across two runs";
  return files > 0;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "sampling constraint suite", sampling_constraint_suite},
      {2, "feature reconstruction", feature_reconstruction},
      {3, "pooling oracle", pooling_oracle},
      {4, "loss gradient check", loss_gradient_check},
      {5, "PQ oracle equivalence", pq_oracle_equivalence},
      {6, "IoU hand case", iou_hand_case},
      {7, "BFR properties", bfr_properties},
      {8, "toy end-to-end training", toy_end_to_end},
      {9, "token economy report", token_economy},
      {10, "prior-mode ablation direction", prior_mode_direction},
      {11, "pipeline determinism", determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", c.number,
                c.name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
