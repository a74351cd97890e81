#include "vecspot/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "vecspot/rng.hpp"

namespace vecspot {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> softmax_row(const Mat& m, int r) {
  std::vector<double> p(m.cols);
  double mx = m(r, 0);
  for (int c = 1; c < m.cols; ++c) mx = std::max(mx, m(r, c));
  double s = 0.0;
  for (int c = 0; c < m.cols; ++c) {
    p[c] = std::exp(m(r, c) - mx);
    s += p[c];
  }
  for (double& x : p) x /= s;
  return p;
}

// Hungarian with potentials; requires rows <= cols. Returns the column
// assigned to each row.
std::vector<int> hungarian_rows_le_cols(const Mat& cost) {
  const int n = cost.rows, m = cost.cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> query_select(int n, double alpha, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("query_select: need at least one primitive");
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (alpha >= 1.0) return all;
  const int m = std::max(1, static_cast<int>(std::lround(alpha * n)));
  Rng rng(seed);
  // Partial Fisher-Yates, then ascending for stable routing.
  for (int i = 0; i < m; ++i) {
    const int j = rng.uniform_int(i, n - 1);
    std::swap(all[i], all[j]);
  }
  all.resize(m);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<int> hungarian_min_cost(const Mat& cost) {
  if (cost.rows == 0 || cost.cols == 0) return std::vector<int>(cost.rows, -1);
  if (cost.rows <= cost.cols) return hungarian_rows_le_cols(cost);
  const std::vector<int> col_to_row = hungarian_rows_le_cols(transpose(cost));
  std::vector<int> row_to_col(cost.rows, -1);
  for (int c = 0; c < cost.cols; ++c) {
    if (col_to_row[c] >= 0) row_to_col[col_to_row[c]] = c;
  }
  return row_to_col;
}

QueryDecoder::QueryDecoder(const DecoderConfig& cfg) : cfg_(cfg) {
  if (cfg.class_count < 1) throw std::invalid_argument("QueryDecoder: class_count < 1");
  if (cfg.embed_dim % cfg.heads != 0) {
    throw std::invalid_argument("QueryDecoder: embed_dim must divide by heads");
  }
  Rng rng(cfg.seed);
  const int d = cfg.embed_dim;
  const double range = 1.0 / std::sqrt(static_cast<double>(d));
  layers_.reserve(cfg.layers);
  for (int i = 0; i < cfg.layers; ++i) {
    Layer l;
    l.ln_self = nn::make_layer_norm(d);
    l.self_attn = {nn::make_linear(d, d, rng, range), nn::make_linear(d, d, rng, range),
                   nn::make_linear(d, d, rng, range), nn::make_linear(d, d, rng, range)};
    l.ln_cross = nn::make_layer_norm(d);
    l.cross_attn = {nn::make_linear(d, d, rng, range), nn::make_linear(d, d, rng, range),
                    nn::make_linear(d, d, rng, range), nn::make_linear(d, d, rng, range)};
    l.ln_ffn = nn::make_layer_norm(d);
    l.ffn = {nn::make_linear(d, 4 * d, rng, range), nn::make_linear(4 * d, d, rng, range)};
    layers_.push_back(std::move(l));
  }
  final_ln_ = nn::make_layer_norm(d);
  class_head_ = nn::make_linear(d, cfg.class_count + 1, rng, range);
  sem_head_ = nn::make_linear(d, cfg.class_count + 1, rng, range);
}

ag::Tensor QueryDecoder::decode(ag::Tensor primitive_feats,
                                const std::vector<int>& selected,
                                const Mat* cross_mask) const {
  ag::Tensor x = ag::gather_rows(primitive_feats, selected);
  for (const Layer& l : layers_) {
    ag::Tensor h = nn::apply(l.ln_self, x);
    x = ag::add(x, nn::multi_head_attention(h, h, l.self_attn, cfg_.heads));
    h = nn::apply(l.ln_cross, x);
    x = ag::add(x, nn::multi_head_attention(h, primitive_feats, l.cross_attn,
                                            cfg_.heads, cross_mask));
    x = ag::add(x, nn::apply(l.ffn, nn::apply(l.ln_ffn, x)));
  }
  return x;
}

DecodeOutput QueryDecoder::run(ag::Tensor primitive_feats,
                               const std::vector<int>& selected) const {
  DecodeOutput out;
  out.selected = selected;
  ag::Tensor q = nn::apply(final_ln_, decode(primitive_feats, selected));
  out.class_logits = nn::apply(class_head_, q);
  out.mask_logits = ag::matmul_nt(q, primitive_feats);
  out.sem_logits = nn::apply(sem_head_, q);
  return out;
}

std::vector<InstancePred> QueryDecoder::instance_proposals(
    const DecodeOutput& out, const std::vector<int>& primitive_ids) const {
  const Mat& cls = out.class_logits.val();
  const Mat& mask = out.mask_logits.val();
  const int background = cfg_.class_count;  // 0-based last column
  std::vector<InstancePred> proposals;
  for (int i = 0; i < cls.rows; ++i) {
    const std::vector<double> p = softmax_row(cls, i);
    const int label0 =
        static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    if (label0 == background) continue;
    InstancePred prop;
    prop.label = label0 + 1;
    prop.score = p[label0];
    for (int j = 0; j < mask.cols; ++j) {
      if (stable_sigmoid(mask(i, j)) > cfg_.mask_threshold) {
        prop.primitive_ids.push_back(primitive_ids[j]);
      }
    }
    proposals.push_back(std::move(prop));
  }
  return proposals;
}

std::vector<SemanticPred> QueryDecoder::semantic_predictions(
    const DecodeOutput& out, const std::vector<int>& primitive_ids) const {
  const Mat& sem = out.sem_logits.val();
  std::vector<SemanticPred> preds;
  preds.reserve(out.selected.size());
  for (int i = 0; i < sem.rows; ++i) {
    const std::vector<double> p = softmax_row(sem, i);
    const int label0 =
        static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    preds.push_back(
        {primitive_ids[out.selected[i]], label0 + 1, p[label0]});
  }
  return preds;
}

nn::ParamList QueryDecoder::params() const {
  nn::ParamList out;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const std::string p = "decoder.layer" + std::to_string(i);
    nn::collect(p + ".ln_self", layers_[i].ln_self, out);
    nn::collect(p + ".self_attn", layers_[i].self_attn, out);
    nn::collect(p + ".ln_cross", layers_[i].ln_cross, out);
    nn::collect(p + ".cross_attn", layers_[i].cross_attn, out);
    nn::collect(p + ".ln_ffn", layers_[i].ln_ffn, out);
    nn::collect(p + ".ffn", layers_[i].ffn, out);
  }
  nn::collect("decoder.final_ln", final_ln_, out);
  nn::collect("decoder.class_head", class_head_, out);
  nn::collect("decoder.sem_head", sem_head_, out);
  return out;
}

ag::Tensor spotting_loss(const DecodeOutput& out,
                         const std::vector<GtInstance>& gt_instances,
                         const std::vector<int>& gt_labels,
                         const LossWeights& weights, LossBreakdown* breakdown) {
  const Mat& cls = out.class_logits.val();
  const Mat& mask = out.mask_logits.val();
  const int m = cls.rows;
  const int n = mask.cols;
  const int background = cls.cols - 1;
  const int g = static_cast<int>(gt_instances.size());
  for (const GtInstance& gi : gt_instances) {
    if (static_cast<int>(gi.mask.size()) != n) {
      throw std::invalid_argument("spotting_loss: gt mask length != primitive count");
    }
    if (gi.label < 1 || gi.label > background) {
      throw std::invalid_argument("spotting_loss: gt label out of range");
    }
  }

  // Assignment cost from forward values only; gradients do not flow through
  // the matching itself.
  std::vector<int> row_to_gt(m, -1);
  if (g > 0) {
    Mat cost(m, g);
    for (int i = 0; i < m; ++i) {
      const std::vector<double> p = softmax_row(cls, i);
      for (int k = 0; k < g; ++k) {
        double bce = 0.0, inter = 0.0, psum = 0.0, gsum = 0.0;
        for (int j = 0; j < n; ++j) {
          const double x = mask(i, j);
          const double t = gt_instances[k].mask[j] ? 1.0 : 0.0;
          bce += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
          const double pr = stable_sigmoid(x);
          inter += pr * t;
          psum += pr;
          gsum += t;
        }
        bce /= n;
        const double dice = 1.0 - 2.0 * inter / (psum + gsum);
        const double p_cls =
            std::max(p[gt_instances[k].label - 1], 1e-12);
        cost(i, k) = weights.cls * -std::log(p_cls) + weights.bce * bce +
                     weights.dice * dice;
      }
    }
    row_to_gt = hungarian_min_cost(cost);
  }

  std::vector<int> cls_targets(m, background);
  std::vector<int> matched_rows;
  std::vector<int> matched_gts;
  for (int i = 0; i < m; ++i) {
    if (row_to_gt[i] >= 0) {
      cls_targets[i] = gt_instances[row_to_gt[i]].label - 1;
      matched_rows.push_back(i);
      matched_gts.push_back(row_to_gt[i]);
    }
  }

  ag::Tensor l_cls = ag::cross_entropy_mean(out.class_logits, cls_targets);

  ag::Tensor l_bce = ag::scalar(0.0);
  ag::Tensor l_dice = ag::scalar(0.0);
  if (!matched_rows.empty()) {
    Mat gt_masks(static_cast<int>(matched_rows.size()), n);
    for (size_t r = 0; r < matched_gts.size(); ++r) {
      for (int j = 0; j < n; ++j) {
        gt_masks(static_cast<int>(r), j) = gt_instances[matched_gts[r]].mask[j] ? 1.0 : 0.0;
      }
    }
    ag::Tensor matched_logits = ag::gather_rows(out.mask_logits, matched_rows);
    l_bce = ag::bce_with_logits_mean(matched_logits, gt_masks);
    l_dice = ag::dice_loss_mean(matched_logits, gt_masks);
  }

  std::vector<int> sem_targets(out.selected.size());
  for (size_t i = 0; i < out.selected.size(); ++i) {
    const int label = gt_labels[out.selected[i]];
    if (label < 1 || label > background) {
      throw std::invalid_argument("spotting_loss: semantic gt label out of range");
    }
    sem_targets[i] = label - 1;
  }
  ag::Tensor l_sem = ag::cross_entropy_mean(out.sem_logits, sem_targets);

  ag::Tensor total = ag::add(
      ag::add(ag::scale(l_cls, weights.cls), ag::scale(l_bce, weights.bce)),
      ag::add(ag::scale(l_dice, weights.dice), ag::scale(l_sem, weights.sem)));

  if (breakdown) {
    breakdown->cls = l_cls.val()(0, 0);
    breakdown->bce = l_bce.val()(0, 0);
    breakdown->dice = l_dice.val()(0, 0);
    breakdown->sem = l_sem.val()(0, 0);
    breakdown->total = total.val()(0, 0);
  }
  return total;
}

}  // namespace vecspot
