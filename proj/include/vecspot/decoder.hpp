#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vecspot/nn.hpp"
#include "vecspot/predictions.hpp"

namespace vecspot {

struct DecoderConfig {
  int embed_dim = 64;  // must match the encoder
  int layers = 6;
  int heads = 4;
  double alpha_select_train = 0.5;
  double alpha_select_infer = 1.0;
  int class_count = 0;  // K; logits carry K+1 with the background last
  double mask_threshold = 0.5;
  uint64_t seed = 2;
};

struct LossWeights {
  double cls = 2.5;
  double bce = 5.0;
  double dice = 5.0;
  double sem = 5.0;
};

// Ground-truth instance over a drawing's primitives (positional mask).
struct GtInstance {
  int label = 0;                // 1..K
  std::vector<char> mask;       // length N
};

struct LossBreakdown {
  double total = 0.0;
  double cls = 0.0;
  double bce = 0.0;
  double dice = 0.0;
  double sem = 0.0;
};

struct DecodeOutput {
  ag::Tensor class_logits;  // M x (K+1)
  ag::Tensor mask_logits;   // M x N
  ag::Tensor sem_logits;    // M x (K+1)
  std::vector<int> selected;
};

// M = max(1, round(alpha * n)) indices without replacement, ascending;
// alpha >= 1 selects everything in order.
std::vector<int> query_select(int n, double alpha, uint64_t seed);

// Min-cost assignment. Returns, per row, the assigned column or -1; matches
// min(rows, cols) pairs.
std::vector<int> hungarian_min_cost(const Mat& cost);

class QueryDecoder {
 public:
  explicit QueryDecoder(const DecoderConfig& cfg);

  // Queries initialized from the selected primitive features, refined by
  // `layers` rounds of self-attention, cross-attention, and feed-forward.
  ag::Tensor decode(ag::Tensor primitive_feats, const std::vector<int>& selected,
                    const Mat* cross_mask = nullptr) const;

  DecodeOutput run(ag::Tensor primitive_feats, const std::vector<int>& selected) const;

  // Proposals from the instance branch values; background proposals dropped,
  // membership = sigmoid(logit) > mask_threshold (strict).
  std::vector<InstancePred> instance_proposals(
      const DecodeOutput& out, const std::vector<int>& primitive_ids) const;

  // Per-selected-primitive semantic label and confidence. Entries follow the
  // `selected` order; unselected primitives carry no prediction.
  std::vector<SemanticPred> semantic_predictions(
      const DecodeOutput& out, const std::vector<int>& primitive_ids) const;

  const DecoderConfig& config() const { return cfg_; }
  nn::ParamList params() const;

 private:
  struct Layer {
    nn::LayerNorm ln_self;
    nn::Attention self_attn;
    nn::LayerNorm ln_cross;
    nn::Attention cross_attn;
    nn::LayerNorm ln_ffn;
    nn::Ffn ffn;
  };

  DecoderConfig cfg_;
  std::vector<Layer> layers_;
  nn::LayerNorm final_ln_;
  nn::Linear class_head_;  // D -> K+1
  nn::Linear sem_head_;    // D -> K+1
};

// Composite spotting loss with one-to-one Hungarian matching between
// proposals and ground-truth instances. `gt_labels` has one 1..K entry per
// primitive; semantic supervision covers only the selected primitives.
ag::Tensor spotting_loss(const DecodeOutput& out,
                         const std::vector<GtInstance>& gt_instances,
                         const std::vector<int>& gt_labels,
                         const LossWeights& weights, LossBreakdown* breakdown);

}  // namespace vecspot
