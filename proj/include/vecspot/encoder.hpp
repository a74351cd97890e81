#pragma once

#include <cstdint>
#include <vector>

#include "vecspot/features.hpp"
#include "vecspot/nn.hpp"

namespace vecspot {

struct EncoderConfig {
  int embed_dim = 64;  // must divide by heads
  int depth = 4;
  int heads = 4;
  int window = 64;  // tokens per attention window along the serialized order
  uint64_t seed = 1;
};

// Morton (z-order) code of a token coord quantized to 1024 bins per axis
// over [-0.5, 0.5].
uint32_t morton_code(const std::array<double, 3>& coord);

// Serialization order: tokens sorted by Morton code with full-content
// tie-breaking, making the order canonical under input permutation.
std::vector<int> serialize_order(const std::vector<LineToken>& tokens);

// Elementwise max + mean over each primitive's rows.
ag::Tensor line_pooling(ag::Tensor line_embeddings,
                        const std::vector<std::pair<int, int>>& ranges);

// Windowed-attention encoder over serialized line tokens. Deterministic for
// a fixed seed; output row i corresponds to input token i.
class LineEncoder {
 public:
  explicit LineEncoder(const EncoderConfig& cfg);

  ag::Tensor encode_lines(const std::vector<LineToken>& tokens) const;

  // Per-layer context (avg + max + attention pooling, fused through a
  // zero-initialized projection) added back to each primitive embedding.
  ag::Tensor layer_feature_enhancement(ag::Tensor primitive_embeddings,
                                       const std::vector<int>& layer_ids) const;

  const EncoderConfig& config() const { return cfg_; }
  nn::ParamList params() const;

 private:
  struct Block {
    nn::LayerNorm ln_attn;
    nn::Attention attn;
    nn::LayerNorm ln_ffn;
    nn::Ffn ffn;
  };

  EncoderConfig cfg_;
  nn::Linear input_proj_;  // 7 -> D
  std::vector<Block> blocks_;
  nn::LayerNorm final_ln_;
  ag::Tensor lfe_score_;   // D x 1 attention-pool score vector
  nn::Linear lfe_fuse_;    // 3D -> D, zero-initialized (identity at init)
};

}  // namespace vecspot
