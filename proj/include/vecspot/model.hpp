#pragma once

#include <memory>
#include <string>

#include "vecspot/decoder.hpp"
#include "vecspot/encoder.hpp"
#include "vecspot/features.hpp"

namespace vecspot {

struct ModelConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  LossWeights loss;
  PriorMode prior = PriorMode::WithLayerPrior;
};

// End-to-end spotting model: line encoder -> line pooling -> layer feature
// enhancement -> query decoder with instance and semantic branches.
class SpottingModel {
 public:
  explicit SpottingModel(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  const LineEncoder& encoder() const { return *encoder_; }
  const QueryDecoder& decoder() const { return *decoder_; }

  // N_primitives x D features for one tokenized drawing.
  ag::Tensor primitive_features(const TokenSet& tokens) const;

  // Full-selection forward returning the prediction-file contract.
  Predictions infer(const TokenSet& tokens) const;

  // Training forward at alpha_select_train; query selection is seeded per
  // call so epochs see different subsets deterministically.
  ag::Tensor training_loss(const TokenSet& tokens,
                           const std::vector<GtInstance>& gt_instances,
                           const std::vector<int>& gt_labels, uint64_t select_seed,
                           LossBreakdown* breakdown = nullptr) const;

  nn::ParamList params() const;

  // Checkpoint pair: <prefix>.manifest.json + <prefix>.weights.bin, raw
  // little-endian real64; round-trips bit exactly.
  void save(const std::string& prefix) const;
  static SpottingModel load(const std::string& prefix);

 private:
  ModelConfig cfg_;
  std::unique_ptr<LineEncoder> encoder_;
  std::unique_ptr<QueryDecoder> decoder_;
};

}  // namespace vecspot
