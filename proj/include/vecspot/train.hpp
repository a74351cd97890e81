#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vecspot/model.hpp"
#include "vecspot/sampler.hpp"

namespace vecspot {

struct TrainingExample {
  TokenSet tokens;
  std::vector<GtInstance> instances;
  std::vector<int> gt_labels;  // per primitive, 1..K
};

// Tokenizes and featurizes one labeled drawing. Throws if any primitive
// lacks ground truth.
TrainingExample make_training_example(const Drawing& drawing,
                                      const SamplingConfig& sampling, PriorMode mode);

struct TrainConfig {
  int epochs = 120;
  double lr = 0.5;
  double grad_clip = 1.0;  // global-norm clip; <= 0 disables
  uint64_t seed = 17;
  bool verbose = false;
};

struct EpochStats {
  double mean_total = 0.0;
  double mean_cls = 0.0;
  double mean_bce = 0.0;
  double mean_dice = 0.0;
  double mean_sem = 0.0;
};

// Plain gradient descent with a fixed step over per-drawing losses; the
// drawing order reshuffles deterministically each epoch.
std::vector<EpochStats> train_toy(SpottingModel& model,
                                  const std::vector<TrainingExample>& examples,
                                  const TrainConfig& cfg);

}  // namespace vecspot
