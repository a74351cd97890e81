#pragma once

#include <unordered_map>
#include <vector>

#include "vecspot/geometry.hpp"
#include "vecspot/predictions.hpp"

namespace vecspot {

// Per-primitive refined semantic state, indexed by primitive position in the
// drawing. Label class_count+1 means background.
struct RefinedSemantic {
  std::vector<int> label;
  std::vector<double> score;
};

struct RefinedPrediction {
  RefinedSemantic semantic;
  std::vector<InstancePred> proposals;  // voted labels, pruned masks
};

// label 0 = primitive belongs to no symbol; stuff symbols use instance 0,
// thing symbols get 1-based proposal indices.
struct PanopticAssignment {
  std::vector<int> label;
  std::vector<long long> instance;
};

std::unordered_map<int, int> primitive_positions(const Drawing& drawing);

// Semantic entries from the prediction file; primitives without one are
// background with score 0.
RefinedSemantic initial_semantic(const Predictions& preds, const Drawing& drawing);

// Overriding: a primitive covered by proposals takes the label/score of its
// highest-confidence covering proposal when that beats the semantic score
// (strict). Ties break toward the lower proposal index.
RefinedSemantic override_semantic(const RefinedSemantic& semantic,
                                  const std::vector<InstancePred>& proposals,
                                  const std::unordered_map<int, int>& positions);

// Voting: most frequent refined semantic class among mask members, over
// 1..K only; ties break toward the smaller class; all-background masks keep
// the proposal label. Throws std::invalid_argument on an empty mask.
int vote_label(const InstancePred& proposal, const RefinedSemantic& semantic,
               const std::unordered_map<int, int>& positions, int class_count);

// Remasking: keeps exactly the members whose refined semantic label equals
// the voted label.
InstancePred remask(const InstancePred& proposal, const RefinedSemantic& semantic,
                    const std::unordered_map<int, int>& positions);

// Overriding -> Voting -> Remasking; empty-mask proposals are dropped.
RefinedPrediction branch_fusion_refine(const Predictions& preds, const Drawing& drawing);

// Assembly without refinement (the --skip-bfr route).
RefinedPrediction passthrough_refinement(const Predictions& preds, const Drawing& drawing);

// Thing-class proposals claim their members by score (ties toward the lower
// index); leftover primitives with stuff-class semantic labels merge into one
// symbol per stuff class; everything else stays unassigned.
PanopticAssignment assemble_panoptic(const RefinedPrediction& refined,
                                     const Drawing& drawing);

}  // namespace vecspot
