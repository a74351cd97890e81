#include "vecspot/bfr.hpp"

#include <algorithm>
#include <stdexcept>

namespace vecspot {

std::unordered_map<int, int> primitive_positions(const Drawing& drawing) {
  std::unordered_map<int, int> pos;
  pos.reserve(drawing.primitives.size());
  for (size_t i = 0; i < drawing.primitives.size(); ++i) {
    pos.emplace(drawing.primitives[i].id, static_cast<int>(i));
  }
  return pos;
}

RefinedSemantic initial_semantic(const Predictions& preds, const Drawing& drawing) {
  const auto positions = primitive_positions(drawing);
  RefinedSemantic sem;
  sem.label.assign(drawing.primitives.size(), drawing.class_count + 1);
  sem.score.assign(drawing.primitives.size(), 0.0);
  for (const SemanticPred& p : preds.semantic) {
    const auto it = positions.find(p.primitive_id);
    if (it == positions.end()) {
      throw std::invalid_argument("semantic prediction references unknown primitive id " +
                                  std::to_string(p.primitive_id));
    }
    sem.label[it->second] = p.label;
    sem.score[it->second] = p.score;
  }
  return sem;
}

RefinedSemantic override_semantic(const RefinedSemantic& semantic,
                                  const std::vector<InstancePred>& proposals,
                                  const std::unordered_map<int, int>& positions) {
  RefinedSemantic refined = semantic;
  const int n = static_cast<int>(semantic.label.size());
  std::vector<int> best(n, -1);  // covering proposal with the highest score
  for (size_t j = 0; j < proposals.size(); ++j) {
    for (int id : proposals[j].primitive_ids) {
      const auto it = positions.find(id);
      if (it == positions.end()) {
        throw std::invalid_argument("proposal references unknown primitive id " +
                                    std::to_string(id));
      }
      const int p = it->second;
      if (best[p] < 0 || proposals[j].score > proposals[best[p]].score) {
        best[p] = static_cast<int>(j);
      }
    }
  }
  for (int p = 0; p < n; ++p) {
    if (best[p] >= 0 && proposals[best[p]].score > semantic.score[p]) {
      refined.label[p] = proposals[best[p]].label;
      refined.score[p] = proposals[best[p]].score;
    }
  }
  return refined;
}

int vote_label(const InstancePred& proposal, const RefinedSemantic& semantic,
               const std::unordered_map<int, int>& positions, int class_count) {
  if (proposal.primitive_ids.empty()) {
    throw std::invalid_argument("vote_label: empty proposal mask");
  }
  std::vector<int> counts(class_count + 1, 0);  // 1-based, background excluded
  for (int id : proposal.primitive_ids) {
    const int label = semantic.label.at(positions.at(id));
    if (label >= 1 && label <= class_count) counts[label]++;
  }
  int winner = 0;
  for (int k = 1; k <= class_count; ++k) {
    if (counts[k] > 0 && (winner == 0 || counts[k] > counts[winner])) winner = k;
  }
  return winner == 0 ? proposal.label : winner;
}

InstancePred remask(const InstancePred& proposal, const RefinedSemantic& semantic,
                    const std::unordered_map<int, int>& positions) {
  InstancePred pruned = proposal;
  pruned.primitive_ids.clear();
  for (int id : proposal.primitive_ids) {
    if (semantic.label.at(positions.at(id)) == proposal.label) {
      pruned.primitive_ids.push_back(id);
    }
  }
  return pruned;
}

RefinedPrediction branch_fusion_refine(const Predictions& preds,
                                       const Drawing& drawing) {
  const auto positions = primitive_positions(drawing);
  RefinedPrediction out;
  out.semantic = override_semantic(initial_semantic(preds, drawing),
                                   preds.instances, positions);
  for (const InstancePred& proposal : preds.instances) {
    if (proposal.primitive_ids.empty()) continue;
    InstancePred voted = proposal;
    voted.label = vote_label(proposal, out.semantic, positions, drawing.class_count);
    InstancePred pruned = remask(voted, out.semantic, positions);
    if (!pruned.primitive_ids.empty()) out.proposals.push_back(std::move(pruned));
  }
  return out;
}

RefinedPrediction passthrough_refinement(const Predictions& preds,
                                         const Drawing& drawing) {
  RefinedPrediction out;
  out.semantic = initial_semantic(preds, drawing);
  for (const InstancePred& proposal : preds.instances) {
    if (!proposal.primitive_ids.empty()) out.proposals.push_back(proposal);
  }
  return out;
}

PanopticAssignment assemble_panoptic(const RefinedPrediction& refined,
                                     const Drawing& drawing) {
  const auto positions = primitive_positions(drawing);
  const int n = static_cast<int>(drawing.primitives.size());
  PanopticAssignment out;
  out.label.assign(n, 0);
  out.instance.assign(n, 0);

  std::vector<int> claimant(n, -1);
  for (size_t j = 0; j < refined.proposals.size(); ++j) {
    const InstancePred& prop = refined.proposals[j];
    if (!drawing.thing_classes.count(prop.label)) continue;
    for (int id : prop.primitive_ids) {
      const int p = positions.at(id);
      if (claimant[p] < 0 || prop.score > refined.proposals[claimant[p]].score) {
        claimant[p] = static_cast<int>(j);
      }
    }
  }
  for (int p = 0; p < n; ++p) {
    if (claimant[p] >= 0) {
      out.label[p] = refined.proposals[claimant[p]].label;
      out.instance[p] = claimant[p] + 1;
    } else {
      const int sem = refined.semantic.label[p];
      if (drawing.stuff_classes.count(sem)) {
        out.label[p] = sem;
        out.instance[p] = 0;
      }
    }
  }
  return out;
}

}  // namespace vecspot
