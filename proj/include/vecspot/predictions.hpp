#pragma once

#include <vector>

namespace vecspot {

// The prediction-file contract shared by the decoder output, refinement
// input, and external models. Labels are 1-based class indices.
struct SemanticPred {
  int primitive_id = 0;
  int label = 0;
  double score = 0.0;
};

struct InstancePred {
  int label = 0;
  double score = 0.0;
  std::vector<int> primitive_ids;
};

struct Predictions {
  std::vector<SemanticPred> semantic;
  std::vector<InstancePred> instances;
};

}  // namespace vecspot
