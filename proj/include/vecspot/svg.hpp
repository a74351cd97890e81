#pragma once

#include <string>
#include <vector>

#include "vecspot/bfr.hpp"
#include "vecspot/geometry.hpp"

namespace vecspot {

enum class ColoringMode { GroundTruth, SemanticPred, Panoptic };

// One path element per primitive. Stroke colors come from a fixed class
// palette; panoptic mode rotates hue by instance index. Primitives without a
// label in the requested mode render gray and add a warning.
std::string render_svg(const Drawing& drawing, ColoringMode mode,
                       const RefinedSemantic* semantic = nullptr,
                       const PanopticAssignment* panoptic = nullptr,
                       std::vector<std::string>* warnings = nullptr);

std::string class_color(int label);

}  // namespace vecspot
