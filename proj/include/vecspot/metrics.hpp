#pragma once

#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "vecspot/bfr.hpp"
#include "vecspot/geometry.hpp"

namespace vecspot {

struct Symbol {
  int label = 0;
  long long instance = 0;
  std::vector<int> primitive_ids;  // kept sorted
};

struct SymbolSet {
  std::vector<Symbol> symbols;
};

using LengthMap = std::unordered_map<int, double>;

LengthMap primitive_lengths(const Drawing& drawing);

// Symbols grouped by (gt_label, gt_instance); unlabeled primitives are skipped.
SymbolSet symbols_from_gt(const Drawing& drawing);
SymbolSet symbols_from_assignment(const PanopticAssignment& assignment,
                                  const Drawing& drawing);

// log(1+L)-weighted intersection-over-union of the two primitive sets.
// Empty (or zero-weight) union scores 0. Unknown ids throw.
double symbol_iou(const Symbol& a, const Symbol& b, const LengthMap& lengths);

struct ClassStats {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double iou_sum = 0.0;
};

struct PQTriple {
  double pq = 0.0;
  double rq = 0.0;
  double sq = 0.0;
};

PQTriple pq_from_stats(const ClassStats& s);

struct PQReport {
  PQTriple total;
  PQTriple thing;
  PQTriple stuff;
  ClassStats counts;        // all classes
  ClassStats thing_counts;
  ClassStats stuff_counts;
  std::map<int, ClassStats> per_class;
};

// Matches equal-label symbol pairs with IoU strictly above 0.5. Disjointness
// within each side is validated; matching uniqueness is asserted.
PQReport panoptic_quality(const SymbolSet& pred, const SymbolSet& gt,
                          const LengthMap& lengths, const std::set<int>& things,
                          const std::set<int>& stuffs);

// Dataset-level aggregation: TP/FP/FN and IoU totals summed per class over
// drawings, then the PQ formula applied globally.
class PQAccumulator {
 public:
  void add(const PQReport& report);
  PQReport finalize(const std::set<int>& things, const std::set<int>& stuffs) const;

 private:
  std::map<int, ClassStats> per_class_;
};

struct ClassF1 {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct F1Report {
  double f1 = 0.0;         // micro-averaged over primitives
  double wf1 = 0.0;        // weight L(e)
  double wf1_log1p = 0.0;  // weight log(1+L(e))
  std::map<int, ClassF1> per_class;
};

// Labels aligned over the same primitives; `lengths` in drawing units.
// Throws on length mismatch.
F1Report semantic_f1(const std::vector<int>& pred_labels,
                     const std::vector<int>& gt_labels,
                     const std::vector<double>& lengths);

}  // namespace vecspot
