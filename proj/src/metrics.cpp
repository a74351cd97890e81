#include "vecspot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vecspot {

namespace {

double weight_of(int id, const LengthMap& lengths) {
  const auto it = lengths.find(id);
  if (it == lengths.end()) {
    throw std::invalid_argument("symbol_iou: unknown primitive id " + std::to_string(id));
  }
  return std::log1p(it->second);
}

void validate_disjoint(const SymbolSet& set, const char* side) {
  std::set<int> seen;
  for (const Symbol& s : set.symbols) {
    for (int id : s.primitive_ids) {
      if (!seen.insert(id).second) {
        throw std::invalid_argument(std::string("panoptic_quality: primitive ") +
                                    std::to_string(id) + " appears in two " + side +
                                    " symbols");
      }
    }
  }
}

Symbol sorted_copy(const Symbol& s) {
  Symbol c = s;
  std::sort(c.primitive_ids.begin(), c.primitive_ids.end());
  return c;
}

}  // namespace

LengthMap primitive_lengths(const Drawing& drawing) {
  LengthMap lengths;
  lengths.reserve(drawing.primitives.size());
  for (const Primitive& p : drawing.primitives) {
    lengths.emplace(p.id, primitive_length(p));
  }
  return lengths;
}

SymbolSet symbols_from_gt(const Drawing& drawing) {
  std::map<std::pair<int, long long>, std::vector<int>> grouped;
  for (const Primitive& p : drawing.primitives) {
    if (!p.gt_label || !p.gt_instance) continue;
    grouped[{*p.gt_label, *p.gt_instance}].push_back(p.id);
  }
  SymbolSet set;
  for (auto& [key, ids] : grouped) {
    std::sort(ids.begin(), ids.end());
    set.symbols.push_back({key.first, key.second, std::move(ids)});
  }
  return set;
}

SymbolSet symbols_from_assignment(const PanopticAssignment& assignment,
                                  const Drawing& drawing) {
  std::map<std::pair<int, long long>, std::vector<int>> grouped;
  for (size_t i = 0; i < drawing.primitives.size(); ++i) {
    if (assignment.label[i] == 0) continue;
    grouped[{assignment.label[i], assignment.instance[i]}].push_back(
        drawing.primitives[i].id);
  }
  SymbolSet set;
  for (auto& [key, ids] : grouped) {
    std::sort(ids.begin(), ids.end());
    set.symbols.push_back({key.first, key.second, std::move(ids)});
  }
  return set;
}

double symbol_iou(const Symbol& a, const Symbol& b, const LengthMap& lengths) {
  const Symbol sa = sorted_copy(a);
  const Symbol sb = sorted_copy(b);
  double inter = 0.0, uni = 0.0;
  size_t i = 0, j = 0;
  while (i < sa.primitive_ids.size() || j < sb.primitive_ids.size()) {
    if (j >= sb.primitive_ids.size() ||
        (i < sa.primitive_ids.size() && sa.primitive_ids[i] < sb.primitive_ids[j])) {
      uni += weight_of(sa.primitive_ids[i], lengths);
      ++i;
    } else if (i >= sa.primitive_ids.size() ||
               sb.primitive_ids[j] < sa.primitive_ids[i]) {
      uni += weight_of(sb.primitive_ids[j], lengths);
      ++j;
    } else {
      const double w = weight_of(sa.primitive_ids[i], lengths);
      inter += w;
      uni += w;
      ++i;
      ++j;
    }
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

PQTriple pq_from_stats(const ClassStats& s) {
  PQTriple t;
  const double denom = static_cast<double>(s.tp) + 0.5 * s.fp + 0.5 * s.fn;
  if (denom > 0.0) {
    t.pq = s.iou_sum / denom;
    t.rq = static_cast<double>(s.tp) / denom;
  }
  if (s.tp > 0) t.sq = s.iou_sum / static_cast<double>(s.tp);
  return t;
}

namespace {

ClassStats sum_classes(const std::map<int, ClassStats>& per_class,
                       const std::set<int>* restrict_to) {
  ClassStats out;
  for (const auto& [label, s] : per_class) {
    if (restrict_to && !restrict_to->count(label)) continue;
    out.tp += s.tp;
    out.fp += s.fp;
    out.fn += s.fn;
    out.iou_sum += s.iou_sum;
  }
  return out;
}

PQReport report_from_classes(const std::map<int, ClassStats>& per_class,
                             const std::set<int>& things, const std::set<int>& stuffs) {
  PQReport report;
  report.per_class = per_class;
  report.counts = sum_classes(per_class, nullptr);
  report.thing_counts = sum_classes(per_class, &things);
  report.stuff_counts = sum_classes(per_class, &stuffs);
  report.total = pq_from_stats(report.counts);
  report.thing = pq_from_stats(report.thing_counts);
  report.stuff = pq_from_stats(report.stuff_counts);
  return report;
}

}  // namespace

PQReport panoptic_quality(const SymbolSet& pred, const SymbolSet& gt,
                          const LengthMap& lengths, const std::set<int>& things,
                          const std::set<int>& stuffs) {
  validate_disjoint(pred, "predicted");
  validate_disjoint(gt, "ground-truth");

  std::map<int, ClassStats> per_class;
  std::vector<int> pred_match(pred.symbols.size(), -1);
  std::vector<int> gt_match(gt.symbols.size(), -1);

  for (size_t p = 0; p < pred.symbols.size(); ++p) {
    for (size_t g = 0; g < gt.symbols.size(); ++g) {
      if (pred.symbols[p].label != gt.symbols[g].label) continue;
      const double iou = symbol_iou(pred.symbols[p], gt.symbols[g], lengths);
      if (iou > 0.5) {
        // Disjointness makes >0.5 matches unique; a second hit on either
        // side means the inputs broke the panoptic contract.
        if (pred_match[p] >= 0 || gt_match[g] >= 0) {
          throw std::logic_error("panoptic_quality: non-unique IoU>0.5 matching");
        }
        pred_match[p] = static_cast<int>(g);
        gt_match[g] = static_cast<int>(p);
        ClassStats& s = per_class[pred.symbols[p].label];
        s.tp += 1;
        s.iou_sum += iou;
      }
    }
  }
  for (size_t p = 0; p < pred.symbols.size(); ++p) {
    if (pred_match[p] < 0) per_class[pred.symbols[p].label].fp += 1;
  }
  for (size_t g = 0; g < gt.symbols.size(); ++g) {
    if (gt_match[g] < 0) per_class[gt.symbols[g].label].fn += 1;
  }
  return report_from_classes(per_class, things, stuffs);
}

void PQAccumulator::add(const PQReport& report) {
  for (const auto& [label, s] : report.per_class) {
    ClassStats& acc = per_class_[label];
    acc.tp += s.tp;
    acc.fp += s.fp;
    acc.fn += s.fn;
    acc.iou_sum += s.iou_sum;
  }
}

PQReport PQAccumulator::finalize(const std::set<int>& things,
                                 const std::set<int>& stuffs) const {
  return report_from_classes(per_class_, things, stuffs);
}

F1Report semantic_f1(const std::vector<int>& pred_labels,
                     const std::vector<int>& gt_labels,
                     const std::vector<double>& lengths) {
  if (pred_labels.size() != gt_labels.size() || pred_labels.size() != lengths.size()) {
    throw std::invalid_argument("semantic_f1: array lengths differ");
  }
  // Micro counts under three weightings: unit, L, log(1+L).
  double tp[3] = {0, 0, 0}, fp[3] = {0, 0, 0}, fn[3] = {0, 0, 0};
  std::map<int, ClassF1> per_class;
  for (size_t i = 0; i < pred_labels.size(); ++i) {
    const double w[3] = {1.0, lengths[i], std::log1p(lengths[i])};
    if (pred_labels[i] == gt_labels[i]) {
      for (int k = 0; k < 3; ++k) tp[k] += w[k];
      per_class[gt_labels[i]].tp += 1;
    } else {
      for (int k = 0; k < 3; ++k) {
        fp[k] += w[k];
        fn[k] += w[k];
      }
      per_class[pred_labels[i]].fp += 1;
      per_class[gt_labels[i]].fn += 1;
    }
  }
  auto micro_f1 = [](double tp_, double fp_, double fn_) {
    const double denom = 2.0 * tp_ + fp_ + fn_;
    return denom > 0.0 ? 2.0 * tp_ / denom : 0.0;
  };
  F1Report report;
  report.f1 = micro_f1(tp[0], fp[0], fn[0]);
  report.wf1 = micro_f1(tp[1], fp[1], fn[1]);
  report.wf1_log1p = micro_f1(tp[2], fp[2], fn[2]);
  for (auto& [label, c] : per_class) {
    c.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    c.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    c.f1 = c.precision + c.recall > 0.0
               ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
               : 0.0;
  }
  report.per_class = std::move(per_class);
  return report;
}

}  // namespace vecspot
