#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vecspot/metrics.hpp"
#include "vecspot/rng.hpp"

using namespace vecspot;

namespace {

// Exhaustive oracle: scans every label-consistent pair, applies the IoU
// definition directly on id sets, asserts matching uniqueness, and applies
// the PQ formula. Kept independent of the implementation's matching walk.
struct OracleResult {
  double pq = 0.0;
  long long tp = 0, fp = 0, fn = 0;
  bool unique = true;
};

double oracle_iou(const Symbol& a, const Symbol& b, const LengthMap& lengths) {
  std::set<int> sa(a.primitive_ids.begin(), a.primitive_ids.end());
  std::set<int> sb(b.primitive_ids.begin(), b.primitive_ids.end());
  double inter = 0.0, uni = 0.0;
  std::set<int> all = sa;
  all.insert(sb.begin(), sb.end());
  for (int id : all) {  // ascending-id accumulation, log1p weights
    const double w = std::log1p(lengths.at(id));
    uni += w;
    if (sa.count(id) && sb.count(id)) inter += w;
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

OracleResult oracle_pq(const SymbolSet& pred, const SymbolSet& gt,
                       const LengthMap& lengths) {
  OracleResult r;
  std::vector<int> pred_hits(pred.symbols.size(), 0);
  std::vector<int> gt_hits(gt.symbols.size(), 0);
  std::set<int> labels;
  for (const Symbol& s : pred.symbols) labels.insert(s.label);
  for (const Symbol& s : gt.symbols) labels.insert(s.label);
  // Canonical accumulation: per class ascending, predictions in order, so a
  // correct implementation can agree to the last bit.
  double iou_sum = 0.0;
  for (int label : labels) {
    double class_sum = 0.0;
    for (size_t p = 0; p < pred.symbols.size(); ++p) {
      if (pred.symbols[p].label != label) continue;
      for (size_t g = 0; g < gt.symbols.size(); ++g) {
        if (gt.symbols[g].label != label) continue;
        const double iou = oracle_iou(pred.symbols[p], gt.symbols[g], lengths);
        if (iou > 0.5) {
          pred_hits[p]++;
          gt_hits[g]++;
          class_sum += iou;
          r.tp++;
        }
      }
    }
    iou_sum += class_sum;
  }
  for (int h : pred_hits) {
    if (h > 1) r.unique = false;
  }
  for (int h : gt_hits) {
    if (h > 1) r.unique = false;
  }
  r.fp = static_cast<long long>(pred.symbols.size()) - r.tp;
  r.fn = static_cast<long long>(gt.symbols.size()) - r.tp;
  const double denom = static_cast<double>(r.tp) + 0.5 * r.fp + 0.5 * r.fn;
  r.pq = denom > 0.0 ? iou_sum / denom : 0.0;
  return r;
}

// Random small scene over shared primitives, symbols disjoint per side.
struct Scene {
  SymbolSet pred, gt;
  LengthMap lengths;
};

Scene random_scene(Rng& rng) {
  Scene s;
  const int n = rng.uniform_int(2, 8);
  for (int i = 1; i <= n; ++i) s.lengths[i] = rng.uniform(0.0, 50.0);
  auto make_side = [&](SymbolSet& side) {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i + 1;
    for (size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[rng.uniform_int(0, static_cast<int>(i) - 1)]);
    }
    const int symbols = rng.uniform_int(1, 3);
    size_t cursor = 0;
    for (int k = 0; k < symbols && cursor < ids.size(); ++k) {
      Symbol sym;
      sym.label = rng.uniform_int(1, 2);
      sym.instance = k + 1;
      const size_t take = static_cast<size_t>(rng.uniform_int(1, 3));
      for (size_t t = 0; t < take && cursor < ids.size(); ++t) {
        sym.primitive_ids.push_back(ids[cursor++]);
      }
      side.symbols.push_back(std::move(sym));
    }
  };
  make_side(s.pred);
  make_side(s.gt);
  return s;
}

}  // namespace

TEST_CASE("symbol_iou identities") {
  LengthMap lengths = {{1, 2.0}, {2, 3.0}, {3, 4.0}};
  Symbol a{1, 1, {1, 2}};
  Symbol b{1, 2, {1, 2}};
  CHECK(symbol_iou(a, b, lengths) == doctest::Approx(1.0));
  Symbol c{1, 3, {3}};
  CHECK(symbol_iou(a, c, lengths) == 0.0);
  CHECK(symbol_iou(a, b, lengths) == symbol_iou(b, a, lengths));
}

TEST_CASE("symbol_iou weighted hand case: weights {1,2,1} -> 0.5") {
  const double e = std::exp(1.0);
  LengthMap lengths = {{1, e - 1.0}, {2, e * e - 1.0}, {3, e - 1.0}};
  Symbol a{1, 1, {1, 2}};
  Symbol b{1, 2, {2, 3}};
  CHECK(symbol_iou(a, b, lengths) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("symbol_iou log base does not matter") {
  // The ratio of log sums is base-invariant; compare against a log2 oracle.
  Rng rng(5);
  LengthMap lengths;
  for (int i = 1; i <= 6; ++i) lengths[i] = rng.uniform(0.1, 30.0);
  Symbol a{1, 1, {1, 2, 3, 4}};
  Symbol b{1, 2, {3, 4, 5, 6}};
  double inter = 0.0, uni = 0.0;
  for (int id : {3, 4}) inter += std::log2(1.0 + lengths[id]);
  for (int id : {1, 2, 3, 4, 5, 6}) uni += std::log2(1.0 + lengths[id]);
  CHECK(symbol_iou(a, b, lengths) == doctest::Approx(inter / uni).epsilon(1e-12));
}

TEST_CASE("symbol_iou rejects unknown ids and zero-weight unions score zero") {
  LengthMap lengths = {{1, 1.0}};
  Symbol a{1, 1, {1, 7}};
  Symbol b{1, 2, {1}};
  CHECK_THROWS_AS(symbol_iou(a, b, lengths), std::invalid_argument);

  LengthMap zero = {{1, 0.0}, {2, 0.0}};
  Symbol za{1, 1, {1}};
  Symbol zb{1, 2, {2}};
  CHECK(symbol_iou(za, zb, zero) == 0.0);
}

TEST_CASE("panoptic_quality on perfect and empty predictions") {
  LengthMap lengths = {{1, 5.0}, {2, 5.0}, {3, 2.0}};
  SymbolSet gt;
  gt.symbols = {{1, 1, {1, 2}}, {2, 2, {3}}};
  const std::set<int> things = {1};
  const std::set<int> stuffs = {2};

  const PQReport perfect = panoptic_quality(gt, gt, lengths, things, stuffs);
  CHECK(perfect.total.pq == doctest::Approx(1.0));
  CHECK(perfect.counts.fp == 0);
  CHECK(perfect.counts.fn == 0);
  CHECK(perfect.thing.pq == doctest::Approx(1.0));
  CHECK(perfect.stuff.pq == doctest::Approx(1.0));

  const PQReport empty = panoptic_quality(SymbolSet{}, gt, lengths, things, stuffs);
  CHECK(empty.total.pq == 0.0);
  CHECK(empty.counts.tp == 0);
  CHECK(empty.counts.fn == 2);
}

TEST_CASE("panoptic_quality rejects overlapping symbols within a side") {
  LengthMap lengths = {{1, 1.0}, {2, 1.0}};
  SymbolSet bad;
  bad.symbols = {{1, 1, {1, 2}}, {1, 2, {2}}};
  SymbolSet gt;
  gt.symbols = {{1, 1, {1}}};
  CHECK_THROWS_AS(panoptic_quality(bad, gt, lengths, {1}, {}), std::invalid_argument);
}

TEST_CASE("panoptic_quality equals the exhaustive oracle on random scenes") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Scene s = random_scene(rng);
    const OracleResult oracle = oracle_pq(s.pred, s.gt, s.lengths);
    REQUIRE(oracle.unique);
    const PQReport got = panoptic_quality(s.pred, s.gt, s.lengths, {1}, {2});
    CHECK(got.total.pq == oracle.pq);
    CHECK(got.counts.tp == oracle.tp);
    CHECK(got.counts.fp == oracle.fp);
    CHECK(got.counts.fn == oracle.fn);
  }
}

TEST_CASE("pq decomposition and instance relabeling invariance") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Scene s = random_scene(rng);
    const PQReport r = panoptic_quality(s.pred, s.gt, s.lengths, {1}, {2});
    if (r.counts.tp > 0) {
      CHECK(std::abs(r.total.pq - r.total.rq * r.total.sq) < 1e-12);
    }
    // Relabel instances on both sides.
    for (Symbol& sym : s.pred.symbols) sym.instance += 1000;
    for (Symbol& sym : s.gt.symbols) sym.instance = -sym.instance;
    const PQReport relabeled = panoptic_quality(s.pred, s.gt, s.lengths, {1}, {2});
    CHECK(relabeled.total.pq == r.total.pq);
  }
}

TEST_CASE("removing a matched prediction never increases PQ") {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const Scene s = random_scene(rng);
    const PQReport base = panoptic_quality(s.pred, s.gt, s.lengths, {1}, {2});
    const OracleResult oracle = oracle_pq(s.pred, s.gt, s.lengths);
    if (oracle.tp == 0) continue;
    // Delete one matched predicted symbol.
    for (size_t p = 0; p < s.pred.symbols.size(); ++p) {
      bool matched = false;
      for (const Symbol& g : s.gt.symbols) {
        if (g.label == s.pred.symbols[p].label &&
            oracle_iou(s.pred.symbols[p], g, s.lengths) > 0.5) {
          matched = true;
        }
      }
      if (!matched) continue;
      SymbolSet reduced;
      for (size_t q = 0; q < s.pred.symbols.size(); ++q) {
        if (q != p) reduced.symbols.push_back(s.pred.symbols[q]);
      }
      const PQReport after = panoptic_quality(reduced, s.gt, s.lengths, {1}, {2});
      CHECK(after.total.pq <= base.total.pq + 1e-12);
      break;
    }
  }
}

TEST_CASE("aggregation sums counts before applying the formula") {
  LengthMap lengths = {{1, 1.0}, {2, 1.0}};
  SymbolSet gt;
  gt.symbols = {{1, 1, {1}}, {2, 2, {2}}};
  SymbolSet half;
  half.symbols = {{1, 1, {1}}};
  PQAccumulator acc;
  acc.add(panoptic_quality(half, gt, lengths, {1}, {2}));
  acc.add(panoptic_quality(gt, gt, lengths, {1}, {2}));
  const PQReport total = acc.finalize({1}, {2});
  CHECK(total.counts.tp == 3);
  CHECK(total.counts.fn == 1);
  CHECK(total.total.pq == doctest::Approx(3.0 / 3.5));
}

TEST_CASE("semantic_f1 basics and the weighted hand case") {
  CHECK(semantic_f1({1, 2}, {1, 2}, {1, 1}).f1 == doctest::Approx(1.0));
  CHECK(semantic_f1({1, 2}, {1, 2}, {4, 9}).wf1 == doctest::Approx(1.0));
  CHECK(semantic_f1({2, 1}, {1, 2}, {1, 1}).f1 == doctest::Approx(0.0));

  const F1Report r = semantic_f1({1, 1}, {1, 2}, {1, 3});
  CHECK(r.f1 == doctest::Approx(0.5));
  CHECK(r.wf1 == doctest::Approx(0.25));

  CHECK_THROWS_AS(semantic_f1({1}, {1, 2}, {1, 1}), std::invalid_argument);
}

TEST_CASE("semantic_f1 per-class rows") {
  const F1Report r = semantic_f1({1, 1, 2, 3}, {1, 2, 2, 3}, {1, 1, 1, 1});
  CHECK(r.per_class.at(1).tp == 1);
  CHECK(r.per_class.at(1).fp == 1);
  CHECK(r.per_class.at(1).fn == 0);
  CHECK(r.per_class.at(2).tp == 1);
  CHECK(r.per_class.at(2).fn == 1);
  CHECK(r.per_class.at(3).f1 == doctest::Approx(1.0));
}
