#include "vecspot/train.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

#include "vecspot/rng.hpp"

namespace vecspot {

TrainingExample make_training_example(const Drawing& drawing,
                                      const SamplingConfig& sampling,
                                      PriorMode mode) {
  TrainingExample ex;
  ex.tokens = build_tokens(tokenize_drawing(drawing, sampling), drawing, mode);

  const int n = static_cast<int>(drawing.primitives.size());
  ex.gt_labels.resize(n);
  std::map<std::pair<int, int>, std::vector<int>> grouped;
  for (int i = 0; i < n; ++i) {
    const Primitive& p = drawing.primitives[i];
    if (!p.gt_label || !p.gt_instance) {
      throw std::invalid_argument("training drawing has an unlabeled primitive (id " +
                                  std::to_string(p.id) + ")");
    }
    ex.gt_labels[i] = *p.gt_label;
    grouped[{*p.gt_label, *p.gt_instance}].push_back(i);
  }
  for (const auto& [key, members] : grouped) {
    GtInstance inst;
    inst.label = key.first;
    inst.mask.assign(n, 0);
    for (int i : members) inst.mask[i] = 1;
    ex.instances.push_back(std::move(inst));
  }
  return ex;
}

std::vector<EpochStats> train_toy(SpottingModel& model,
                                  const std::vector<TrainingExample>& examples,
                                  const TrainConfig& cfg) {
  if (examples.empty()) throw std::invalid_argument("train_toy: no examples");
  nn::ParamList params = model.params();
  Rng shuffle_rng(cfg.seed);
  std::vector<EpochStats> history;
  history.reserve(cfg.epochs);

  std::vector<int> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  uint64_t select_seed = cfg.seed ^ 0xa5a5a5a5a5a5a5a5ULL;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_int(0, static_cast<int>(i) - 1)]);
    }
    EpochStats stats;
    for (int idx : order) {
      const TrainingExample& ex = examples[idx];
      for (auto& [name, p] : params) p.zero_grad();
      LossBreakdown bd;
      ag::Tensor loss = model.training_loss(ex.tokens, ex.instances, ex.gt_labels,
                                            ++select_seed, &bd);
      ag::backward(loss);

      if (cfg.grad_clip > 0.0) {
        double sq = 0.0;
        for (auto& [name, p] : params)
          for (double g : p.grad().a) sq += g * g;
        const double norm = std::sqrt(sq);
        if (norm > cfg.grad_clip) {
          const double s = cfg.grad_clip / norm;
          for (auto& [name, p] : params)
            for (double& g : p.grad().a) g *= s;
        }
      }
      for (auto& [name, p] : params) {
        Mat& v = p.value_mut();
        const Mat& g = p.grad();
        for (size_t k = 0; k < v.size(); ++k) v.a[k] -= cfg.lr * g.a[k];
      }
      stats.mean_total += bd.total;
      stats.mean_cls += bd.cls;
      stats.mean_bce += bd.bce;
      stats.mean_dice += bd.dice;
      stats.mean_sem += bd.sem;
    }
    const double inv = 1.0 / static_cast<double>(order.size());
    stats.mean_total *= inv;
    stats.mean_cls *= inv;
    stats.mean_bce *= inv;
    stats.mean_dice *= inv;
    stats.mean_sem *= inv;
    history.push_back(stats);
    if (cfg.verbose && (epoch % 10 == 0 || epoch == cfg.epochs - 1)) {
      std::printf("epoch %4d  loss %.4f  (cls %.4f bce %.4f dice %.4f sem %.4f)\n",
                  epoch, stats.mean_total, stats.mean_cls, stats.mean_bce,
                  stats.mean_dice, stats.mean_sem);
      std::fflush(stdout);
    }
  }
  return history;
}

}  // namespace vecspot
