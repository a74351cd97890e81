#include "vecspot/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace vecspot::ag {

namespace {

std::shared_ptr<Node> leaf(Mat v, bool needs_grad) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->requires_grad = needs_grad;
  if (needs_grad) n->grad = Mat(n->val.rows, n->val.cols);
  return n;
}

Tensor make(Mat val, std::vector<Tensor> parents, std::function<void(Node&)> fn) {
  auto n = std::make_shared<Node>();
  n->val = std::move(val);
  bool needs_grad = false;
  for (const Tensor& p : parents) {
    n->parents.push_back(p.node());
    needs_grad = needs_grad || p.requires_grad();
  }
  n->requires_grad = needs_grad;
  if (needs_grad) {
    n->grad = Mat(n->val.rows, n->val.cols);
    n->backprop = std::move(fn);
  }
  return Tensor(n);
}

void check_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor Tensor::constant(Mat v) { return Tensor(leaf(std::move(v), false)); }
Tensor Tensor::param(Mat v) { return Tensor(leaf(std::move(v), true)); }

void Tensor::zero_grad() {
  if (node_ && node_->requires_grad) {
    std::fill(node_->grad.a.begin(), node_->grad.a.end(), 0.0);
  }
}

Tensor add(Tensor a, Tensor b) {
  check_same_shape(a.val(), b.val(), "add");
  Mat v = a.val();
  for (size_t i = 0; i < v.size(); ++i) v.a[i] += b.val().a[i];
  auto pa = a.node(), pb = b.node();
  return make(std::move(v), {a, b}, [pa, pb](Node& self) {
    if (pa->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i) pa->grad.a[i] += self.grad.a[i];
    if (pb->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i) pb->grad.a[i] += self.grad.a[i];
  });
}

Tensor sub(Tensor a, Tensor b) {
  check_same_shape(a.val(), b.val(), "sub");
  Mat v = a.val();
  for (size_t i = 0; i < v.size(); ++i) v.a[i] -= b.val().a[i];
  auto pa = a.node(), pb = b.node();
  return make(std::move(v), {a, b}, [pa, pb](Node& self) {
    if (pa->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i) pa->grad.a[i] += self.grad.a[i];
    if (pb->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i) pb->grad.a[i] -= self.grad.a[i];
  });
}

Tensor mul(Tensor a, Tensor b) {
  check_same_shape(a.val(), b.val(), "mul");
  Mat v = a.val();
  for (size_t i = 0; i < v.size(); ++i) v.a[i] *= b.val().a[i];
  auto pa = a.node(), pb = b.node();
  return make(std::move(v), {a, b}, [pa, pb](Node& self) {
    if (pa->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i)
        pa->grad.a[i] += self.grad.a[i] * pb->val.a[i];
    if (pb->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i)
        pb->grad.a[i] += self.grad.a[i] * pa->val.a[i];
  });
}

Tensor scale(Tensor a, double s) {
  Mat v = a.val();
  for (double& x : v.a) x *= s;
  auto pa = a.node();
  return make(std::move(v), {a}, [pa, s](Node& self) {
    if (pa->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i) pa->grad.a[i] += s * self.grad.a[i];
  });
}

Tensor add_const(Tensor a, Mat m) {
  check_same_shape(a.val(), m, "add_const");
  Mat v = a.val();
  for (size_t i = 0; i < v.size(); ++i) v.a[i] += m.a[i];
  auto pa = a.node();
  return make(std::move(v), {a}, [pa](Node& self) {
    if (pa->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i) pa->grad.a[i] += self.grad.a[i];
  });
}

Tensor add_rowvec(Tensor a, Tensor v) {
  if (v.rows() != 1 || v.cols() != a.cols()) {
    throw std::invalid_argument("add_rowvec: v must be 1 x cols(a)");
  }
  Mat out = a.val();
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < out.cols; ++c) out(r, c) += v.val()(0, c);
  auto pa = a.node(), pv = v.node();
  return make(std::move(out), {a, v}, [pa, pv](Node& self) {
    if (pa->requires_grad)
      for (size_t i = 0; i < self.grad.size(); ++i) pa->grad.a[i] += self.grad.a[i];
    if (pv->requires_grad) {
      for (int r = 0; r < self.grad.rows; ++r)
        for (int c = 0; c < self.grad.cols; ++c) pv->grad(0, c) += self.grad(r, c);
    }
  });
}

Tensor matmul(Tensor a, Tensor b) {
  Mat v = vecspot::matmul(a.val(), b.val());
  auto pa = a.node(), pb = b.node();
  return make(std::move(v), {a, b}, [pa, pb](Node& self) {
    if (pa->requires_grad) {
      const Mat da = vecspot::matmul_nt(self.grad, pb->val);
      for (size_t i = 0; i < da.size(); ++i) pa->grad.a[i] += da.a[i];
    }
    if (pb->requires_grad) {
      const Mat db = vecspot::matmul_tn(pa->val, self.grad);
      for (size_t i = 0; i < db.size(); ++i) pb->grad.a[i] += db.a[i];
    }
  });
}

Tensor matmul_nt(Tensor a, Tensor b) {
  Mat v = vecspot::matmul_nt(a.val(), b.val());
  auto pa = a.node(), pb = b.node();
  return make(std::move(v), {a, b}, [pa, pb](Node& self) {
    if (pa->requires_grad) {
      const Mat da = vecspot::matmul(self.grad, pb->val);
      for (size_t i = 0; i < da.size(); ++i) pa->grad.a[i] += da.a[i];
    }
    if (pb->requires_grad) {
      const Mat db = vecspot::matmul_tn(self.grad, pa->val);
      for (size_t i = 0; i < db.size(); ++i) pb->grad.a[i] += db.a[i];
    }
  });
}

Tensor transpose(Tensor a) {
  Mat v = vecspot::transpose(a.val());
  auto pa = a.node();
  return make(std::move(v), {a}, [pa](Node& self) {
    if (pa->requires_grad) {
      const Mat gt = vecspot::transpose(self.grad);
      for (size_t i = 0; i < gt.size(); ++i) pa->grad.a[i] += gt.a[i];
    }
  });
}

Tensor slice_rows(Tensor a, int r0, int n) {
  if (r0 < 0 || n < 0 || r0 + n > a.rows()) {
    throw std::out_of_range("slice_rows: range out of bounds");
  }
  Mat v(n, a.cols());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < v.cols; ++c) v(r, c) = a.val()(r0 + r, c);
  auto pa = a.node();
  return make(std::move(v), {a}, [pa, r0](Node& self) {
    if (!pa->requires_grad) return;
    for (int r = 0; r < self.grad.rows; ++r)
      for (int c = 0; c < self.grad.cols; ++c) pa->grad(r0 + r, c) += self.grad(r, c);
  });
}

Tensor slice_cols(Tensor a, int c0, int n) {
  if (c0 < 0 || n < 0 || c0 + n > a.cols()) {
    throw std::out_of_range("slice_cols: range out of bounds");
  }
  Mat v(a.rows(), n);
  for (int r = 0; r < v.rows; ++r)
    for (int c = 0; c < n; ++c) v(r, c) = a.val()(r, c0 + c);
  auto pa = a.node();
  return make(std::move(v), {a}, [pa, c0](Node& self) {
    if (!pa->requires_grad) return;
    for (int r = 0; r < self.grad.rows; ++r)
      for (int c = 0; c < self.grad.cols; ++c) pa->grad(r, c0 + c) += self.grad(r, c);
  });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
  int rows = 0;
  const int cols = parts[0].cols();
  for (const Tensor& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("concat_rows: column mismatch");
    rows += p.rows();
  }
  Mat v(rows, cols);
  int r0 = 0;
  std::vector<int> offsets;
  for (const Tensor& p : parts) {
    offsets.push_back(r0);
    for (int r = 0; r < p.rows(); ++r)
      for (int c = 0; c < cols; ++c) v(r0 + r, c) = p.val()(r, c);
    r0 += p.rows();
  }
  std::vector<std::shared_ptr<Node>> pnodes;
  for (const Tensor& p : parts) pnodes.push_back(p.node());
  return make(std::move(v), parts, [pnodes, offsets](Node& self) {
    for (size_t i = 0; i < pnodes.size(); ++i) {
      if (!pnodes[i]->requires_grad) continue;
      const int r0 = offsets[i];
      for (int r = 0; r < pnodes[i]->val.rows; ++r)
        for (int c = 0; c < self.grad.cols; ++c)
          pnodes[i]->grad(r, c) += self.grad(r0 + r, c);
    }
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
  const int rows = parts[0].rows();
  int cols = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
  }
  Mat v(rows, cols);
  int c0 = 0;
  std::vector<int> offsets;
  for (const Tensor& p : parts) {
    offsets.push_back(c0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < p.cols(); ++c) v(r, c0 + c) = p.val()(r, c);
    c0 += p.cols();
  }
  std::vector<std::shared_ptr<Node>> pnodes;
  for (const Tensor& p : parts) pnodes.push_back(p.node());
  return make(std::move(v), parts, [pnodes, offsets](Node& self) {
    for (size_t i = 0; i < pnodes.size(); ++i) {
      if (!pnodes[i]->requires_grad) continue;
      const int c0 = offsets[i];
      for (int r = 0; r < self.grad.rows; ++r)
        for (int c = 0; c < pnodes[i]->val.cols; ++c)
          pnodes[i]->grad(r, c) += self.grad(r, c0 + c);
    }
  });
}

Tensor gather_rows(Tensor a, std::vector<int> idx) {
  Mat v(static_cast<int>(idx.size()), a.cols());
  for (size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= a.rows()) {
      throw std::out_of_range("gather_rows: index out of bounds");
    }
    for (int c = 0; c < v.cols; ++c) v(static_cast<int>(r), c) = a.val()(idx[r], c);
  }
  auto pa = a.node();
  return make(std::move(v), {a}, [pa, idx = std::move(idx)](Node& self) {
    if (!pa->requires_grad) return;
    for (size_t r = 0; r < idx.size(); ++r)
      for (int c = 0; c < self.grad.cols; ++c)
        pa->grad(idx[r], c) += self.grad(static_cast<int>(r), c);
  });
}

Tensor softmax_rows(Tensor a) {
  Mat y = a.val();
  for (int r = 0; r < y.rows; ++r) {
    double m = y(r, 0);
    for (int c = 1; c < y.cols; ++c) m = std::max(m, y(r, c));
    double s = 0.0;
    for (int c = 0; c < y.cols; ++c) {
      y(r, c) = std::exp(y(r, c) - m);
      s += y(r, c);
    }
    for (int c = 0; c < y.cols; ++c) y(r, c) /= s;
  }
  auto pa = a.node();
  Mat ycopy = y;
  return make(std::move(y), {a}, [pa, ycopy = std::move(ycopy)](Node& self) {
    if (!pa->requires_grad) return;
    for (int r = 0; r < self.grad.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < self.grad.cols; ++c) dot += self.grad(r, c) * ycopy(r, c);
      for (int c = 0; c < self.grad.cols; ++c)
        pa->grad(r, c) += ycopy(r, c) * (self.grad(r, c) - dot);
    }
  });
}

Tensor sigmoid(Tensor a) {
  Mat y = a.val();
  for (double& x : y.a) x = stable_sigmoid(x);
  auto pa = a.node();
  Mat ycopy = y;
  return make(std::move(y), {a}, [pa, ycopy = std::move(ycopy)](Node& self) {
    if (!pa->requires_grad) return;
    for (size_t i = 0; i < self.grad.size(); ++i)
      pa->grad.a[i] += self.grad.a[i] * ycopy.a[i] * (1.0 - ycopy.a[i]);
  });
}

Tensor gelu(Tensor a) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double kK = 0.044715;
  Mat y = a.val();
  for (double& x : y.a) {
    const double t = std::tanh(kC * (x + kK * x * x * x));
    x = 0.5 * x * (1.0 + t);
  }
  auto pa = a.node();
  return make(std::move(y), {a}, [pa](Node& self) {
    if (!pa->requires_grad) return;
    for (size_t i = 0; i < self.grad.size(); ++i) {
      const double x = pa->val.a[i];
      const double t = std::tanh(kC * (x + kK * x * x * x));
      const double d = 0.5 * (1.0 + t) +
                       0.5 * x * (1.0 - t * t) * kC * (1.0 + 3.0 * kK * x * x);
      pa->grad.a[i] += self.grad.a[i] * d;
    }
  });
}

Tensor layer_norm(Tensor a, Tensor gamma, Tensor beta) {
  constexpr double kEps = 1e-5;
  const int cols = a.cols();
  if (gamma.rows() != 1 || gamma.cols() != cols || beta.rows() != 1 || beta.cols() != cols) {
    throw std::invalid_argument("layer_norm: gamma/beta must be 1 x cols(a)");
  }
  Mat xhat(a.rows(), cols);
  Mat inv(a.rows(), 1);
  Mat y(a.rows(), cols);
  for (int r = 0; r < a.rows(); ++r) {
    double mean = 0.0;
    for (int c = 0; c < cols; ++c) mean += a.val()(r, c);
    mean /= cols;
    double var = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double d = a.val()(r, c) - mean;
      var += d * d;
    }
    var /= cols;
    const double istd = 1.0 / std::sqrt(var + kEps);
    inv(r, 0) = istd;
    for (int c = 0; c < cols; ++c) {
      xhat(r, c) = (a.val()(r, c) - mean) * istd;
      y(r, c) = gamma.val()(0, c) * xhat(r, c) + beta.val()(0, c);
    }
  }
  auto pa = a.node(), pg = gamma.node(), pb = beta.node();
  return make(std::move(y), {a, gamma, beta},
              [pa, pg, pb, xhat = std::move(xhat), inv = std::move(inv)](Node& self) {
                const int rows = self.grad.rows;
                const int cols = self.grad.cols;
                for (int r = 0; r < rows; ++r) {
                  double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
                  for (int c = 0; c < cols; ++c) {
                    const double dxhat = self.grad(r, c) * pg->val(0, c);
                    sum_dxhat += dxhat;
                    sum_dxhat_xhat += dxhat * xhat(r, c);
                  }
                  if (pa->requires_grad) {
                    for (int c = 0; c < cols; ++c) {
                      const double dxhat = self.grad(r, c) * pg->val(0, c);
                      pa->grad(r, c) += inv(r, 0) / cols *
                                        (cols * dxhat - sum_dxhat -
                                         xhat(r, c) * sum_dxhat_xhat);
                    }
                  }
                }
                if (pg->requires_grad) {
                  for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c)
                      pg->grad(0, c) += self.grad(r, c) * xhat(r, c);
                }
                if (pb->requires_grad) {
                  for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c) pb->grad(0, c) += self.grad(r, c);
                }
              });
}

Tensor group_mean(Tensor a, std::vector<std::vector<int>> groups) {
  Mat v(static_cast<int>(groups.size()), a.cols());
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw std::invalid_argument("group_mean: empty group");
    for (int i : groups[g])
      for (int c = 0; c < v.cols; ++c) v(static_cast<int>(g), c) += a.val()(i, c);
    const double invn = 1.0 / static_cast<double>(groups[g].size());
    for (int c = 0; c < v.cols; ++c) v(static_cast<int>(g), c) *= invn;
  }
  auto pa = a.node();
  return make(std::move(v), {a}, [pa, groups = std::move(groups)](Node& self) {
    if (!pa->requires_grad) return;
    for (size_t g = 0; g < groups.size(); ++g) {
      const double invn = 1.0 / static_cast<double>(groups[g].size());
      for (int i : groups[g])
        for (int c = 0; c < self.grad.cols; ++c)
          pa->grad(i, c) += self.grad(static_cast<int>(g), c) * invn;
    }
  });
}

Tensor group_max(Tensor a, std::vector<std::vector<int>> groups) {
  Mat v(static_cast<int>(groups.size()), a.cols());
  std::vector<int> arg(static_cast<size_t>(groups.size()) * a.cols());
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw std::invalid_argument("group_max: empty group");
    for (int c = 0; c < v.cols; ++c) {
      int best = groups[g][0];
      double bv = a.val()(best, c);
      for (int i : groups[g]) {
        if (a.val()(i, c) > bv) {
          bv = a.val()(i, c);
          best = i;
        }
      }
      v(static_cast<int>(g), c) = bv;
      arg[g * a.cols() + c] = best;
    }
  }
  auto pa = a.node();
  const int cols = a.cols();
  return make(std::move(v), {a}, [pa, arg = std::move(arg), cols](Node& self) {
    if (!pa->requires_grad) return;
    for (int g = 0; g < self.grad.rows; ++g)
      for (int c = 0; c < cols; ++c)
        pa->grad(arg[static_cast<size_t>(g) * cols + c], c) += self.grad(g, c);
  });
}

Tensor group_attention_pool(Tensor a, Tensor scores,
                            std::vector<std::vector<int>> groups) {
  if (scores.cols() != 1 || scores.rows() != a.rows()) {
    throw std::invalid_argument("group_attention_pool: scores must be rows(a) x 1");
  }
  Mat v(static_cast<int>(groups.size()), a.cols());
  std::vector<std::vector<double>> weights(groups.size());
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty())
      throw std::invalid_argument("group_attention_pool: empty group");
    double m = scores.val()(groups[g][0], 0);
    for (int i : groups[g]) m = std::max(m, scores.val()(i, 0));
    double s = 0.0;
    weights[g].reserve(groups[g].size());
    for (int i : groups[g]) {
      const double w = std::exp(scores.val()(i, 0) - m);
      weights[g].push_back(w);
      s += w;
    }
    for (double& w : weights[g]) w /= s;
    for (size_t k = 0; k < groups[g].size(); ++k)
      for (int c = 0; c < v.cols; ++c)
        v(static_cast<int>(g), c) += weights[g][k] * a.val()(groups[g][k], c);
  }
  auto pa = a.node(), ps = scores.node();
  return make(std::move(v), {a, scores},
              [pa, ps, groups = std::move(groups),
               weights = std::move(weights)](Node& self) {
                const int cols = self.grad.cols;
                for (size_t g = 0; g < groups.size(); ++g) {
                  // q_k = <member row, upstream grad row>; dscore follows the
                  // softmax Jacobian.
                  double sum_wq = 0.0;
                  std::vector<double> q(groups[g].size());
                  for (size_t k = 0; k < groups[g].size(); ++k) {
                    double dot = 0.0;
                    for (int c = 0; c < cols; ++c)
                      dot += pa->val(groups[g][k], c) * self.grad(static_cast<int>(g), c);
                    q[k] = dot;
                    sum_wq += weights[g][k] * dot;
                  }
                  for (size_t k = 0; k < groups[g].size(); ++k) {
                    const int i = groups[g][k];
                    if (pa->requires_grad)
                      for (int c = 0; c < cols; ++c)
                        pa->grad(i, c) += weights[g][k] * self.grad(static_cast<int>(g), c);
                    if (ps->requires_grad)
                      ps->grad(i, 0) += weights[g][k] * (q[k] - sum_wq);
                  }
                }
              });
}

Tensor sum_all(Tensor a) {
  Mat v(1, 1);
  for (double x : a.val().a) v(0, 0) += x;
  auto pa = a.node();
  return make(std::move(v), {a}, [pa](Node& self) {
    if (!pa->requires_grad) return;
    for (double& g : pa->grad.a) g += self.grad(0, 0);
  });
}

Tensor scalar(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return Tensor::constant(std::move(m));
}

Tensor cross_entropy_mean(Tensor logits, std::vector<int> targets) {
  if (static_cast<int>(targets.size()) != logits.rows()) {
    throw std::invalid_argument("cross_entropy_mean: one target per row required");
  }
  const int rows = logits.rows(), cols = logits.cols();
  Mat probs(rows, cols);
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (targets[r] < 0 || targets[r] >= cols) {
      throw std::out_of_range("cross_entropy_mean: target out of range");
    }
    double m = logits.val()(r, 0);
    for (int c = 1; c < cols; ++c) m = std::max(m, logits.val()(r, c));
    double s = 0.0;
    for (int c = 0; c < cols; ++c) {
      probs(r, c) = std::exp(logits.val()(r, c) - m);
      s += probs(r, c);
    }
    for (int c = 0; c < cols; ++c) probs(r, c) /= s;
    loss += (m + std::log(s)) - logits.val()(r, targets[r]);
  }
  Mat v(1, 1);
  v(0, 0) = loss / rows;
  auto pl = logits.node();
  return make(std::move(v), {logits},
              [pl, probs = std::move(probs), targets = std::move(targets)](Node& self) {
                if (!pl->requires_grad) return;
                const double g = self.grad(0, 0) / probs.rows;
                for (int r = 0; r < probs.rows; ++r)
                  for (int c = 0; c < probs.cols; ++c)
                    pl->grad(r, c) += g * (probs(r, c) - (c == targets[r] ? 1.0 : 0.0));
              });
}

Tensor bce_with_logits_mean(Tensor logits, Mat targets) {
  check_same_shape(logits.val(), targets, "bce_with_logits_mean");
  double loss = 0.0;
  for (size_t i = 0; i < targets.size(); ++i) {
    const double x = logits.val().a[i];
    const double t = targets.a[i];
    loss += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
  }
  Mat v(1, 1);
  v(0, 0) = loss / static_cast<double>(targets.size());
  auto pl = logits.node();
  return make(std::move(v), {logits},
              [pl, targets = std::move(targets)](Node& self) {
                if (!pl->requires_grad) return;
                const double g = self.grad(0, 0) / static_cast<double>(targets.size());
                for (size_t i = 0; i < targets.size(); ++i)
                  pl->grad.a[i] += g * (stable_sigmoid(pl->val.a[i]) - targets.a[i]);
              });
}

Tensor dice_loss_mean(Tensor logits, Mat targets) {
  check_same_shape(logits.val(), targets, "dice_loss_mean");
  const int rows = logits.rows(), cols = logits.cols();
  Mat probs(rows, cols);
  std::vector<double> inter(rows), psum(rows), gsum(rows);
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double p = stable_sigmoid(logits.val()(r, c));
      probs(r, c) = p;
      inter[r] += p * targets(r, c);
      psum[r] += p;
      gsum[r] += targets(r, c);
    }
    loss += 1.0 - 2.0 * inter[r] / (psum[r] + gsum[r]);
  }
  Mat v(1, 1);
  v(0, 0) = loss / rows;
  auto pl = logits.node();
  return make(std::move(v), {logits},
              [pl, probs = std::move(probs), targets = std::move(targets),
               inter = std::move(inter), psum = std::move(psum),
               gsum = std::move(gsum)](Node& self) {
                if (!pl->requires_grad) return;
                const double g = self.grad(0, 0) / probs.rows;
                for (int r = 0; r < probs.rows; ++r) {
                  const double denom = psum[r] + gsum[r];
                  const double denom2 = denom * denom;
                  for (int c = 0; c < probs.cols; ++c) {
                    const double p = probs(r, c);
                    const double dd_dp =
                        -2.0 * (targets(r, c) * denom - inter[r]) / denom2;
                    pl->grad(r, c) += g * dd_dp * p * (1.0 - p);
                  }
                }
              });
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.rows() != 1 || loss.cols() != 1) {
    throw std::invalid_argument("backward: loss must be a defined 1x1 tensor");
  }
  if (!loss.requires_grad()) return;

  // Post-order DFS, then replay reversed so each node's grad is complete
  // before its backprop runs.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && !visited.count(parent)) {
        visited.insert(parent);
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->grad(0, 0) = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backprop) (*it)->backprop(**it);
  }
}

}  // namespace vecspot::ag
