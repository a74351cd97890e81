#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vecspot/mat.hpp"

namespace vecspot::ag {

// Reverse-mode autodiff over Mat values. Each op builds a node holding the
// forward value and a closure that scatters the node's gradient into its
// parents. Graphs are per-forward-pass and freed when the last Tensor handle
// goes out of scope.
struct Node {
  Mat val;
  Mat grad;  // allocated only when requires_grad
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Tensor constant(Mat v);
  static Tensor param(Mat v);  // leaf with gradient storage

  bool defined() const { return node_ != nullptr; }
  const Mat& val() const { return node_->val; }
  Mat& value_mut() { return node_->val; }
  Mat& grad() { return node_->grad; }
  const Mat& grad() const { return node_->grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  void zero_grad();
  int rows() const { return node_->val.rows; }
  int cols() const { return node_->val.cols; }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor mul(Tensor a, Tensor b);  // elementwise
Tensor scale(Tensor a, double s);
Tensor add_const(Tensor a, Mat m);     // constant offset, e.g. attention masks
Tensor add_rowvec(Tensor a, Tensor v); // v is 1 x C, broadcast over rows

Tensor matmul(Tensor a, Tensor b);
Tensor matmul_nt(Tensor a, Tensor b);  // a * b^T
Tensor transpose(Tensor a);

Tensor slice_rows(Tensor a, int r0, int n);
Tensor slice_cols(Tensor a, int c0, int n);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor gather_rows(Tensor a, std::vector<int> idx);

Tensor softmax_rows(Tensor a);
Tensor sigmoid(Tensor a);
Tensor gelu(Tensor a);
Tensor layer_norm(Tensor a, Tensor gamma, Tensor beta);  // gamma/beta are 1 x C

// Grouped reductions; groups are row-index lists (need not be contiguous).
Tensor group_mean(Tensor a, std::vector<std::vector<int>> groups);
Tensor group_max(Tensor a, std::vector<std::vector<int>> groups);
// Softmax(scores) within each group, then the weighted sum of member rows.
Tensor group_attention_pool(Tensor a, Tensor scores, std::vector<std::vector<int>> groups);

Tensor sum_all(Tensor a);    // 1 x 1
Tensor scalar(double v);     // 1 x 1 constant

// Loss heads. All return 1 x 1.
Tensor cross_entropy_mean(Tensor logits, std::vector<int> targets);
Tensor bce_with_logits_mean(Tensor logits, Mat targets);
Tensor dice_loss_mean(Tensor logits, Mat targets);  // soft dice per row, averaged

// Reverse pass from a 1 x 1 loss; seeds d(loss)/d(loss) = 1.
void backward(const Tensor& loss);

}  // namespace vecspot::ag
