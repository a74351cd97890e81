#include "vecspot/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace vecspot::nn {

Linear make_linear(int in, int out, Rng& rng, double range) {
  Mat w(in, out);
  for (double& x : w.a) x = rng.uniform(-range, range);
  return {ag::Tensor::param(std::move(w)), ag::Tensor::param(Mat(1, out))};
}

Linear make_zero_linear(int in, int out) {
  return {ag::Tensor::param(Mat(in, out)), ag::Tensor::param(Mat(1, out))};
}

LayerNorm make_layer_norm(int dim) {
  return {ag::Tensor::param(Mat(1, dim, 1.0)), ag::Tensor::param(Mat(1, dim))};
}

ag::Tensor apply(const Linear& lin, ag::Tensor x) {
  return ag::add_rowvec(ag::matmul(x, lin.w), lin.b);
}

ag::Tensor apply(const LayerNorm& ln, ag::Tensor x) {
  return ag::layer_norm(x, ln.gamma, ln.beta);
}

ag::Tensor apply(const Ffn& ffn, ag::Tensor x) {
  return apply(ffn.w2, ag::gelu(apply(ffn.w1, x)));
}

ag::Tensor multi_head_attention(ag::Tensor query_in, ag::Tensor kv_in,
                                const Attention& at, int heads, const Mat* mask) {
  const int dim = at.q.w.cols();
  if (heads < 1 || dim % heads != 0) {
    throw std::invalid_argument("multi_head_attention: dim must divide by heads");
  }
  const int dh = dim / heads;
  ag::Tensor q = apply(at.q, query_in);
  ag::Tensor k = apply(at.k, kv_in);
  ag::Tensor v = apply(at.v, kv_in);
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  std::vector<ag::Tensor> head_out;
  head_out.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    ag::Tensor qh = ag::slice_cols(q, h * dh, dh);
    ag::Tensor kh = ag::slice_cols(k, h * dh, dh);
    ag::Tensor vh = ag::slice_cols(v, h * dh, dh);
    ag::Tensor scores = ag::scale(ag::matmul_nt(qh, kh), inv_scale);
    if (mask) scores = ag::add_const(scores, *mask);
    head_out.push_back(ag::matmul(ag::softmax_rows(scores), vh));
  }
  return apply(at.o, ag::concat_cols(head_out));
}

void collect(const std::string& name, const Linear& lin, ParamList& out) {
  out.emplace_back(name + ".w", lin.w);
  out.emplace_back(name + ".b", lin.b);
}

void collect(const std::string& name, const LayerNorm& ln, ParamList& out) {
  out.emplace_back(name + ".gamma", ln.gamma);
  out.emplace_back(name + ".beta", ln.beta);
}

void collect(const std::string& name, const Attention& at, ParamList& out) {
  collect(name + ".q", at.q, out);
  collect(name + ".k", at.k, out);
  collect(name + ".v", at.v, out);
  collect(name + ".o", at.o, out);
}

void collect(const std::string& name, const Ffn& ffn, ParamList& out) {
  collect(name + ".w1", ffn.w1, out);
  collect(name + ".w2", ffn.w2, out);
}

}  // namespace vecspot::nn
