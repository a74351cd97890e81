#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vecspot/autograd.hpp"
#include "vecspot/rng.hpp"

namespace vecspot::nn {

using ParamList = std::vector<std::pair<std::string, ag::Tensor>>;

struct Linear {
  ag::Tensor w;  // in x out
  ag::Tensor b;  // 1 x out
};

struct LayerNorm {
  ag::Tensor gamma;  // 1 x dim
  ag::Tensor beta;   // 1 x dim
};

struct Attention {
  Linear q, k, v, o;
};

struct Ffn {
  Linear w1, w2;
};

Linear make_linear(int in, int out, Rng& rng, double range);
Linear make_zero_linear(int in, int out);
LayerNorm make_layer_norm(int dim);

ag::Tensor apply(const Linear& lin, ag::Tensor x);
ag::Tensor apply(const LayerNorm& ln, ag::Tensor x);
ag::Tensor apply(const Ffn& ffn, ag::Tensor x);  // w2(gelu(w1 x))

// Scaled dot-product attention, `heads` column slices. `mask`, when given,
// is added to every head's score matrix (rows(query_in) x rows(kv_in)).
ag::Tensor multi_head_attention(ag::Tensor query_in, ag::Tensor kv_in,
                                const Attention& at, int heads,
                                const Mat* mask = nullptr);

void collect(const std::string& name, const Linear& lin, ParamList& out);
void collect(const std::string& name, const LayerNorm& ln, ParamList& out);
void collect(const std::string& name, const Attention& at, ParamList& out);
void collect(const std::string& name, const Ffn& ffn, ParamList& out);

}  // namespace vecspot::nn
