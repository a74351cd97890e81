#include "vecspot/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace vecspot {

namespace {

constexpr int kMortonBits = 10;  // 1024 bins per axis

uint32_t quantize(double v) {
  const double scaled = (v + 0.5) * 1024.0;
  const long b = std::lround(std::floor(scaled));
  return static_cast<uint32_t>(std::clamp(b, 0L, 1023L));
}

uint32_t spread3(uint32_t x) {
  // 10 bits -> every third bit of a 30-bit word.
  x &= 0x3ff;
  x = (x | (x << 16)) & 0x30000ff;
  x = (x | (x << 8)) & 0x300f00f;
  x = (x | (x << 4)) & 0x30c30c3;
  x = (x | (x << 2)) & 0x9249249;
  return x;
}

// Sinusoidal position channels: channel c encodes coord axis c % 3 at a
// frequency doubling every other channel triple.
Mat positional_encoding(const std::vector<LineToken>& tokens, int dim) {
  constexpr double kPi = 3.14159265358979323846;
  Mat pe(static_cast<int>(tokens.size()), dim);
  for (size_t i = 0; i < tokens.size(); ++i) {
    for (int c = 0; c < dim; ++c) {
      const int axis = c % 3;
      const int k = c / 3;
      const double omega = kPi * std::pow(2.0, static_cast<double>(k / 2));
      const double arg = omega * tokens[i].coord[axis];
      pe(static_cast<int>(i), c) = (k % 2 == 0) ? std::sin(arg) : std::cos(arg);
    }
  }
  return pe;
}

}  // namespace

uint32_t morton_code(const std::array<double, 3>& coord) {
  static_assert(kMortonBits == 10);
  return spread3(quantize(coord[0])) | (spread3(quantize(coord[1])) << 1) |
         (spread3(quantize(coord[2])) << 2);
}

std::vector<int> serialize_order(const std::vector<LineToken>& tokens) {
  std::vector<uint32_t> codes(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) codes[i] = morton_code(tokens[i].coord);
  std::vector<int> order(tokens.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (codes[a] != codes[b]) return codes[a] < codes[b];
    const LineToken& ta = tokens[a];
    const LineToken& tb = tokens[b];
    if (ta.coord != tb.coord) return ta.coord < tb.coord;
    if (ta.feat != tb.feat) return ta.feat < tb.feat;
    if (ta.primitive_id != tb.primitive_id) return ta.primitive_id < tb.primitive_id;
    if (ta.layer != tb.layer) return ta.layer < tb.layer;
    return a < b;
  });
  return order;
}

ag::Tensor line_pooling(ag::Tensor line_embeddings,
                        const std::vector<std::pair<int, int>>& ranges) {
  std::vector<std::vector<int>> groups;
  groups.reserve(ranges.size());
  for (const auto& [begin, end] : ranges) {
    if (begin >= end) throw std::invalid_argument("line_pooling: empty range");
    std::vector<int> g(end - begin);
    std::iota(g.begin(), g.end(), begin);
    groups.push_back(std::move(g));
  }
  return ag::add(ag::group_max(line_embeddings, groups),
                 ag::group_mean(line_embeddings, groups));
}

LineEncoder::LineEncoder(const EncoderConfig& cfg) : cfg_(cfg) {
  if (cfg.embed_dim % cfg.heads != 0) {
    throw std::invalid_argument("LineEncoder: embed_dim must divide by heads");
  }
  if (cfg.window < 1) throw std::invalid_argument("LineEncoder: window must be >= 1");
  Rng rng(cfg.seed);
  const double range = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
  const int d = cfg.embed_dim;
  input_proj_ = nn::make_linear(7, d, rng, range);
  blocks_.reserve(cfg.depth);
  for (int i = 0; i < cfg.depth; ++i) {
    Block b;
    b.ln_attn = nn::make_layer_norm(d);
    b.attn = {nn::make_linear(d, d, rng, range), nn::make_linear(d, d, rng, range),
              nn::make_linear(d, d, rng, range), nn::make_linear(d, d, rng, range)};
    b.ln_ffn = nn::make_layer_norm(d);
    b.ffn = {nn::make_linear(d, 4 * d, rng, range),
             nn::make_linear(4 * d, d, rng, range)};
    blocks_.push_back(std::move(b));
  }
  final_ln_ = nn::make_layer_norm(d);
  Mat score(d, 1);
  for (double& x : score.a) x = rng.uniform(-range, range);
  lfe_score_ = ag::Tensor::param(std::move(score));
  lfe_fuse_ = nn::make_zero_linear(3 * d, d);
}

ag::Tensor LineEncoder::encode_lines(const std::vector<LineToken>& tokens) const {
  if (tokens.empty()) throw std::invalid_argument("encode_lines: no tokens");
  const int n = static_cast<int>(tokens.size());
  const int d = cfg_.embed_dim;

  Mat feats(n, 7);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 7; ++c) feats(i, c) = tokens[i].feat[c];

  ag::Tensor x = nn::apply(input_proj_, ag::Tensor::constant(std::move(feats)));
  x = ag::add_const(x, positional_encoding(tokens, d));

  const std::vector<int> order = serialize_order(tokens);
  x = ag::gather_rows(x, order);

  for (const Block& block : blocks_) {
    // Pre-norm residual attention over contiguous windows of the serialized
    // sequence, then a pre-norm feed-forward.
    ag::Tensor h = nn::apply(block.ln_attn, x);
    std::vector<ag::Tensor> window_out;
    for (int r0 = 0; r0 < n; r0 += cfg_.window) {
      const int wn = std::min(cfg_.window, n - r0);
      ag::Tensor hw = ag::slice_rows(h, r0, wn);
      window_out.push_back(nn::multi_head_attention(hw, hw, block.attn, cfg_.heads));
    }
    x = ag::add(x, window_out.size() == 1 ? window_out[0] : ag::concat_rows(window_out));
    x = ag::add(x, nn::apply(block.ffn, nn::apply(block.ln_ffn, x)));
  }
  x = nn::apply(final_ln_, x);

  // Back to input token order.
  std::vector<int> inverse(n);
  for (int i = 0; i < n; ++i) inverse[order[i]] = i;
  return ag::gather_rows(x, inverse);
}

ag::Tensor LineEncoder::layer_feature_enhancement(
    ag::Tensor primitive_embeddings, const std::vector<int>& layer_ids) const {
  const int n = primitive_embeddings.rows();
  if (static_cast<int>(layer_ids.size()) != n) {
    throw std::invalid_argument("layer_feature_enhancement: one layer id per row");
  }
  std::map<int, std::vector<int>> by_layer;
  for (int i = 0; i < n; ++i) by_layer[layer_ids[i]].push_back(i);

  std::vector<std::vector<int>> groups;
  groups.reserve(by_layer.size());
  std::vector<int> group_of(n);
  for (auto& [layer, members] : by_layer) {
    for (int i : members) group_of[i] = static_cast<int>(groups.size());
    groups.push_back(members);
  }

  ag::Tensor avg = ag::group_mean(primitive_embeddings, groups);
  ag::Tensor mx = ag::group_max(primitive_embeddings, groups);
  ag::Tensor scores = ag::matmul(primitive_embeddings, lfe_score_);
  ag::Tensor att = ag::group_attention_pool(primitive_embeddings, scores, groups);
  ag::Tensor context = nn::apply(lfe_fuse_, ag::concat_cols({avg, mx, att}));
  return ag::add(primitive_embeddings, ag::gather_rows(context, group_of));
}

nn::ParamList LineEncoder::params() const {
  nn::ParamList out;
  nn::collect("encoder.input_proj", input_proj_, out);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const std::string p = "encoder.block" + std::to_string(i);
    nn::collect(p + ".ln_attn", blocks_[i].ln_attn, out);
    nn::collect(p + ".attn", blocks_[i].attn, out);
    nn::collect(p + ".ln_ffn", blocks_[i].ln_ffn, out);
    nn::collect(p + ".ffn", blocks_[i].ffn, out);
  }
  nn::collect("encoder.final_ln", final_ln_, out);
  out.emplace_back("encoder.lfe.score", lfe_score_);
  nn::collect("encoder.lfe.fuse", lfe_fuse_, out);
  return out;
}

}  // namespace vecspot
