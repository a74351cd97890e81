#include "vecspot/model.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vecspot {

using json = nlohmann::ordered_json;

SpottingModel::SpottingModel(const ModelConfig& cfg)
    : cfg_(cfg),
      encoder_(std::make_unique<LineEncoder>(cfg.encoder)),
      decoder_(std::make_unique<QueryDecoder>(cfg.decoder)) {
  if (cfg.encoder.embed_dim != cfg.decoder.embed_dim) {
    throw std::invalid_argument("SpottingModel: encoder/decoder dims differ");
  }
}

ag::Tensor SpottingModel::primitive_features(const TokenSet& tokens) const {
  ag::Tensor lines = encoder_->encode_lines(tokens.tokens);
  ag::Tensor prims = line_pooling(lines, tokens.ranges);
  return encoder_->layer_feature_enhancement(prims, tokens.primitive_layers);
}

Predictions SpottingModel::infer(const TokenSet& tokens) const {
  ag::Tensor feats = primitive_features(tokens);
  const std::vector<int> selected = query_select(
      feats.rows(), cfg_.decoder.alpha_select_infer, cfg_.decoder.seed);
  const DecodeOutput out = decoder_->run(feats, selected);
  Predictions preds;
  preds.semantic = decoder_->semantic_predictions(out, tokens.primitive_ids);
  preds.instances = decoder_->instance_proposals(out, tokens.primitive_ids);
  return preds;
}

ag::Tensor SpottingModel::training_loss(const TokenSet& tokens,
                                        const std::vector<GtInstance>& gt_instances,
                                        const std::vector<int>& gt_labels,
                                        uint64_t select_seed,
                                        LossBreakdown* breakdown) const {
  ag::Tensor feats = primitive_features(tokens);
  const std::vector<int> selected =
      query_select(feats.rows(), cfg_.decoder.alpha_select_train, select_seed);
  const DecodeOutput out = decoder_->run(feats, selected);
  return spotting_loss(out, gt_instances, gt_labels, cfg_.loss, breakdown);
}

nn::ParamList SpottingModel::params() const {
  nn::ParamList out = encoder_->params();
  nn::ParamList dec = decoder_->params();
  out.insert(out.end(), dec.begin(), dec.end());
  return out;
}

namespace {

json config_to_json(const ModelConfig& cfg) {
  return json{
      {"encoder",
       {{"embed_dim", cfg.encoder.embed_dim},
        {"depth", cfg.encoder.depth},
        {"heads", cfg.encoder.heads},
        {"window", cfg.encoder.window},
        {"seed", cfg.encoder.seed}}},
      {"decoder",
       {{"embed_dim", cfg.decoder.embed_dim},
        {"layers", cfg.decoder.layers},
        {"heads", cfg.decoder.heads},
        {"alpha_select_train", cfg.decoder.alpha_select_train},
        {"alpha_select_infer", cfg.decoder.alpha_select_infer},
        {"class_count", cfg.decoder.class_count},
        {"mask_threshold", cfg.decoder.mask_threshold},
        {"seed", cfg.decoder.seed}}},
      {"loss",
       {{"cls", cfg.loss.cls}, {"bce", cfg.loss.bce}, {"dice", cfg.loss.dice}, {"sem", cfg.loss.sem}}},
      {"prior", cfg.prior == PriorMode::WithLayerPrior ? "with_layer_prior" : "without_prior"}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.encoder.embed_dim = j["encoder"]["embed_dim"].get<int>();
  cfg.encoder.depth = j["encoder"]["depth"].get<int>();
  cfg.encoder.heads = j["encoder"]["heads"].get<int>();
  cfg.encoder.window = j["encoder"]["window"].get<int>();
  cfg.encoder.seed = j["encoder"]["seed"].get<uint64_t>();
  cfg.decoder.embed_dim = j["decoder"]["embed_dim"].get<int>();
  cfg.decoder.layers = j["decoder"]["layers"].get<int>();
  cfg.decoder.heads = j["decoder"]["heads"].get<int>();
  cfg.decoder.alpha_select_train = j["decoder"]["alpha_select_train"].get<double>();
  cfg.decoder.alpha_select_infer = j["decoder"]["alpha_select_infer"].get<double>();
  cfg.decoder.class_count = j["decoder"]["class_count"].get<int>();
  cfg.decoder.mask_threshold = j["decoder"]["mask_threshold"].get<double>();
  cfg.decoder.seed = j["decoder"]["seed"].get<uint64_t>();
  cfg.loss.cls = j["loss"]["cls"].get<double>();
  cfg.loss.bce = j["loss"]["bce"].get<double>();
  cfg.loss.dice = j["loss"]["dice"].get<double>();
  cfg.loss.sem = j["loss"]["sem"].get<double>();
  cfg.prior = j["prior"].get<std::string>() == "with_layer_prior"
                  ? PriorMode::WithLayerPrior
                  : PriorMode::WithoutPrior;
  return cfg;
}

}  // namespace

void SpottingModel::save(const std::string& prefix) const {
  const nn::ParamList list = params();
  json manifest;
  manifest["format"] = "vecspot-checkpoint-v1";
  manifest["data_file"] = prefix.substr(prefix.find_last_of('/') + 1) + ".weights.bin";
  manifest["config"] = config_to_json(cfg_);
  manifest["tensors"] = json::array();

  std::ofstream bin(prefix + ".weights.bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("cannot write " + prefix + ".weights.bin");
  uint64_t offset = 0;
  for (const auto& [name, tensor] : list) {
    const Mat& v = tensor.val();
    manifest["tensors"].push_back(
        {{"name", name}, {"rows", v.rows}, {"cols", v.cols}, {"offset", offset}});
    bin.write(reinterpret_cast<const char*>(v.a.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
    offset += v.size() * sizeof(double);
  }
  bin.close();

  std::ofstream mf(prefix + ".manifest.json", std::ios::binary | std::ios::trunc);
  if (!mf) throw std::runtime_error("cannot write " + prefix + ".manifest.json");
  mf << manifest.dump(2) << "\n";
}

SpottingModel SpottingModel::load(const std::string& prefix) {
  std::ifstream mf(prefix + ".manifest.json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot open " + prefix + ".manifest.json");
  std::ostringstream ss;
  ss << mf.rdbuf();
  const json manifest = json::parse(ss.str());
  if (manifest["format"].get<std::string>() != "vecspot-checkpoint-v1") {
    throw std::runtime_error("unsupported checkpoint format");
  }
  SpottingModel model(config_from_json(manifest["config"]));

  std::ifstream bin(prefix + ".weights.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + prefix + ".weights.bin");
  nn::ParamList list = model.params();
  if (manifest["tensors"].size() != list.size()) {
    throw std::runtime_error("checkpoint tensor count mismatch");
  }
  for (size_t i = 0; i < list.size(); ++i) {
    const json& t = manifest["tensors"][i];
    auto& [name, tensor] = list[i];
    if (t["name"].get<std::string>() != name ||
        t["rows"].get<int>() != tensor.val().rows ||
        t["cols"].get<int>() != tensor.val().cols) {
      throw std::runtime_error("checkpoint tensor mismatch at " + name);
    }
    bin.seekg(static_cast<std::streamoff>(t["offset"].get<uint64_t>()));
    Mat& v = tensor.value_mut();
    bin.read(reinterpret_cast<char*>(v.a.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("checkpoint truncated at " + name);
  }
  return model;
}

}  // namespace vecspot
