#include "codesum/config.hpp"

#include "codesum/errors.hpp"

namespace codesum {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kConvAttention ? "conv_attention" : "copy_attention";
}

std::string_view to_string(StateKind kind) { return kind == StateKind::kGru ? "gru" : "simple"; }

std::string_view to_string(DropoutMode mode) {
  return mode == DropoutMode::kParameter ? "parameter" : "activation";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "conv" || text == "conv_attention") return ModelKind::kConvAttention;
  if (text == "copy" || text == "copy_attention") return ModelKind::kCopyAttention;
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind: " + std::string(text));
}

StateKind parse_state_kind(std::string_view text) {
  if (text == "gru") return StateKind::kGru;
  if (text == "simple") return StateKind::kSimple;
  throw Error(ErrorCode::kInvalidArgument, "unknown state kind: " + std::string(text));
}

DropoutMode parse_dropout_mode(std::string_view text) {
  if (text == "parameter") return DropoutMode::kParameter;
  if (text == "activation") return DropoutMode::kActivation;
  throw Error(ErrorCode::kInvalidArgument, "unknown dropout mode: " + std::string(text));
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must be in [0, 1)");
  if (dims.embedding == 0 || dims.k1 == 0 || dims.k2 == 0 || dims.w1 == 0 || dims.w2 == 0 ||
      dims.w3 == 0) {
    fail("model extents must be >= 1");
  }
  if (!(clip_norm > 0.0)) fail("clip_norm must be > 0");
  if (!(learning_rate >= 0.0)) fail("learning_rate must be >= 0");
  if (!(rms_decay >= 0.0 && rms_decay < 1.0)) fail("rms_decay must be in [0, 1)");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must be in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (minibatch == 0) fail("minibatch must be >= 1");
  if (min_count == 0) fail("min_count must be >= 1");
}

TrainConfig paper_preset(ModelKind kind) {
  TrainConfig cfg;
  cfg.model_kind = kind;
  if (kind == ModelKind::kConvAttention) {
    cfg.dims = {.embedding = 128, .k1 = 8, .k2 = 8, .w1 = 24, .w2 = 29, .w3 = 10};
    cfg.dropout_rate = 0.5;
  } else {
    cfg.dims = {.embedding = 128, .k1 = 32, .k2 = 16, .w1 = 18, .w2 = 19, .w3 = 2};
    cfg.dropout_rate = 0.4;
  }
  return cfg;
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {
      {"model_kind", to_string(cfg.model_kind)},
      {"state_kind", to_string(cfg.state_kind)},
      {"D", cfg.dims.embedding},
      {"k1", cfg.dims.k1},
      {"k2", cfg.dims.k2},
      {"w1", cfg.dims.w1},
      {"w2", cfg.dims.w2},
      {"w3", cfg.dims.w3},
      {"dropout_rate", cfg.dropout_rate},
      {"dropout_mode", to_string(cfg.dropout_mode)},
      {"learning_rate", cfg.learning_rate},
      {"rms_decay", cfg.rms_decay},
      {"momentum", cfg.momentum},
      {"epsilon", cfg.epsilon},
      {"clip_norm", cfg.clip_norm},
      {"init_std", cfg.init_std},
      {"epochs", cfg.epochs},
      {"patience", cfg.patience},
      {"seed", cfg.seed},
      {"minibatch", cfg.minibatch},
      {"min_count", cfg.min_count},
      {"max_valid_examples", cfg.max_valid_examples},
  };
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  try {
    cfg.model_kind = parse_model_kind(j.at("model_kind").get<std::string>());
    cfg.state_kind = parse_state_kind(j.at("state_kind").get<std::string>());
    cfg.dims.embedding = j.at("D").get<std::size_t>();
    cfg.dims.k1 = j.at("k1").get<std::size_t>();
    cfg.dims.k2 = j.at("k2").get<std::size_t>();
    cfg.dims.w1 = j.at("w1").get<std::size_t>();
    cfg.dims.w2 = j.at("w2").get<std::size_t>();
    cfg.dims.w3 = j.at("w3").get<std::size_t>();
    cfg.dropout_rate = j.at("dropout_rate").get<double>();
    cfg.dropout_mode = parse_dropout_mode(j.at("dropout_mode").get<std::string>());
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.rms_decay = j.at("rms_decay").get<double>();
    cfg.momentum = j.at("momentum").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.clip_norm = j.at("clip_norm").get<double>();
    cfg.init_std = j.at("init_std").get<double>();
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.patience = j.at("patience").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.minibatch = j.at("minibatch").get<std::size_t>();
    cfg.min_count = j.at("min_count").get<std::size_t>();
    cfg.max_valid_examples = j.value("max_valid_examples", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace codesum
