#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace codesum {

enum class ModelKind { kConvAttention, kCopyAttention };

// kGru: recurrent state from a GRU over emitted subtokens.
// kSimple: state is a bilinear map of the two previous subtokens' G rows.
enum class StateKind { kGru, kSimple };

// kParameter masks weight tensors (DropConnect style); kActivation masks the
// first convolution layer's activations instead.
enum class DropoutMode { kParameter, kActivation };

std::string_view to_string(ModelKind kind);
std::string_view to_string(StateKind kind);
std::string_view to_string(DropoutMode mode);
ModelKind parse_model_kind(std::string_view text);
StateKind parse_state_kind(std::string_view text);
DropoutMode parse_dropout_mode(std::string_view text);

struct ModelDims {
  std::size_t embedding = 128;  // D
  std::size_t k1 = 8;
  std::size_t k2 = 8;
  std::size_t w1 = 24;
  std::size_t w2 = 29;
  std::size_t w3 = 10;

  // PAD slots added around the snippet so the three narrow convolutions
  // return exactly one position per input token.
  std::size_t total_padding() const { return (w1 - 1) + (w2 - 1) + (w3 - 1); }
  std::size_t left_padding() const { return (total_padding() + 1) / 2; }
  std::size_t right_padding() const { return total_padding() / 2; }

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

struct TrainConfig {
  ModelKind model_kind = ModelKind::kCopyAttention;
  StateKind state_kind = StateKind::kGru;
  ModelDims dims;
  double dropout_rate = 0.0;
  DropoutMode dropout_mode = DropoutMode::kParameter;
  double learning_rate = 1e-3;
  double rms_decay = 0.9;
  double momentum = 0.9;
  double epsilon = 1e-6;
  double clip_norm = 5.0;
  double init_std = 0.1;
  std::size_t epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  std::size_t minibatch = 1;
  std::size_t min_count = 2;
  std::size_t max_valid_examples = 0;  // validation examples decoded per epoch, 0 = all

  // Throws Error(kInvalidArgument) on out-of-range values.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// The tuned hyperparameters reported for each model kind.
TrainConfig paper_preset(ModelKind kind);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

}  // namespace codesum
