#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "codesum/config.hpp"
#include "codesum/ops.hpp"
#include "codesum/random.hpp"
#include "codesum/tensor.hpp"
#include "codesum/vocabulary.hpp"

namespace codesum {

using ops::Vec;

struct SimpleStateParams {
  Tensor g;  // |V| x D, separate from the attention embedding
  Tensor w;  // k2 x D x 2
};

// All trainable tensors of a conv_attention or copy_attention model.
struct ModelParams {
  ModelKind kind = ModelKind::kCopyAttention;
  StateKind state_kind = StateKind::kGru;
  ModelDims dims;

  Tensor embedding;      // E: |V| x D
  Tensor conv1;          // D x w1 x k1
  Tensor conv2;          // k1 x w2 x k2
  Tensor att_kernel;     // k2 x w3 x 1
  Tensor copy_kernel;    // k2 x w3 x 1, copy_attention only
  Tensor lambda_kernel;  // k2 x w3 x 1, copy_attention only
  ops::GruParams gru;    // GRU state only
  Tensor bias;           // |V|
  Tensor h_init;         // k2, GRU state only
  Tensor prelu_leak;     // 1
  std::optional<SimpleStateParams> simple;

  static ModelParams zeros(ModelKind kind, StateKind state_kind, const ModelDims& dims,
                           std::size_t vocab_size);
  ModelParams zeros_like() const { return zeros(kind, state_kind, dims, vocab_size()); }

  std::size_t vocab_size() const { return embedding.dim(0); }

  // Every allocated tensor with a stable, unique name, in a fixed order.
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
};

// c = [<S>, c_1 .. c_N, </S>]: ids for lookup, surface strings for copying.
struct EncodedSnippet {
  std::vector<TokenId> ids;
  std::vector<std::string> surface;

  std::size_t size() const { return ids.size(); }
};

EncodedSnippet encode_snippet(const std::vector<std::string>& body, const Vocabulary& vocab);

// Prediction targets m_1 .. m_M, </s> (the leading <s> is implicit).
struct EncodedName {
  std::vector<TokenId> ids;
  std::vector<std::string> surface;

  std::size_t size() const { return ids.size(); }
};

EncodedName encode_name(const std::vector<std::string>& name, const Vocabulary& vocab);

// Distribution over V united with the snippet's out-of-vocabulary subtokens.
struct MergedDistribution {
  Vec vocab;                                         // by vocabulary id
  std::vector<std::pair<std::string, double>> oov;   // copy-only subtokens of c

  double total() const;
  // Probability of a surface subtoken (OoV entries matched by string).
  double probability(const std::string& token, const Vocabulary& v) const;
};

struct StepOutput {
  Vec vocab_dist;  // SoftMax(E n^T + b) over V
  Vec alpha;       // Len(c)
  Vec kappa;       // Len(c), copy_attention only
  double lambda = 0.0;
  Vec nhat;        // attention-weighted embedding, D
  MergedDistribution merged;
};

// h-independent part of the attention features: embeddings of the padded
// snippet through both convolutions, before the gate.
struct SnippetFeatures {
  std::vector<TokenId> padded_ids;
  Tensor embedded;   // (Len + pad) x D
  Tensor conv1_out;  // pre-activation
  Tensor layer1;     // PReLU(conv1_out), optionally masked
  Tensor conv2_out;  // (Len + w3 - 1) x k2
  Tensor layer1_mask;  // empty unless activation dropout is active
};

SnippetFeatures compute_snippet_features(const ModelParams& p, const EncodedSnippet& c,
                                         const Tensor* layer1_mask = nullptr);

// L_feat for state h_prev: rows of conv2 output gated by h_prev, then
// normalized by the Frobenius norm of the whole matrix.
Tensor attention_features(const ModelParams& p, const EncodedSnippet& c,
                          std::span<const double> h_prev);
Tensor attention_features(const SnippetFeatures& f, std::span<const double> h_prev);

// SoftMax(Conv1d(L_feat, kernel)).
Vec attention_weights(const Tensor& l_feat, const Tensor& kernel);

StepOutput conv_attention_step(const ModelParams& p, const EncodedSnippet& c,
                               std::span<const double> h_prev);
StepOutput copy_attention_step(const ModelParams& p, const EncodedSnippet& c,
                               std::span<const double> h_prev);

// Dispatches on p.kind, reusing precomputed snippet features.
StepOutput model_step(const ModelParams& p, const EncodedSnippet& c, const SnippetFeatures& f,
                      std::span<const double> h_prev);

inline const double kCopyPenalty = std::exp(-10.0);  // mu
inline constexpr double kLogFloor = 1e-12;

// Marginal probability of target under the model's mixture, with the UNK
// penalty applied when the copy head could have produced the target exactly.
double target_probability(const StepOutput& step, const std::string& target, TokenId target_id,
                          const EncodedSnippet& c, ModelKind kind);
double step_loss(const StepOutput& step, const std::string& target, TokenId target_id,
                 const EncodedSnippet& c, ModelKind kind);

// GRU(x, h_prev) where x is E[token] in test mode; in train mode n-hat is used
// with probability predicted_rate.
Vec next_state(const ModelParams& p, TokenId token, std::span<const double> nhat,
               std::span<const double> h_prev, double predicted_rate = 0.0, Rng* rng = nullptr);

// W x [G_{prev1}, G_{prev2}]. Throws Error(kVariantDisabled) without simple-state params.
Vec simple_state(const ModelParams& p, TokenId prev1, TokenId prev2);

// Decoder-side recurrent state covering both state kinds.
struct RecurrentState {
  Vec h;
  TokenId last = Vocabulary::kNameStart;
  TokenId before_last = Vocabulary::kNameStart;
};

RecurrentState initial_state(const ModelParams& p);
RecurrentState advance_state(const ModelParams& p, const RecurrentState& s, TokenId emitted);

struct TeacherForcing {
  double predicted_rate = 0.0;  // probability of feeding n-hat instead of E[m_t]
  Rng* rng = nullptr;
};

// Negative log-likelihood of the whole name (sum of per-step losses). When
// grad is non-null, accumulates d(nll)/d(params) into it.
double sequence_nll(const ModelParams& p, const EncodedSnippet& c, const EncodedName& target,
                    const TeacherForcing& teacher = {}, ModelParams* grad = nullptr,
                    const Tensor* layer1_mask = nullptr);

}  // namespace codesum
