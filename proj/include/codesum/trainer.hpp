#pragma once

#include <functional>
#include <vector>

#include "json.hpp"

#include "codesum/config.hpp"
#include "codesum/corpus.hpp"
#include "codesum/decoder.hpp"
#include "codesum/eval.hpp"
#include "codesum/model.hpp"
#include "codesum/random.hpp"
#include "codesum/vocabulary.hpp"

namespace codesum {

// Target-token counts over the training names, by vocabulary id (</s> once per name).
std::vector<std::size_t> count_name_tokens(const std::vector<MethodExample>& train,
                                           const Vocabulary& vocab);

// Weights ~ Normal(0, init_std^2); the output bias holds add-one smoothed
// log-frequencies of the target tokens; the PReLU leak starts at 0.25.
ModelParams init_params(const TrainConfig& cfg, const Vocabulary& vocab,
                        const std::vector<std::size_t>& name_counts, Rng& rng);

// Per-parameter RMS accumulator and momentum buffer.
struct OptimizerState {
  std::vector<Tensor> mean_square;
  std::vector<Tensor> velocity;
  std::size_t skipped = 0;  // updates rejected for non-finite gradients

  static OptimizerState for_params(const ModelParams& p);
};

// Update, per entry, after clipping the global gradient norm to clip_norm:
//   a <- rho * a + (1 - rho) * g^2
//   s <- g / sqrt(a + eps)
//   v <- mu * v - lr * s
//   theta <- theta + mu * v - lr * s      (Nesterov look-ahead form)
// Returns false and leaves everything untouched when the gradient is not finite.
bool sgd_update(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                const TrainConfig& cfg);

// Global L2 norm over all gradient tensors.
double global_norm(const ModelParams& grads);

struct EpochLog {
  std::size_t epoch = 0;
  double train_nll = 0.0;
  double valid_f1_at_5 = 0.0;
  double valid_exact_at_1 = 0.0;
  double seconds = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  ModelParams params;  // best validation checkpoint
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  std::size_t skipped_updates = 0;
};

struct EncodedExample {
  EncodedSnippet snippet;
  EncodedName name;
  const MethodExample* source = nullptr;
};

std::vector<EncodedExample> encode_examples(const std::vector<MethodExample>& examples,
                                            const Vocabulary& vocab);

// Evaluates a model by decoding k suggestions per example.
EvalReport evaluate_model(const ModelParams& p, const Vocabulary& vocab,
                          const std::vector<MethodExample>& examples,
                          const SearchLimits& limits = {}, std::size_t threads = 1,
                          std::vector<std::vector<Suggestion>>* suggestions_out = nullptr);

// Called after every epoch; returning false stops training.
using EpochCallback = std::function<bool(const EpochLog&)>;

// Maximum-likelihood training with early stopping on validation F1@5.
// Throws Error(kEmptyTrainingSet) when train is empty.
TrainResult train(const std::vector<MethodExample>& train, const std::vector<MethodExample>& valid,
                  const Vocabulary& vocab, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// One epoch-independent training step on a single example; returns its NLL.
// Exposed for tests: applies dropout per cfg and accumulates into grad.
double example_gradient(const ModelParams& params, const EncodedExample& ex,
                        const TrainConfig& cfg, Rng& rng, ModelParams& grad);

}  // namespace codesum
