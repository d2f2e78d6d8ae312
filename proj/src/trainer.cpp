#include "codesum/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "codesum/errors.hpp"

namespace codesum {

namespace {

// Parameter dropout masks weights only; biases, the initial state and the
// PReLU leak are never dropped.
bool is_droppable(const std::string& name) {
  return name != "bias" && name != "h_init" && name != "prelu_leak" && name != "gru.b_r" &&
         name != "gru.b_u" && name != "gru.b_c";
}

}  // namespace

std::vector<std::size_t> count_name_tokens(const std::vector<MethodExample>& train,
                                           const Vocabulary& vocab) {
  std::vector<std::size_t> counts(vocab.size(), 0);
  for (const MethodExample& ex : train) {
    for (const auto& s : ex.name) ++counts[static_cast<std::size_t>(vocab.id(s))];
    ++counts[Vocabulary::kNameEnd];
  }
  return counts;
}

ModelParams init_params(const TrainConfig& cfg, const Vocabulary& vocab,
                        const std::vector<std::size_t>& name_counts, Rng& rng) {
  cfg.validate();
  if (name_counts.size() != vocab.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "name counts do not match the vocabulary");
  }
  ModelParams p = ModelParams::zeros(cfg.model_kind, cfg.state_kind, cfg.dims, vocab.size());
  for (auto& [name, tensor] : p.named_tensors()) {
    for (double& v : tensor->values()) v = rng.normal(0.0, cfg.init_std);
  }
  double total = 0.0;
  for (std::size_t c : name_counts) total += static_cast<double>(c);
  const double denom = total + static_cast<double>(vocab.size());
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    p.bias[v] = std::log((static_cast<double>(name_counts[v]) + 1.0) / denom);
  }
  p.prelu_leak[0] = 0.25;
  return p;
}

OptimizerState OptimizerState::for_params(const ModelParams& p) {
  OptimizerState s;
  for (const auto& [name, tensor] : p.named_tensors()) {
    s.mean_square.push_back(Tensor::like(*tensor));
    s.velocity.push_back(Tensor::like(*tensor));
  }
  return s;
}

double global_norm(const ModelParams& grads) {
  double sq = 0.0;
  for (const auto& [name, tensor] : grads.named_tensors()) sq += tensor->squared_norm();
  return std::sqrt(sq);
}

bool sgd_update(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                const TrainConfig& cfg) {
  const double norm = global_norm(grads);
  if (!std::isfinite(norm)) {
    ++state.skipped;
    return false;
  }
  const double scale = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;
  const auto targets = params.named_tensors();
  const auto sources = grads.named_tensors();
  if (targets.size() != sources.size() || targets.size() != state.velocity.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "optimizer state does not match parameters");
  }
  const double rho = cfg.rms_decay;
  const double mu = cfg.momentum;
  const double lr = cfg.learning_rate;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    Tensor& theta = *targets[t].second;
    const Tensor& g = *sources[t].second;
    Tensor& a = state.mean_square[t];
    Tensor& v = state.velocity[t];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = g[i] * scale;
      a[i] = rho * a[i] + (1.0 - rho) * gi * gi;
      const double step = gi / std::sqrt(a[i] + cfg.epsilon);
      v[i] = mu * v[i] - lr * step;
      theta[i] += mu * v[i] - lr * step;
    }
  }
  return true;
}

nlohmann::json EpochLog::to_json() const {
  return {{"epoch", epoch},
          {"train_nll", train_nll},
          {"valid_f1_at_5", valid_f1_at_5},
          {"valid_exact_at_1", valid_exact_at_1},
          {"seconds", seconds}};
}

std::vector<EncodedExample> encode_examples(const std::vector<MethodExample>& examples,
                                            const Vocabulary& vocab) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const MethodExample& ex : examples) {
    out.push_back({encode_snippet(ex.body, vocab), encode_name(ex.name, vocab), &ex});
  }
  return out;
}

double example_gradient(const ModelParams& params, const EncodedExample& ex,
                        const TrainConfig& cfg, Rng& rng, ModelParams& grad) {
  const double rate = cfg.dropout_rate;
  const TeacherForcing teacher{rate, &rng};
  if (rate <= 0.0) return sequence_nll(params, ex.snippet, ex.name, teacher, &grad);

  const double keep_scale = 1.0 / (1.0 - rate);
  if (cfg.dropout_mode == DropoutMode::kActivation) {
    const ModelDims& d = params.dims;
    const std::size_t rows = ex.snippet.size() + d.total_padding() - d.w1 + 1;
    Tensor mask({rows, d.k1});
    for (double& m : mask.values()) m = rng.bernoulli(rate) ? 0.0 : keep_scale;
    return sequence_nll(params, ex.snippet, ex.name, teacher, &grad, &mask);
  }

  ModelParams dropped = params;
  std::vector<Tensor> masks;
  for (auto& [name, tensor] : dropped.named_tensors()) {
    if (!is_droppable(name)) {
      masks.emplace_back();
      continue;
    }
    Tensor mask = Tensor::like(*tensor);
    for (std::size_t i = 0; i < tensor->size(); ++i) {
      mask[i] = rng.bernoulli(rate) ? 0.0 : keep_scale;
      (*tensor)[i] *= mask[i];
    }
    masks.push_back(std::move(mask));
  }
  ModelParams local = params.zeros_like();
  const double nll = sequence_nll(dropped, ex.snippet, ex.name, teacher, &local);
  auto out = grad.named_tensors();
  auto in = local.named_tensors();
  for (std::size_t t = 0; t < out.size(); ++t) {
    Tensor& dst = *out[t].second;
    const Tensor& src = *in[t].second;
    if (masks[t].empty()) {
      dst.add_scaled(src, 1.0);
    } else {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] * masks[t][i];
    }
  }
  return nll;
}

EvalReport evaluate_model(const ModelParams& p, const Vocabulary& vocab,
                          const std::vector<MethodExample>& examples, const SearchLimits& limits,
                          std::size_t threads,
                          std::vector<std::vector<Suggestion>>* suggestions_out) {
  std::vector<ExampleScore> scores(examples.size());
  std::vector<std::vector<Suggestion>> all(examples.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < examples.size(); i += stride) {
      const EncodedSnippet c = encode_snippet(examples[i].body, vocab);
      all[i] = suggest(p, vocab, c, 5, limits);
      std::vector<Name> names;
      for (const Suggestion& s : all[i]) names.push_back(s.name);
      scores[i] = score_example(names, examples[i].name, vocab);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, examples.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  if (suggestions_out) *suggestions_out = std::move(all);
  return aggregate(scores);
}

TrainResult train(const std::vector<MethodExample>& train_set,
                  const std::vector<MethodExample>& valid, const Vocabulary& vocab,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training examples");
  Rng rng(cfg.seed);
  TrainResult result;
  ModelParams params = init_params(cfg, vocab, count_name_tokens(train_set, vocab), rng);
  OptimizerState opt = OptimizerState::for_params(params);
  const std::vector<EncodedExample> encoded = encode_examples(train_set, vocab);

  std::vector<MethodExample> valid_subset = valid;
  if (cfg.max_valid_examples > 0 && valid_subset.size() > cfg.max_valid_examples) {
    valid_subset.resize(cfg.max_valid_examples);
  }

  std::vector<std::size_t> order(encoded.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  ModelParams grad = params.zeros_like();
  double best_f1 = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  result.params = params;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    rng.shuffle(order);
    double total_nll = 0.0;
    std::size_t in_batch = 0;
    for (std::size_t n = 0; n < order.size(); ++n) {
      total_nll += example_gradient(params, encoded[order[n]], cfg, rng, grad);
      ++in_batch;
      if (in_batch == cfg.minibatch || n + 1 == order.size()) {
        if (in_batch > 1) {
          for (auto& [name, tensor] : grad.named_tensors()) {
            for (double& v : tensor->values()) v /= static_cast<double>(in_batch);
          }
        }
        sgd_update(params, grad, opt, cfg);
        for (auto& [name, tensor] : grad.named_tensors()) tensor->fill(0.0);
        in_batch = 0;
      }
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_nll = total_nll / static_cast<double>(order.size());
    bool improved = true;
    if (!valid_subset.empty()) {
      const EvalReport report = evaluate_model(params, vocab, valid_subset);
      log.valid_f1_at_5 = report.f1_at_5;
      log.valid_exact_at_1 = report.exact_at_1;
      improved = report.f1_at_5 > best_f1;
    }
    log.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(log);
    const bool keep_going = !on_epoch || on_epoch(log);

    if (improved) {
      best_f1 = valid_subset.empty() ? best_f1 : log.valid_f1_at_5;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
    if (!keep_going) break;
  }
  result.skipped_updates = opt.skipped;
  return result;
}

}  // namespace codesum
