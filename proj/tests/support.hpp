#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "codesum/config.hpp"
#include "codesum/corpus.hpp"
#include "codesum/decoder.hpp"
#include "codesum/model.hpp"
#include "codesum/ops.hpp"
#include "codesum/random.hpp"
#include "codesum/vocabulary.hpp"

namespace codesum::testing {

inline Vocabulary make_vocab(const std::vector<std::string>& extra) {
  std::vector<std::string> tokens;
  for (auto s : Vocabulary::kSpecialTokens) tokens.emplace_back(s);
  tokens.insert(tokens.end(), extra.begin(), extra.end());
  return Vocabulary(std::move(tokens));
}

inline ModelDims tiny_dims(std::size_t d = 2, std::size_t k1 = 2, std::size_t k2 = 2,
                           std::size_t w1 = 1, std::size_t w2 = 1, std::size_t w3 = 1) {
  ModelDims dims;
  dims.embedding = d;
  dims.k1 = k1;
  dims.k2 = k2;
  dims.w1 = w1;
  dims.w2 = w2;
  dims.w3 = w3;
  return dims;
}

inline ModelParams random_params(ModelKind kind, StateKind state, const ModelDims& dims,
                                 std::size_t vocab_size, Rng& rng, double stddev = 0.5) {
  ModelParams p = ModelParams::zeros(kind, state, dims, vocab_size);
  for (auto& [name, tensor] : p.named_tensors()) {
    for (double& v : tensor->values()) v = rng.normal(0.0, stddev);
  }
  p.prelu_leak[0] = 0.25 + rng.normal(0.0, 0.05);
  return p;
}

inline Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double stddev = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.normal(0.0, stddev);
  return t;
}

inline Vec random_vec(std::size_t n, Rng& rng, double stddev = 1.0) {
  Vec v(n);
  for (double& x : v) x = rng.normal(0.0, stddev);
  return v;
}

inline bool close_enough(double analytic, double numeric, double rel_tol = 1e-4,
                         double abs_tol = 1e-7) {
  const double diff = std::abs(analytic - numeric);
  if (diff <= abs_tol) return true;
  return diff / std::max(std::abs(analytic), std::abs(numeric)) <= rel_tol;
}

struct GradientReport {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string first_failure;

  bool ok() const { return checked > 0 && failed == 0; }
};

inline void compare_entry(GradientReport& report, const std::string& label, double analytic,
                          double numeric) {
  ++report.checked;
  if (close_enough(analytic, numeric)) return;
  if (report.failed++ == 0) {
    std::ostringstream msg;
    msg.precision(12);
    msg << label << ": analytic " << analytic << " numeric " << numeric;
    report.first_failure = msg.str();
  }
}

// Central differences of loss() against the analytic gradient, for every
// entry of every tensor in values. values is perturbed in place and restored.
inline void check_tensor(GradientReport& report, const std::string& name, Tensor& values,
                         const Tensor& analytic, const std::function<double()>& loss,
                         double step = 1e-5) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + step;
    const double up = loss();
    values[i] = saved - step;
    const double down = loss();
    values[i] = saved;
    compare_entry(report, name + "[" + std::to_string(i) + "]", analytic[i],
                  (up - down) / (2.0 * step));
  }
}

inline void check_vec(GradientReport& report, const std::string& name, Vec& values,
                      const Vec& analytic, const std::function<double()>& loss,
                      double step = 1e-5) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + step;
    const double up = loss();
    values[i] = saved - step;
    const double down = loss();
    values[i] = saved;
    compare_entry(report, name + "[" + std::to_string(i) + "]", analytic.at(i),
                  (up - down) / (2.0 * step));
  }
}

inline GradientReport check_model_gradient(ModelParams& p, const ModelParams& analytic,
                                           const std::function<double()>& loss) {
  GradientReport report;
  auto values = p.named_tensors();
  const auto grads = analytic.named_tensors();
  for (std::size_t t = 0; t < values.size(); ++t) {
    check_tensor(report, values[t].first, *values[t].second, *grads[t].second, loss);
  }
  return report;
}

inline double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * weights[i];
  return s;
}

using NamedReport = std::pair<std::string, GradientReport>;

// Finite-difference checks of every exported differentiable op, each reduced
// to a scalar through a random linear functional.
inline std::vector<NamedReport> op_gradient_checks(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NamedReport> out;

  {
    Tensor x = random_tensor({4, 2}, rng), k = random_tensor({2, 2, 3}, rng);
    const Tensor w = random_tensor({3, 3}, rng);
    auto loss = [&] { return weighted_sum(ops::conv1d_narrow(x, k).values(), w.values()); };
    Tensor gx = Tensor::like(x), gk = Tensor::like(k);
    ops::conv1d_narrow_backward(x, k, w, &gx, &gk);
    GradientReport r;
    check_tensor(r, "input", x, gx, loss);
    check_tensor(r, "kernel", k, gk, loss);
    out.emplace_back("conv1d_narrow", r);
  }
  {
    Vec z = random_vec(5, rng);
    const Vec w = random_vec(5, rng);
    auto loss = [&] { return weighted_sum(ops::softmax(z), w); };
    const Vec g = ops::softmax_backward(ops::softmax(z), w);
    GradientReport r;
    check_vec(r, "z", z, g, loss);
    out.emplace_back("softmax", r);
  }
  {
    GradientReport r;
    for (double x : {-3.0, -0.2, 0.0, 1.7, rng.normal(0.0, 2.0)}) {
      const double fd = (ops::sigmoid(x + 1e-5) - ops::sigmoid(x - 1e-5)) / 2e-5;
      compare_entry(r, "x", ops::sigmoid_grad(x), fd);
    }
    out.emplace_back("sigmoid", r);
  }
  {
    Tensor x = random_tensor({3, 4}, rng);
    const Tensor w = random_tensor({3, 4}, rng);
    Tensor leak({1}, 0.3);
    auto loss = [&] { return weighted_sum(ops::prelu(x, leak[0]).values(), w.values()); };
    Tensor gx = Tensor::like(x), gl({1});
    gl[0] = ops::prelu_backward(x, leak[0], w, &gx);
    GradientReport r;
    check_tensor(r, "x", x, gx, loss);
    check_tensor(r, "leak", leak, gl, loss);
    out.emplace_back("prelu", r);
  }
  {
    Tensor m = random_tensor({3, 4}, rng);
    const Tensor w = random_tensor({3, 4}, rng);
    auto loss = [&] { return weighted_sum(ops::l2_normalize(m).values(), w.values()); };
    Tensor g = Tensor::like(m);
    ops::l2_normalize_backward(m, w, g);
    GradientReport r;
    check_tensor(r, "m", m, g, loss);
    out.emplace_back("l2_normalize", r);
  }
  {
    ops::GruParams p = ops::GruParams::zeros(3, 3);
    auto tensors = [](ops::GruParams& q) {
      return std::vector<std::pair<const char*, Tensor*>>{
          {"w_xr", &q.w_xr}, {"w_hr", &q.w_hr}, {"w_xu", &q.w_xu}, {"w_hu", &q.w_hu},
          {"w_xc", &q.w_xc}, {"w_hc", &q.w_hc}, {"b_r", &q.b_r},   {"b_u", &q.b_u},
          {"b_c", &q.b_c}};
    };
    for (auto& [name, t] : tensors(p)) {
      for (double& v : t->values()) v = rng.normal(0.0, 0.7);
    }
    Vec x = random_vec(3, rng), h = random_vec(3, rng);
    const Vec w = random_vec(3, rng);
    auto loss = [&] { return weighted_sum(ops::gru_step(x, h, p), w); };
    ops::GruTrace trace;
    ops::gru_step(x, h, p, &trace);
    ops::GruParams g = ops::GruParams::zeros(3, 3);
    Vec gx, gh;
    ops::gru_step_backward(trace, p, w, g, &gx, &gh);
    GradientReport r;
    check_vec(r, "x", x, gx, loss);
    check_vec(r, "h_prev", h, gh, loss);
    auto pt = tensors(p), gt = tensors(g);
    for (std::size_t i = 0; i < pt.size(); ++i) check_tensor(r, pt[i].first, *pt[i].second, *gt[i].second, loss);
    out.emplace_back("gru_step", r);
  }
  return out;
}

// Full-name NLL gradient check for one model variant on a random tiny instance.
// The snippet holds an out-of-vocabulary subtoken and the target copies it.
inline GradientReport sequence_gradient_check(ModelKind kind, StateKind state,
                                              double predicted_rate, std::uint64_t seed) {
  Rng rng(seed);
  const Vocabulary vocab = make_vocab({"get", "value"});
  ModelParams p = random_params(kind, state, tiny_dims(), vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"value", "zlib"}, vocab);
  const EncodedName name = encode_name({"get", "zlib", "value"}, vocab);

  // Teacher forcing draws from the rng; replay the same stream for every evaluation.
  const std::uint64_t stream = rng.next_u64();
  auto loss = [&] {
    Rng local(stream);
    return sequence_nll(p, c, name, TeacherForcing{predicted_rate, &local});
  };
  ModelParams grad = p.zeros_like();
  {
    Rng local(stream);
    sequence_nll(p, c, name, TeacherForcing{predicted_rate, &local}, &grad);
  }
  return check_model_gradient(p, grad, loss);
}

// All token sequences of length <= max_len over the successor alphabet, ended by
// </s>, scored by chaining the model's merged step distributions.
struct ScoredName {
  std::vector<std::string> name;
  double log_prob;
};

inline void enumerate_names(const ModelParams& p, const Vocabulary& vocab, const EncodedSnippet& c,
                            const SnippetFeatures& f, const RecurrentState& state,
                            std::vector<std::string>& prefix, double log_prob,
                            std::size_t max_len, std::vector<ScoredName>& out) {
  const StepOutput step = model_step(p, c, f, state.h);
  const double end = step.merged.vocab[Vocabulary::kNameEnd];
  if (!prefix.empty() && end > 0.0) out.push_back({prefix, log_prob + std::log(end)});
  if (prefix.size() == max_len) return;
  auto descend = [&](const std::string& token, TokenId id, double prob) {
    if (prob <= 0.0) return;
    prefix.push_back(token);
    enumerate_names(p, vocab, c, f, advance_state(p, state, id), prefix, log_prob + std::log(prob),
                    max_len, out);
    prefix.pop_back();
  };
  for (std::size_t v = 0; v < step.merged.vocab.size(); ++v) {
    const auto id = static_cast<TokenId>(v);
    if (!is_generatable(id) || id == Vocabulary::kNameEnd) continue;
    descend(vocab.token(id), id, step.merged.vocab[v]);
  }
  for (const auto& [token, prob] : step.merged.oov) descend(token, Vocabulary::kUnk, prob);
}

inline std::vector<ScoredName> exhaustive_top_k(const ModelParams& p, const Vocabulary& vocab,
                                                const EncodedSnippet& c, std::size_t k,
                                                std::size_t max_len) {
  const SnippetFeatures f = compute_snippet_features(p, c);
  std::vector<ScoredName> all;
  std::vector<std::string> prefix;
  enumerate_names(p, vocab, c, f, initial_state(p), prefix, 0.0, max_len, all);
  std::ranges::stable_sort(all, [](const ScoredName& a, const ScoredName& b) {
    return a.log_prob > b.log_prob;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// Synthetic method with a name and a distinct body, used by training tests.
inline MethodExample synthetic_example(std::vector<std::string> name, std::vector<std::string> body,
                                       std::string file = "Synthetic.java") {
  MethodExample ex;
  ex.name = std::move(name);
  ex.body = std::move(body);
  ex.file_path = std::move(file);
  ex.project = "synthetic";
  return ex;
}

}  // namespace codesum::testing
