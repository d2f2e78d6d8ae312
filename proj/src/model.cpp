#include "codesum/model.hpp"

#include <algorithm>
#include <unordered_map>

#include "codesum/errors.hpp"

namespace codesum {

namespace {

Tensor kernel(std::size_t in, std::size_t width, std::size_t out) { return Tensor({in, width, out}); }

// Row-wise gate: out[p, j] = m[p, j] * h[j].
Tensor gate_rows(const Tensor& m, std::span<const double> h) {
  if (m.dim(1) != h.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "state width " + std::to_string(h.size()) + " vs features " + m.shape_string());
  }
  Tensor out = m;
  for (std::size_t p = 0; p < out.dim(0); ++p) {
    auto row = out.row(p);
    for (std::size_t j = 0; j < h.size(); ++j) row[j] *= h[j];
  }
  return out;
}

Vec column(const Tensor& m) { return {m.values().begin(), m.values().end()}; }

// Everything a step computes, kept so the backward pass can replay it.
struct StepTrace {
  Vec h_prev;
  Tensor gated;
  Tensor l_feat;
  Vec lambda_logits;
  std::size_t lambda_pos = 0;
  StepOutput out;
};

StepOutput evaluate_step(const ModelParams& p, const EncodedSnippet& c, const SnippetFeatures& f,
                         std::span<const double> h_prev, bool with_merged, StepTrace* trace) {
  ops::check_finite(h_prev, "recurrent state");
  Tensor gated = gate_rows(f.conv2_out, h_prev);
  Tensor l_feat = ops::l2_normalize(gated);
  const std::size_t len = c.size();
  const std::size_t dim = p.dims.embedding;

  StepOutput out;
  out.alpha = attention_weights(l_feat, p.att_kernel);
  Vec lambda_logits;
  std::size_t lambda_pos = 0;
  if (p.kind == ModelKind::kCopyAttention) {
    out.kappa = attention_weights(l_feat, p.copy_kernel);
    lambda_logits = column(ops::conv1d_narrow(l_feat, p.lambda_kernel));
    lambda_pos = static_cast<std::size_t>(
        std::ranges::max_element(lambda_logits) - lambda_logits.begin());
    out.lambda = ops::sigmoid(lambda_logits[lambda_pos]);
  }
  if (out.alpha.size() != len) {
    throw Error(ErrorCode::kDimensionMismatch, "attention length differs from snippet length");
  }

  out.nhat.assign(dim, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const auto e = p.embedding.row(static_cast<std::size_t>(c.ids[i]));
    for (std::size_t d = 0; d < dim; ++d) out.nhat[d] += out.alpha[i] * e[d];
  }
  const std::size_t vocab = p.vocab_size();
  Vec logits(vocab);
  for (std::size_t v = 0; v < vocab; ++v) {
    const auto e = p.embedding.row(v);
    double acc = p.bias[v];
    for (std::size_t d = 0; d < dim; ++d) acc += e[d] * out.nhat[d];
    logits[v] = acc;
  }
  out.vocab_dist = ops::softmax(logits);

  if (with_merged) {
    out.merged.vocab = out.vocab_dist;
    if (p.kind == ModelKind::kCopyAttention) {
      for (double& v : out.merged.vocab) v *= 1.0 - out.lambda;
      std::unordered_map<std::string, std::size_t> oov_index;
      for (std::size_t i = 0; i < len; ++i) {
        const double mass = out.lambda * out.kappa[i];
        const bool oov = c.ids[i] == Vocabulary::kUnk &&
                         c.surface[i] != Vocabulary::kSpecialTokens[Vocabulary::kUnk];
        if (!oov) {
          out.merged.vocab[static_cast<std::size_t>(c.ids[i])] += mass;
          continue;
        }
        const auto [it, inserted] = oov_index.emplace(c.surface[i], out.merged.oov.size());
        if (inserted) out.merged.oov.emplace_back(c.surface[i], 0.0);
        out.merged.oov[it->second].second += mass;
      }
    }
  }

  if (trace) {
    trace->h_prev.assign(h_prev.begin(), h_prev.end());
    trace->gated = std::move(gated);
    trace->l_feat = std::move(l_feat);
    trace->lambda_logits = std::move(lambda_logits);
    trace->lambda_pos = lambda_pos;
    trace->out = out;
  }
  return out;
}

// Backward of one step's loss. d_prob is d(loss)/d(P). Accumulates parameter
// gradients, the gradient of the (ungated) conv2 output and d/dh_prev.
void step_backward(const ModelParams& p, const EncodedSnippet& c, const SnippetFeatures& f,
                   const StepTrace& t, double d_prob, const std::string& target, TokenId target_id,
                   std::span<const double> extra_dnhat, ModelParams& g, Tensor& d_conv2_out,
                   Vec& d_h_prev) {
  const StepOutput& s = t.out;
  const std::size_t len = c.size();
  const std::size_t dim = p.dims.embedding;
  const std::size_t vocab = p.vocab_size();
  const auto tid = static_cast<std::size_t>(target_id);

  double d_r = 0.0;
  Vec d_kappa;
  double d_lambda = 0.0;
  if (p.kind == ModelKind::kCopyAttention) {
    double copy_mass = 0.0;
    bool copyable = false;
    for (std::size_t i = 0; i < len; ++i) {
      if (c.surface[i] == target) {
        copy_mass += s.kappa[i];
        copyable = true;
      }
    }
    const double mu = (target_id == Vocabulary::kUnk && copyable) ? kCopyPenalty : 1.0;
    const double r = s.vocab_dist[tid];
    d_lambda = d_prob * (copy_mass - mu * r);
    d_r = d_prob * (1.0 - s.lambda) * mu;
    d_kappa.assign(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      if (c.surface[i] == target) d_kappa[i] = d_prob * s.lambda;
    }
  } else {
    d_r = d_prob;
  }

  // vocab softmax: dz_v = d_r * r * (delta_v,tid - n_v)
  const double r = s.vocab_dist[tid];
  Vec d_nhat(extra_dnhat.begin(), extra_dnhat.end());
  d_nhat.resize(dim, 0.0);
  for (std::size_t v = 0; v < vocab; ++v) {
    const double dz = d_r * r * ((v == tid ? 1.0 : 0.0) - s.vocab_dist[v]);
    if (dz == 0.0) continue;
    g.bias[v] += dz;
    auto ge = g.embedding.row(v);
    const auto e = p.embedding.row(v);
    for (std::size_t d = 0; d < dim; ++d) {
      ge[d] += dz * s.nhat[d];
      d_nhat[d] += dz * e[d];
    }
  }

  // n-hat = sum_i alpha_i E[c_i]
  Vec d_alpha(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const auto row = static_cast<std::size_t>(c.ids[i]);
    const auto e = p.embedding.row(row);
    auto ge = g.embedding.row(row);
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      acc += e[d] * d_nhat[d];
      ge[d] += s.alpha[i] * d_nhat[d];
    }
    d_alpha[i] = acc;
  }

  Tensor d_lfeat = Tensor::like(t.l_feat);
  const auto backprop_head = [&](const Vec& probs, const Vec& d_probs, const Tensor& kern,
                                 Tensor& g_kern) {
    const Vec d_logits = ops::softmax_backward(probs, d_probs);
    const Tensor d_out({len, 1}, d_logits);
    ops::conv1d_narrow_backward(t.l_feat, kern, d_out, &d_lfeat, &g_kern);
  };
  backprop_head(s.alpha, d_alpha, p.att_kernel, g.att_kernel);
  if (p.kind == ModelKind::kCopyAttention) {
    backprop_head(s.kappa, d_kappa, p.copy_kernel, g.copy_kernel);
    Tensor d_out({len, 1});
    d_out[t.lambda_pos] = d_lambda * s.lambda * (1.0 - s.lambda);
    ops::conv1d_narrow_backward(t.l_feat, p.lambda_kernel, d_out, &d_lfeat, &g.lambda_kernel);
  }

  Tensor d_gated = Tensor::like(t.gated);
  ops::l2_normalize_backward(t.gated, d_lfeat, d_gated);
  const std::size_t k2 = p.dims.k2;
  d_h_prev.resize(k2, 0.0);
  for (std::size_t pos = 0; pos < d_gated.dim(0); ++pos) {
    const auto dg = d_gated.row(pos);
    const auto a2 = f.conv2_out.row(pos);
    auto da2 = d_conv2_out.row(pos);
    for (std::size_t j = 0; j < k2; ++j) {
      da2[j] += dg[j] * t.h_prev[j];
      d_h_prev[j] += dg[j] * a2[j];
    }
  }
}

void simple_state_backward(const ModelParams& p, TokenId prev1, TokenId prev2,
                           std::span<const double> d_h, ModelParams& g) {
  const SimpleStateParams& s = *p.simple;
  SimpleStateParams& gs = *g.simple;
  const std::size_t dim = p.dims.embedding;
  const auto g1 = s.g.row(static_cast<std::size_t>(prev1));
  const auto g2 = s.g.row(static_cast<std::size_t>(prev2));
  auto dg1 = gs.g.row(static_cast<std::size_t>(prev1));
  auto dg2 = gs.g.row(static_cast<std::size_t>(prev2));
  for (std::size_t j = 0; j < d_h.size(); ++j) {
    for (std::size_t d = 0; d < dim; ++d) {
      gs.w(j, d, 0) += d_h[j] * g1[d];
      gs.w(j, d, 1) += d_h[j] * g2[d];
      dg1[d] += d_h[j] * s.w(j, d, 0);
      dg2[d] += d_h[j] * s.w(j, d, 1);
    }
  }
}

}  // namespace

ModelParams ModelParams::zeros(ModelKind kind, StateKind state_kind, const ModelDims& dims,
                               std::size_t vocab_size) {
  ModelParams p;
  p.kind = kind;
  p.state_kind = state_kind;
  p.dims = dims;
  p.embedding = Tensor({vocab_size, dims.embedding});
  p.conv1 = kernel(dims.embedding, dims.w1, dims.k1);
  p.conv2 = kernel(dims.k1, dims.w2, dims.k2);
  p.att_kernel = kernel(dims.k2, dims.w3, 1);
  if (kind == ModelKind::kCopyAttention) {
    p.copy_kernel = kernel(dims.k2, dims.w3, 1);
    p.lambda_kernel = kernel(dims.k2, dims.w3, 1);
  }
  if (state_kind == StateKind::kGru) {
    p.gru = ops::GruParams::zeros(dims.embedding, dims.k2);
    p.h_init = Tensor({dims.k2});
  } else {
    p.simple = SimpleStateParams{Tensor({vocab_size, dims.embedding}),
                                 Tensor({dims.k2, dims.embedding, 2})};
  }
  p.bias = Tensor({vocab_size});
  p.prelu_leak = Tensor({1});
  return p;
}

namespace {

template <typename Params, typename Out>
void collect_tensors(Params& p, Out& out) {
  auto add = [&](const char* name, auto& t) {
    if (!t.empty()) out.emplace_back(name, &t);
  };
  add("embedding", p.embedding);
  add("conv1", p.conv1);
  add("conv2", p.conv2);
  add("att_kernel", p.att_kernel);
  add("copy_kernel", p.copy_kernel);
  add("lambda_kernel", p.lambda_kernel);
  add("gru.w_xr", p.gru.w_xr);
  add("gru.w_hr", p.gru.w_hr);
  add("gru.w_xu", p.gru.w_xu);
  add("gru.w_hu", p.gru.w_hu);
  add("gru.w_xc", p.gru.w_xc);
  add("gru.w_hc", p.gru.w_hc);
  add("gru.b_r", p.gru.b_r);
  add("gru.b_u", p.gru.b_u);
  add("gru.b_c", p.gru.b_c);
  add("bias", p.bias);
  add("h_init", p.h_init);
  add("prelu_leak", p.prelu_leak);
  if (p.simple) {
    add("simple.g", p.simple->g);
    add("simple.w", p.simple->w);
  }
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> ModelParams::named_tensors() {
  std::vector<std::pair<std::string, Tensor*>> out;
  collect_tensors(*this, out);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named_tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  collect_tensors(*this, out);
  return out;
}

EncodedSnippet encode_snippet(const std::vector<std::string>& body, const Vocabulary& vocab) {
  EncodedSnippet c;
  c.ids.reserve(body.size() + 2);
  c.surface.reserve(body.size() + 2);
  c.ids.push_back(Vocabulary::kCodeStart);
  c.surface.push_back(vocab.token(Vocabulary::kCodeStart));
  for (const auto& s : body) {
    c.ids.push_back(vocab.id(s));
    c.surface.push_back(s);
  }
  c.ids.push_back(Vocabulary::kCodeEnd);
  c.surface.push_back(vocab.token(Vocabulary::kCodeEnd));
  return c;
}

EncodedName encode_name(const std::vector<std::string>& name, const Vocabulary& vocab) {
  EncodedName m;
  for (const auto& s : name) {
    m.ids.push_back(vocab.id(s));
    m.surface.push_back(s);
  }
  m.ids.push_back(Vocabulary::kNameEnd);
  m.surface.push_back(vocab.token(Vocabulary::kNameEnd));
  return m;
}

double MergedDistribution::total() const {
  double sum = 0.0;
  for (double v : vocab) sum += v;
  for (const auto& [token, prob] : oov) sum += prob;
  return sum;
}

double MergedDistribution::probability(const std::string& token, const Vocabulary& v) const {
  if (v.contains(token)) return vocab[static_cast<std::size_t>(v.id(token))];
  for (const auto& [t, prob] : oov) {
    if (t == token) return prob;
  }
  return 0.0;
}

SnippetFeatures compute_snippet_features(const ModelParams& p, const EncodedSnippet& c,
                                         const Tensor* layer1_mask) {
  if (c.size() < 1) throw Error(ErrorCode::kDimensionMismatch, "empty snippet");
  const ModelDims& dims = p.dims;
  if (p.embedding.dim(1) != dims.embedding || p.conv1.dim(0) != dims.embedding ||
      p.conv2.dim(0) != dims.k1 || p.att_kernel.dim(0) != dims.k2) {
    throw Error(ErrorCode::kDimensionMismatch, "model tensors do not chain");
  }
  SnippetFeatures f;
  f.padded_ids.assign(dims.left_padding(), Vocabulary::kPad);
  for (TokenId id : c.ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= p.vocab_size()) {
      throw Error(ErrorCode::kDimensionMismatch, "token id outside the vocabulary");
    }
    f.padded_ids.push_back(id);
  }
  f.padded_ids.insert(f.padded_ids.end(), dims.right_padding(), Vocabulary::kPad);

  f.embedded = Tensor({f.padded_ids.size(), dims.embedding});
  for (std::size_t i = 0; i < f.padded_ids.size(); ++i) {
    const auto src = p.embedding.row(static_cast<std::size_t>(f.padded_ids[i]));
    std::ranges::copy(src, f.embedded.row(i).begin());
  }
  f.conv1_out = ops::conv1d_narrow(f.embedded, p.conv1);
  f.layer1 = ops::prelu(f.conv1_out, p.prelu_leak[0]);
  if (layer1_mask) {
    if (layer1_mask->shape() != f.layer1.shape()) {
      throw Error(ErrorCode::kDimensionMismatch, "activation mask shape");
    }
    f.layer1_mask = *layer1_mask;
    for (std::size_t i = 0; i < f.layer1.size(); ++i) f.layer1[i] *= (*layer1_mask)[i];
  }
  f.conv2_out = ops::conv1d_narrow(f.layer1, p.conv2);
  return f;
}

Tensor attention_features(const SnippetFeatures& f, std::span<const double> h_prev) {
  return ops::l2_normalize(gate_rows(f.conv2_out, h_prev));
}

Tensor attention_features(const ModelParams& p, const EncodedSnippet& c,
                          std::span<const double> h_prev) {
  return attention_features(compute_snippet_features(p, c), h_prev);
}

Vec attention_weights(const Tensor& l_feat, const Tensor& kernel) {
  return ops::softmax(column(ops::conv1d_narrow(l_feat, kernel)));
}

StepOutput model_step(const ModelParams& p, const EncodedSnippet& c, const SnippetFeatures& f,
                      std::span<const double> h_prev) {
  return evaluate_step(p, c, f, h_prev, /*with_merged=*/true, nullptr);
}

StepOutput conv_attention_step(const ModelParams& p, const EncodedSnippet& c,
                               std::span<const double> h_prev) {
  ModelParams view = p;
  view.kind = ModelKind::kConvAttention;
  const SnippetFeatures f = compute_snippet_features(view, c);
  return evaluate_step(view, c, f, h_prev, true, nullptr);
}

StepOutput copy_attention_step(const ModelParams& p, const EncodedSnippet& c,
                               std::span<const double> h_prev) {
  if (p.kind != ModelKind::kCopyAttention) {
    throw Error(ErrorCode::kVariantDisabled, "model has no copy heads");
  }
  const SnippetFeatures f = compute_snippet_features(p, c);
  return evaluate_step(p, c, f, h_prev, true, nullptr);
}

double target_probability(const StepOutput& step, const std::string& target, TokenId target_id,
                          const EncodedSnippet& c, ModelKind kind) {
  const double r = step.vocab_dist.at(static_cast<std::size_t>(target_id));
  if (kind == ModelKind::kConvAttention) return r;
  double copy_mass = 0.0;
  bool copyable = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.surface[i] == target) {
      copy_mass += step.kappa[i];
      copyable = true;
    }
  }
  const double mu = (target_id == Vocabulary::kUnk && copyable) ? kCopyPenalty : 1.0;
  return step.lambda * copy_mass + (1.0 - step.lambda) * mu * r;
}

double step_loss(const StepOutput& step, const std::string& target, TokenId target_id,
                 const EncodedSnippet& c, ModelKind kind) {
  return -std::log(target_probability(step, target, target_id, c, kind) + kLogFloor);
}

Vec next_state(const ModelParams& p, TokenId token, std::span<const double> nhat,
               std::span<const double> h_prev, double predicted_rate, Rng* rng) {
  if (p.state_kind != StateKind::kGru) {
    throw Error(ErrorCode::kVariantDisabled, "model uses the simple state");
  }
  const bool use_predicted = predicted_rate > 0.0 && rng && rng->bernoulli(predicted_rate);
  if (use_predicted) return ops::gru_step(nhat, h_prev, p.gru);
  return ops::gru_step(p.embedding.row(static_cast<std::size_t>(token)), h_prev, p.gru);
}

Vec simple_state(const ModelParams& p, TokenId prev1, TokenId prev2) {
  if (!p.simple) throw Error(ErrorCode::kVariantDisabled, "model has no simple-state parameters");
  const SimpleStateParams& s = *p.simple;
  const std::size_t k2 = s.w.dim(0);
  const std::size_t dim = s.w.dim(1);
  const auto g1 = s.g.row(static_cast<std::size_t>(prev1));
  const auto g2 = s.g.row(static_cast<std::size_t>(prev2));
  Vec h(k2, 0.0);
  for (std::size_t j = 0; j < k2; ++j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) acc += s.w(j, d, 0) * g1[d] + s.w(j, d, 1) * g2[d];
    h[j] = acc;
  }
  return h;
}

RecurrentState initial_state(const ModelParams& p) {
  RecurrentState s;
  if (p.state_kind == StateKind::kGru) {
    s.h = column(p.h_init);
  } else {
    s.h = simple_state(p, Vocabulary::kNameStart, Vocabulary::kNameStart);
  }
  return s;
}

RecurrentState advance_state(const ModelParams& p, const RecurrentState& s, TokenId emitted) {
  RecurrentState next;
  next.last = emitted;
  next.before_last = s.last;
  if (p.state_kind == StateKind::kGru) {
    next.h = next_state(p, emitted, {}, s.h);
  } else {
    next.h = simple_state(p, next.last, next.before_last);
  }
  return next;
}

double sequence_nll(const ModelParams& p, const EncodedSnippet& c, const EncodedName& target,
                    const TeacherForcing& teacher, ModelParams* grad, const Tensor* layer1_mask) {
  if (target.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty target");
  const SnippetFeatures f = compute_snippet_features(p, c, layer1_mask);
  const std::size_t steps = target.size();
  const bool gru = p.state_kind == StateKind::kGru;

  std::vector<StepTrace> traces(steps);
  std::vector<ops::GruTrace> transitions(steps);  // transitions[t]: state t -> t+1
  std::vector<char> fed_prediction(steps, 0);
  std::vector<double> probs(steps);

  Vec h = gru ? column(p.h_init) : simple_state(p, Vocabulary::kNameStart, Vocabulary::kNameStart);
  double nll = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    evaluate_step(p, c, f, h, /*with_merged=*/false, &traces[t]);
    probs[t] = target_probability(traces[t].out, target.surface[t], target.ids[t], c, p.kind);
    nll -= std::log(probs[t] + kLogFloor);
    if (t + 1 == steps) break;
    if (gru) {
      const bool predicted = teacher.predicted_rate > 0.0 && teacher.rng &&
                             teacher.rng->bernoulli(teacher.predicted_rate);
      fed_prediction[t] = predicted;
      const auto x = predicted ? std::span<const double>(traces[t].out.nhat)
                               : p.embedding.row(static_cast<std::size_t>(target.ids[t]));
      h = ops::gru_step(x, h, p.gru, &transitions[t]);
    } else {
      const TokenId before = t == 0 ? Vocabulary::kNameStart : target.ids[t - 1];
      h = simple_state(p, target.ids[t], before);
    }
  }
  if (!grad) return nll;

  ModelParams& g = *grad;
  Tensor d_conv2_out = Tensor::like(f.conv2_out);
  Vec d_state_from_next(p.dims.k2, 0.0);  // d nll / d state_t via later steps
  Vec d_nhat_from_next;                   // set when n-hat fed the next transition
  for (std::size_t t = steps; t-- > 0;) {
    Vec d_state = d_state_from_next;
    const double d_prob = -1.0 / (probs[t] + kLogFloor);
    step_backward(p, c, f, traces[t], d_prob, target.surface[t], target.ids[t], d_nhat_from_next, g,
                  d_conv2_out, d_state);
    d_nhat_from_next.clear();
    std::ranges::fill(d_state_from_next, 0.0);

    if (gru) {
      if (t == 0) {
        for (std::size_t j = 0; j < d_state.size(); ++j) g.h_init[j] += d_state[j];
        continue;
      }
      Vec d_x;
      ops::gru_step_backward(transitions[t - 1], p.gru, d_state, g.gru, &d_x, &d_state_from_next);
      if (fed_prediction[t - 1]) {
        d_nhat_from_next = std::move(d_x);
      } else {
        auto ge = g.embedding.row(static_cast<std::size_t>(target.ids[t - 1]));
        for (std::size_t d = 0; d < d_x.size(); ++d) ge[d] += d_x[d];
      }
    } else {
      const TokenId prev1 = t == 0 ? Vocabulary::kNameStart : target.ids[t - 1];
      const TokenId prev2 = t <= 1 ? Vocabulary::kNameStart : target.ids[t - 2];
      simple_state_backward(p, prev1, prev2, d_state, g);
    }
  }

  // Shared, h-independent layers.
  Tensor d_layer1 = Tensor::like(f.layer1);
  ops::conv1d_narrow_backward(f.layer1, p.conv2, d_conv2_out, &d_layer1, &g.conv2);
  if (!f.layer1_mask.empty()) {
    for (std::size_t i = 0; i < d_layer1.size(); ++i) d_layer1[i] *= f.layer1_mask[i];
  }
  Tensor d_conv1_out = Tensor::like(f.conv1_out);
  g.prelu_leak[0] += ops::prelu_backward(f.conv1_out, p.prelu_leak[0], d_layer1, &d_conv1_out);
  Tensor d_embedded = Tensor::like(f.embedded);
  ops::conv1d_narrow_backward(f.embedded, p.conv1, d_conv1_out, &d_embedded, &g.conv1);
  for (std::size_t i = 0; i < f.padded_ids.size(); ++i) {
    auto ge = g.embedding.row(static_cast<std::size_t>(f.padded_ids[i]));
    const auto de = d_embedded.row(i);
    for (std::size_t d = 0; d < ge.size(); ++d) ge[d] += de[d];
  }
  return nll;
}

}  // namespace codesum
