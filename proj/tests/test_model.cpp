#include "doctest.h"

#include "codesum/errors.hpp"
#include "support.hpp"

using namespace codesum;
using namespace codesum::testing;

TEST_CASE("padding splits the total with the larger half on the left") {
  ModelDims dims;
  dims.w1 = 24;
  dims.w2 = 29;
  dims.w3 = 10;
  CHECK(dims.total_padding() == 60);
  CHECK(dims.left_padding() == 30);
  CHECK(dims.right_padding() == 30);
  dims.w3 = 11;
  CHECK(dims.left_padding() == 31);
  CHECK(dims.right_padding() == 30);
}

TEST_CASE("encoding wraps snippets and names in sentinels") {
  const Vocabulary vocab = make_vocab({"get", "value"});
  const EncodedSnippet c = encode_snippet({"value", "zlib"}, vocab);
  REQUIRE(c.size() == 4);
  CHECK(c.ids.front() == Vocabulary::kCodeStart);
  CHECK(c.ids.back() == Vocabulary::kCodeEnd);
  CHECK(c.ids[2] == Vocabulary::kUnk);
  CHECK(c.surface[2] == "zlib");

  const EncodedName m = encode_name({"get", "value"}, vocab);
  REQUIRE(m.size() == 3);
  CHECK(m.ids.back() == Vocabulary::kNameEnd);
}

TEST_CASE("attention has one weight per snippet token for wide preset windows") {
  Rng rng(11);
  const std::vector<std::string> body = {"this", ".", "use", "browser", "cache", "=",
                                         "use", "browser", "cache", ";", "}"};
  const Vocabulary vocab = make_vocab({"use", "browser", "cache"});
  ModelDims dims = tiny_dims(4, 3, 3, 24, 29, 10);
  const ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kGru, dims,
                                      vocab.size(), rng, 0.1);
  const EncodedSnippet c = encode_snippet(body, vocab);
  REQUIRE(c.size() == 13);
  const StepOutput out = copy_attention_step(p, c, random_vec(3, rng));
  CHECK(out.alpha.size() == 13);
  CHECK(out.kappa.size() == 13);
}

TEST_CASE("zero state gates the features to zero and flattens attention") {
  Rng rng(12);
  const Vocabulary vocab = make_vocab({"a", "b"});
  const ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kGru,
                                      tiny_dims(3, 2, 2, 2, 3, 2), vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"a", "b", "x"}, vocab);
  const Vec zero(2, 0.0);
  const Tensor feat = attention_features(p, c, zero);
  for (double v : feat.values()) CHECK(v == 0.0);
  const StepOutput out = copy_attention_step(p, c, zero);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(out.alpha[i] == doctest::Approx(1.0 / c.size()));
    CHECK(out.kappa[i] == doctest::Approx(1.0 / c.size()));
  }
}

TEST_CASE("zero attention kernel gives uniform weights") {
  Rng rng(13);
  const Tensor feat = random_tensor({6, 2}, rng);
  const Vec a = attention_weights(feat, Tensor({2, 1, 1}));
  for (double v : a) CHECK(v == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("attention features match a straight-line evaluation") {
  Rng rng(14);
  const Vocabulary vocab = make_vocab({"a", "b"});
  const ModelParams p = random_params(ModelKind::kConvAttention, StateKind::kGru, tiny_dims(),
                                      vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"a", "b"}, vocab);
  const Vec h = random_vec(2, rng);
  const Tensor feat = attention_features(p, c, h);

  // w1 = w2 = w3 = 1: no padding, each position is independent.
  const double leak = p.prelu_leak[0];
  std::vector<std::array<double, 2>> l2(c.size());
  double norm = 0.0;
  for (std::size_t pos = 0; pos < c.size(); ++pos) {
    const auto e = p.embedding.row(static_cast<std::size_t>(c.ids[pos]));
    std::array<double, 2> l1{};
    for (std::size_t o = 0; o < 2; ++o) {
      const double z = e[0] * p.conv1(0, 0, o) + e[1] * p.conv1(1, 0, o);
      l1[o] = z > 0 ? z : leak * z;
    }
    for (std::size_t o = 0; o < 2; ++o) {
      l2[pos][o] = (l1[0] * p.conv2(0, 0, o) + l1[1] * p.conv2(1, 0, o)) * h[o];
      norm += l2[pos][o] * l2[pos][o];
    }
  }
  norm = std::sqrt(norm) + 1e-8;
  for (std::size_t pos = 0; pos < c.size(); ++pos)
    for (std::size_t o = 0; o < 2; ++o) CHECK(feat(pos, o) == doctest::Approx(l2[pos][o] / norm).epsilon(1e-12));

  const StepOutput step = conv_attention_step(p, c, h);
  Vec logits(c.size());
  for (std::size_t pos = 0; pos < c.size(); ++pos) logits[pos] = feat(pos, 0) * p.att_kernel(0, 0, 0) + feat(pos, 1) * p.att_kernel(1, 0, 0);
  const Vec alpha = ops::softmax(logits);
  Vec nhat(2, 0.0);
  for (std::size_t pos = 0; pos < c.size(); ++pos) {
    CHECK(step.alpha[pos] == doctest::Approx(alpha[pos]).epsilon(1e-12));
    for (std::size_t d = 0; d < 2; ++d) nhat[d] += alpha[pos] * p.embedding(static_cast<std::size_t>(c.ids[pos]), d);
  }
  Vec scores(vocab.size());
  for (std::size_t v = 0; v < vocab.size(); ++v) scores[v] = p.embedding(v, 0) * nhat[0] + p.embedding(v, 1) * nhat[1] + p.bias[v];
  const Vec dist = ops::softmax(scores);
  for (std::size_t v = 0; v < vocab.size(); ++v) CHECK(step.vocab_dist[v] == doctest::Approx(dist[v]).epsilon(1e-12));
}

TEST_CASE("copy step is disabled on a conv model") {
  Rng rng(15);
  const Vocabulary vocab = make_vocab({"a"});
  const ModelParams p = random_params(ModelKind::kConvAttention, StateKind::kGru, tiny_dims(),
                                      vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"a"}, vocab);
  try {
    copy_attention_step(p, c, Vec{0.1, 0.2});
    FAIL("expected VariantDisabled");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVariantDisabled);
  }
}

TEST_CASE("merged distribution endpoints and Pos2Voc aggregation") {
  Rng rng(16);
  const Vocabulary vocab = make_vocab({"use", "browser"});
  ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kGru, tiny_dims(),
                                vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"use", "zlib", "zlib", "browser"}, vocab);
  const Vec h = random_vec(2, rng);

  p.lambda_kernel.fill(0.0);
  const StepOutput base = copy_attention_step(p, c, h);
  CHECK(base.lambda == doctest::Approx(0.5));
  REQUIRE(base.merged.oov.size() == 1);
  CHECK(base.merged.oov[0].first == "zlib");
  CHECK(base.merged.oov[0].second == doctest::Approx(0.5 * (base.kappa[2] + base.kappa[3])));
  CHECK(base.merged.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(base.merged.probability("use", vocab) ==
        doctest::Approx(0.5 * base.vocab_dist[7] + 0.5 * base.kappa[1]));
}

TEST_CASE("step loss cases") {
  StepOutput s;
  s.lambda = 0.5;
  s.kappa = {0.25, 0.25, 0.25, 0.25};
  s.vocab_dist = Vec(9, 0.0);
  EncodedSnippet c;
  c.ids = {Vocabulary::kCodeStart, Vocabulary::kUnk, Vocabulary::kUnk, Vocabulary::kCodeEnd};
  c.surface = {"<S>", "zlib", "zlib", "</S>"};
  // Two copies of the target, r = 0.
  CHECK(target_probability(s, "zlib", Vocabulary::kUnk, c, ModelKind::kCopyAttention) ==
        doctest::Approx(0.25));

  s.vocab_dist[7] = 0.4;
  s.vocab_dist[Vocabulary::kUnk] = 0.3;
  s.lambda = 0.2;
  // In vocabulary, absent from c.
  CHECK(target_probability(s, "get", 7, c, ModelKind::kCopyAttention) == doctest::Approx(0.8 * 0.4));
  // OoV at positions 1 and 2: the UNK route is penalized by mu.
  const double expected = 0.2 * 0.5 + 0.8 * std::exp(-10.0) * 0.3;
  CHECK(target_probability(s, "zlib", Vocabulary::kUnk, c, ModelKind::kCopyAttention) ==
        doctest::Approx(expected).epsilon(1e-14));
  // OoV absent from c: no penalty.
  CHECK(target_probability(s, "zip", Vocabulary::kUnk, c, ModelKind::kCopyAttention) ==
        doctest::Approx(0.8 * 0.3));
  CHECK(step_loss(s, "get", 7, c, ModelKind::kConvAttention) == doctest::Approx(-std::log(0.4 + 1e-12)));
}

TEST_CASE("merged probabilities marginalize to one without the penalty") {
  Rng rng(17);
  const Vocabulary vocab = make_vocab({"use", "browser"});
  const ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kGru, tiny_dims(),
                                      vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"use", "zlib", "browser", "zlib"}, vocab);
  const StepOutput s = copy_attention_step(p, c, random_vec(2, rng));
  double sum = 0.0;
  for (const auto& t : vocab.tokens()) sum += s.merged.probability(t, vocab);
  for (const auto& [t, prob] : s.merged.oov) sum += prob;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("next_state follows the feeding rate endpoints") {
  Rng rng(18);
  const Vocabulary vocab = make_vocab({"a"});
  const ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kGru, tiny_dims(),
                                      vocab.size(), rng);
  const Vec h = random_vec(2, rng), nhat = random_vec(2, rng);
  const Vec teacher = ops::gru_step(p.embedding.row(7), h, p.gru);
  const Vec predicted = ops::gru_step(nhat, h, p.gru);
  Rng draw(1);
  CHECK(next_state(p, 7, nhat, h, 0.0, &draw) == teacher);
  CHECK(next_state(p, 7, nhat, h, 1.0, &draw) == predicted);
  CHECK(next_state(p, 7, nhat, h) == teacher);
}

TEST_CASE("simple state") {
  Rng rng(19);
  const Vocabulary vocab = make_vocab({"a", "b"});
  ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kSimple, tiny_dims(3, 2, 2),
                                vocab.size(), rng);
  REQUIRE(p.simple.has_value());
  const Vec h = simple_state(p, 7, 8);
  for (std::size_t j = 0; j < 2; ++j) {
    double expect = 0.0;
    for (std::size_t d = 0; d < 3; ++d) expect += p.simple->w(j, d, 0) * p.simple->g(7, d) + p.simple->w(j, d, 1) * p.simple->g(8, d);
    CHECK(h[j] == doctest::Approx(expect).epsilon(1e-13));
  }
  const RecurrentState first = initial_state(p);
  CHECK(first.h == simple_state(p, Vocabulary::kNameStart, Vocabulary::kNameStart));

  p.simple->w.fill(0.0);
  for (double v : simple_state(p, 7, 8)) CHECK(v == 0.0);

  const ModelParams gru = random_params(ModelKind::kCopyAttention, StateKind::kGru, tiny_dims(),
                                        vocab.size(), rng);
  CHECK_THROWS_AS(simple_state(gru, 7, 8), Error);
}

TEST_CASE("sequence gradients match finite differences for every variant") {
  struct Variant {
    ModelKind kind;
    StateKind state;
    double rate;
  };
  const Variant variants[] = {
      {ModelKind::kCopyAttention, StateKind::kGru, 0.0},
      {ModelKind::kCopyAttention, StateKind::kGru, 1.0},
      {ModelKind::kCopyAttention, StateKind::kGru, 0.5},
      {ModelKind::kConvAttention, StateKind::kGru, 0.0},
      {ModelKind::kCopyAttention, StateKind::kSimple, 0.0},
      {ModelKind::kConvAttention, StateKind::kSimple, 0.0},
  };
  std::uint64_t seed = 100;
  for (const Variant& v : variants) {
    for (int trial = 0; trial < 3; ++trial) {
      const GradientReport r = sequence_gradient_check(v.kind, v.state, v.rate, seed++);
      CAPTURE(to_string(v.kind));
      CAPTURE(to_string(v.state));
      CAPTURE(v.rate);
      CHECK_MESSAGE(r.ok(), r.first_failure);
    }
  }
}

TEST_CASE("sequence gradient with wider windows and activation mask") {
  Rng rng(20);
  const Vocabulary vocab = make_vocab({"get", "value", "set"});
  ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kGru,
                                tiny_dims(3, 2, 3, 2, 3, 2), vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"set", "value", "zlib", "get", "zlib"}, vocab);
  const EncodedName name = encode_name({"set", "zlib"}, vocab);
  const std::size_t rows = c.size() + p.dims.total_padding() - p.dims.w1 + 1;
  Tensor mask({rows, p.dims.k1});
  for (double& m : mask.values()) m = rng.bernoulli(0.3) ? 0.0 : 1.0 / 0.7;
  auto loss = [&] { return sequence_nll(p, c, name, {}, nullptr, &mask); };
  ModelParams grad = p.zeros_like();
  sequence_nll(p, c, name, {}, &grad, &mask);
  const GradientReport r = check_model_gradient(p, grad, loss);
  CHECK_MESSAGE(r.ok(), r.first_failure);
}

TEST_CASE("sequence nll equals the sum of step losses") {
  Rng rng(21);
  const Vocabulary vocab = make_vocab({"get", "value"});
  const ModelParams p = random_params(ModelKind::kCopyAttention, StateKind::kGru, tiny_dims(),
                                      vocab.size(), rng);
  const EncodedSnippet c = encode_snippet({"value", "zlib"}, vocab);
  const EncodedName name = encode_name({"get", "zlib"}, vocab);
  const SnippetFeatures f = compute_snippet_features(p, c);
  RecurrentState state = initial_state(p);
  double total = 0.0;
  for (std::size_t t = 0; t < name.size(); ++t) {
    const StepOutput s = model_step(p, c, f, state.h);
    total += step_loss(s, name.surface[t], name.ids[t], c, p.kind);
    state = advance_state(p, state, name.ids[t]);
  }
  CHECK(sequence_nll(p, c, name) == doctest::Approx(total).epsilon(1e-12));
}
