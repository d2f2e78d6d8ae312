#include "doctest.h"

#include <algorithm>
#include <map>

#include "codesum/errors.hpp"
#include "codesum/eval.hpp"
#include "support.hpp"

using namespace codesum;
using testing::synthetic_example;

namespace {

// Counting oracle: overlap by repeatedly removing matched subtokens.
PrecisionRecall oracle_prf(Name pred, Name target) {
  std::size_t overlap = 0;
  const std::size_t np = pred.size(), nt = target.size();
  for (const auto& s : pred) {
    auto it = std::find(target.begin(), target.end(), s);
    if (it != target.end()) {
      target.erase(it);
      ++overlap;
    }
  }
  PrecisionRecall r;
  r.precision = np ? double(overlap) / double(np) : 0.0;
  r.recall = nt ? double(overlap) / double(nt) : 0.0;
  r.f1 = (r.precision + r.recall) > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

Name random_name(Rng& rng, std::size_t max_len) {
  static const char* pool[] = {"get", "set", "name", "size", "is", "to", "string"};
  Name n(rng.below(max_len + 1));
  for (auto& s : n) s = pool[rng.below(7)];
  return n;
}

}  // namespace

TEST_CASE("subtoken precision, recall and F1") {
  const PrecisionRecall r = subtoken_prf({"get", "size"}, {"get", "length"});
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 0.5);
  CHECK(r.f1 == 0.5);
  const PrecisionRecall same = subtoken_prf({"render", "should"}, {"should", "render"});
  CHECK(same.f1 == 1.0);
  const PrecisionRecall repeated = subtoken_prf({"test", "test"}, {"test"});
  CHECK(repeated.precision == 0.5);
  CHECK(repeated.recall == 1.0);
  CHECK(subtoken_prf({}, {"a"}).f1 == 0.0);
}

TEST_CASE("exact match is order sensitive") {
  CHECK(exact_match({"should", "render"}, {"should", "render"}));
  CHECK_FALSE(exact_match({"render", "should"}, {"should", "render"}));
  CHECK_FALSE(exact_match({}, {"a"}));
}

TEST_CASE("score_at_rank") {
  const std::vector<Name> s = {{"a"}, {"b"}, {"c"}, {"get", "x"}, {"e"}};
  const RankScore r1 = score_at_rank(s, {"get", "x"}, 1);
  const RankScore r5 = score_at_rank(s, {"get", "x"}, 5);
  CHECK_FALSE(r1.exact);
  CHECK(r5.exact);
  CHECK(r1.f1 == 0.0);
  CHECK(r5.f1 == 1.0);
  const RankScore empty = score_at_rank({}, {"a"}, 5);
  CHECK(empty.f1 == 0.0);
  CHECK_FALSE(empty.exact);
}

TEST_CASE("metrics agree with the counting oracle on random pairs") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const Name pred = random_name(rng, 4);
    Name target = random_name(rng, 4);
    if (target.empty()) target = {"get"};
    const PrecisionRecall a = subtoken_prf(pred, target);
    const PrecisionRecall b = oracle_prf(pred, target);
    CHECK(a.precision == b.precision);
    CHECK(a.recall == b.recall);
    CHECK(a.f1 == b.f1);
    // Swapping arguments exchanges precision and recall.
    const PrecisionRecall swapped = subtoken_prf(target, pred);
    if (!pred.empty()) {
      CHECK(swapped.precision == a.recall);
      CHECK(swapped.recall == a.precision);
    }
  }
}

TEST_CASE("OoV accuracy readings") {
  const Vocabulary vocab = testing::make_vocab({"get"});
  CHECK_FALSE(oov_accuracy({{"get"}}, {"get"}, vocab, 1).has_value());
  CHECK(oov_accuracy({{"get", "zlib"}}, {"get", "zlib"}, vocab, 1) == 1.0);
  CHECK(oov_accuracy({{"zlib", "get"}}, {"get", "zlib"}, vocab, 1) == 1.0);
  CHECK(oov_accuracy({{"zlib", "get"}}, {"get", "zlib"}, vocab, 1, OovReading::kTopPositional) == 0.0);
  CHECK(oov_accuracy({{"get"}, {"get", "zlib"}}, {"get", "zlib"}, vocab, 1) == 0.0);
  CHECK(oov_accuracy({{"get"}, {"get", "zlib"}}, {"get", "zlib"}, vocab, 5) == 1.0);
  CHECK(oov_accuracy({}, {"zlib"}, vocab, 5) == 0.0);
}

TEST_CASE("aggregation averages per-example scores") {
  const Vocabulary vocab = testing::make_vocab({"get"});
  std::vector<ExampleScore> scores;
  scores.push_back(score_example({{"get", "zlib"}}, {"get", "zlib"}, vocab));
  scores.push_back(score_example({{"get"}}, {"set"}, vocab));
  const EvalReport r = aggregate(scores);
  CHECK(r.n_examples == 2);
  CHECK(r.n_oov_examples == 2);
  CHECK(r.exact_at_1 == 0.5);
  CHECK(r.f1_at_5 == 0.5);
  CHECK(r.oov_acc_at_1 == 0.5);
  const auto j = r.to_json();
  CHECK(j.at("f1_at_1") == 0.5);
  CHECK(j.contains("oov_acc_at_5"));
}

TEST_CASE("tf-idf baseline") {
  const std::vector<MethodExample> train = {
      synthetic_example({"get", "size"}, {"return", "size", ";"}),
      synthetic_example({"set", "name"}, {"this", "name", "=", "name", ";"}),
      synthetic_example({"get", "size"}, {"return", "this", "size", ";"}),
      synthetic_example({"is", "empty"}, {"return", "size", "==", "0", ";"}),
  };
  const TfidfIndex index(train);
  CHECK(index.size() == 4);

  const auto self = index.suggest(train[1].body, 3);
  REQUIRE_FALSE(self.empty());
  CHECK(self[0] == Name{"set", "name"});
  CHECK(index.similarity(train[1].body, 1) == doctest::Approx(1.0));

  // Duplicate neighbour names appear once.
  const auto dedup = index.suggest({"size"}, 5);
  CHECK(std::ranges::count(dedup, Name{"get", "size"}) == 1);

  // No shared subtokens: most frequent names first.
  const auto fallback = index.suggest({"unrelated"}, 2);
  REQUIRE(fallback.size() == 2);
  CHECK(fallback[0] == Name{"get", "size"});
  CHECK(fallback[1] == Name{"set", "name"});

  CHECK_THROWS_AS(TfidfIndex({}), Error);
}

TEST_CASE("shuffle ablation permutes bodies only") {
  std::vector<MethodExample> examples = {synthetic_example({"f"}, {"a", "b", "c", "d", "a"}),
                                         synthetic_example({"g"}, {"x"})};
  const auto shuffled = shuffle_ablation(examples, 3);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    CHECK(shuffled[i].name == examples[i].name);
    auto a = shuffled[i].body, b = examples[i].body;
    std::ranges::sort(a);
    std::ranges::sort(b);
    CHECK(a == b);
  }
  CHECK(shuffled[1].body == examples[1].body);

  const TfidfIndex plain(examples), mixed(shuffled);
  CHECK(plain.suggest(examples[0].body, 2) == mixed.suggest(shuffled[0].body, 2));
}
