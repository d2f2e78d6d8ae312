#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "codesum/corpus.hpp"
#include "codesum/vocabulary.hpp"

namespace codesum {

using Name = std::vector<std::string>;

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Multiset overlap of subtokens between a prediction and the target.
PrecisionRecall subtoken_prf(const Name& predicted, const Name& target);

bool exact_match(const Name& predicted, const Name& target);

struct RankScore {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool exact = false;
};

// Each metric is maximized independently over the first min(k, n) suggestions.
RankScore score_at_rank(const std::vector<Name>& suggestions, const Name& target, std::size_t k);

enum class OovReading {
  kBestF1Membership,  // multiset membership in the best-F1 suggestion of the top k
  kTopPositional,     // position-matched against the first suggestion only
};

// Fraction of the target's out-of-vocabulary subtokens that the suggestions
// reproduce; nullopt when the target has none.
std::optional<double> oov_accuracy(const std::vector<Name>& suggestions, const Name& target,
                                   const Vocabulary& train_vocab, std::size_t k,
                                   OovReading reading = OovReading::kBestF1Membership);

struct EvalReport {
  double f1_at_1 = 0, f1_at_5 = 0;
  double exact_at_1 = 0, exact_at_5 = 0;
  double precision_at_1 = 0, precision_at_5 = 0;
  double recall_at_1 = 0, recall_at_5 = 0;
  double oov_acc_at_1 = 0, oov_acc_at_5 = 0;
  std::size_t n_examples = 0;
  std::size_t n_oov_examples = 0;

  nlohmann::json to_json() const;
};

struct ExampleScore {
  RankScore at1, at5;
  std::optional<double> oov1, oov5;
};

ExampleScore score_example(const std::vector<Name>& suggestions, const Name& target,
                           const Vocabulary& train_vocab,
                           OovReading reading = OovReading::kBestF1Membership);

// Means of per-example scores; OoV means only over examples that have OoV subtokens.
EvalReport aggregate(const std::vector<ExampleScore>& scores);

// Nearest-neighbour name suggestion over tf-idf vectors of training bodies.
class TfidfIndex {
 public:
  // Throws Error(kEmptyIndex) when examples is empty.
  explicit TfidfIndex(const std::vector<MethodExample>& examples);

  std::vector<Name> suggest(const std::vector<std::string>& body, std::size_t k) const;
  double similarity(const std::vector<std::string>& body, std::size_t example) const;

  std::size_t size() const { return names_.size(); }

 private:
  using SparseVector = std::vector<std::pair<std::size_t, double>>;  // sorted by term
  SparseVector vectorize(const std::vector<std::string>& body) const;

  std::unordered_map<std::string, std::size_t> term_index_;
  std::vector<double> idf_;
  std::vector<SparseVector> docs_;
  std::vector<double> doc_norms_;
  std::vector<Name> names_;
  std::vector<Name> names_by_frequency_;
};

// Independently permutes each body's subtokens; names are untouched.
std::vector<MethodExample> shuffle_ablation(std::vector<MethodExample> examples,
                                            std::uint64_t seed);

}  // namespace codesum
