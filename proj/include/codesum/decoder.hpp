#pragma once

#include <memory>
#include <string>
#include <vector>

#include "codesum/model.hpp"
#include "codesum/vocabulary.hpp"

namespace codesum {

struct SearchLimits {
  std::size_t max_steps = 100;        // expansions before the search stops
  std::size_t heap_capacity = 256;    // partial suggestions kept; lowest dropped on overflow
  std::size_t successors = 50;        // children pushed per expansion
  std::size_t max_name_length = 10;   // subtokens per name, </s> excluded

  static SearchLimits unbounded(std::size_t max_name_length);
};

// Attention snapshot of one decoding step, kept for visualization.
struct StepRecord {
  std::string token;  // the subtoken emitted at this step ("</s>" for the end)
  Vec alpha;
  Vec kappa;
  double lambda = 0.0;
};

struct StepNode {
  StepRecord record;
  std::shared_ptr<const StepNode> parent;
};

struct PartialSuggestion {
  std::vector<std::string> subtokens;  // after <s>
  double log_prob = 0.0;
  RecurrentState state;
  std::shared_ptr<const StepNode> steps;  // newest step first
  bool complete = false;                  // ended with </s>
};

struct Suggestion {
  std::vector<std::string> name;
  double log_prob = 0.0;
  std::vector<StepRecord> steps;  // one per emitted subtoken plus the final </s>

  double probability() const { return std::exp(log_prob); }
};

// Tokens the decoder may emit: every vocabulary id except padding and the
// <s>, <S>, </S> and SELF markers.
bool is_generatable(TokenId id);

// Children of `partial` for the top `successors` entries of the step's merged
// distribution. The </s> child is marked complete and keeps the parent state;
// other children advance the recurrent state with the emitted subtoken.
std::vector<PartialSuggestion> expand(const ModelParams& p, const Vocabulary& vocab,
                                      const PartialSuggestion& partial, const StepOutput& step,
                                      std::size_t successors, std::size_t max_name_length);

// Best-first search over partial names. Returns at most k completed, non-empty
// names in descending log-probability; empty when nothing completes.
std::vector<Suggestion> suggest(const ModelParams& p, const Vocabulary& vocab,
                                const EncodedSnippet& c, std::size_t k,
                                const SearchLimits& limits = {});

}  // namespace codesum
