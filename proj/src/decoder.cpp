#include "codesum/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "codesum/errors.hpp"

namespace codesum {

SearchLimits SearchLimits::unbounded(std::size_t max_name_length) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  return {.max_steps = kMax, .heap_capacity = kMax, .successors = kMax,
          .max_name_length = max_name_length};
}

bool is_generatable(TokenId id) {
  return id != Vocabulary::kPad && id != Vocabulary::kNameStart && id != Vocabulary::kCodeStart &&
         id != Vocabulary::kCodeEnd && id != Vocabulary::kSelf;
}

std::vector<PartialSuggestion> expand(const ModelParams& p, const Vocabulary& vocab,
                                      const PartialSuggestion& partial, const StepOutput& step,
                                      std::size_t successors, std::size_t max_name_length) {
  struct Candidate {
    std::size_t order;  // vocabulary ids first, then copy-only subtokens
    TokenId id;
    double prob;
  };
  const MergedDistribution& merged = step.merged;
  const bool at_length_cap = partial.subtokens.size() >= max_name_length;
  std::vector<Candidate> candidates;
  for (std::size_t v = 0; v < merged.vocab.size(); ++v) {
    const auto id = static_cast<TokenId>(v);
    if (!is_generatable(id) || merged.vocab[v] <= 0.0) continue;
    if (at_length_cap && id != Vocabulary::kNameEnd) continue;
    candidates.push_back({v, id, merged.vocab[v]});
  }
  if (!at_length_cap) {
    for (std::size_t i = 0; i < merged.oov.size(); ++i) {
      if (merged.oov[i].second <= 0.0) continue;
      candidates.push_back({merged.vocab.size() + i, Vocabulary::kUnk, merged.oov[i].second});
    }
  }
  const auto better = [](const Candidate& a, const Candidate& b) {
    return a.prob != b.prob ? a.prob > b.prob : a.order < b.order;
  };
  const std::size_t keep = std::min(successors, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), better);
  candidates.resize(keep);

  std::vector<PartialSuggestion> children;
  children.reserve(keep);
  for (const Candidate& cand : candidates) {
    const std::string& token = cand.order < merged.vocab.size()
                                   ? vocab.token(cand.id)
                                   : merged.oov[cand.order - merged.vocab.size()].first;
    PartialSuggestion child;
    child.subtokens = partial.subtokens;
    child.log_prob = partial.log_prob + std::log(cand.prob);
    child.steps = std::make_shared<const StepNode>(
        StepNode{StepRecord{token, step.alpha, step.kappa, step.lambda}, partial.steps});
    if (cand.id == Vocabulary::kNameEnd) {
      child.complete = true;
      child.state = partial.state;
    } else {
      child.subtokens.push_back(token);
      child.state = advance_state(p, partial.state, cand.id);
    }
    children.push_back(std::move(child));
  }
  return children;
}

namespace {

std::vector<StepRecord> unroll(const std::shared_ptr<const StepNode>& last) {
  std::vector<StepRecord> out;
  for (const StepNode* n = last.get(); n; n = n->parent.get()) out.push_back(n->record);
  std::ranges::reverse(out);
  return out;
}

}  // namespace

std::vector<Suggestion> suggest(const ModelParams& p, const Vocabulary& vocab,
                                const EncodedSnippet& c, std::size_t k,
                                const SearchLimits& limits) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (vocab.size() != p.vocab_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "vocabulary does not match the model");
  }
  const SnippetFeatures features = compute_snippet_features(p, c);

  // Max-heap by log-probability; the sequence number keeps ordering deterministic.
  using Key = std::pair<double, std::size_t>;
  const auto cmp = [](const Key& a, const Key& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  std::map<Key, PartialSuggestion, decltype(cmp)> heap(cmp);
  std::size_t seq = 0;

  std::vector<Suggestion> done;
  std::map<std::vector<std::string>, std::size_t> done_index;
  // log-prob of the k-th best completion, -inf until k exist.
  std::multiset<double, std::greater<>> best_scores;
  const auto kth_best = [&] {
    if (best_scores.size() < k) return -std::numeric_limits<double>::infinity();
    return *std::next(best_scores.begin(), static_cast<std::ptrdiff_t>(k - 1));
  };

  PartialSuggestion root;
  root.state = initial_state(p);
  heap.emplace(Key{0.0, seq++}, std::move(root));

  for (std::size_t iter = 0; iter < limits.max_steps && !heap.empty(); ++iter) {
    auto top = heap.begin();
    PartialSuggestion partial = std::move(top->second);
    heap.erase(top);
    // Everything left in the heap is no better than this partial.
    if (partial.log_prob < kth_best()) break;

    const StepOutput step = model_step(p, c, features, partial.state.h);
    for (PartialSuggestion& child :
         expand(p, vocab, partial, step, limits.successors, limits.max_name_length)) {
      if (child.log_prob < kth_best()) continue;
      if (child.complete) {
        if (child.subtokens.empty()) continue;
        const auto found = done_index.find(child.subtokens);
        if (found != done_index.end()) {
          Suggestion& existing = done[found->second];
          if (child.log_prob > existing.log_prob) {
            best_scores.erase(best_scores.find(existing.log_prob));
            best_scores.insert(child.log_prob);
            existing.log_prob = child.log_prob;
            existing.steps = unroll(child.steps);
          }
          continue;
        }
        done_index.emplace(child.subtokens, done.size());
        best_scores.insert(child.log_prob);
        done.push_back({std::move(child.subtokens), child.log_prob, unroll(child.steps)});
        continue;
      }
      heap.emplace(Key{child.log_prob, seq++}, std::move(child));
      if (heap.size() > limits.heap_capacity) heap.erase(std::prev(heap.end()));
    }
  }

  std::ranges::stable_sort(done, [](const Suggestion& a, const Suggestion& b) {
    return a.log_prob > b.log_prob;
  });
  if (done.size() > k) done.resize(k);
  return done;
}

}  // namespace codesum
