#include "codesum/vocabulary.hpp"

#include <algorithm>
#include <map>

#include "codesum/errors.hpp"

namespace codesum {

namespace {

std::vector<std::string> special_tokens() {
  return {Vocabulary::kSpecialTokens.begin(), Vocabulary::kSpecialTokens.end()};
}

}  // namespace

Vocabulary::Vocabulary() : Vocabulary(special_tokens()) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : id_to_token_(std::move(tokens)) {
  if (id_to_token_.size() < kSpecialCount ||
      !std::equal(kSpecialTokens.begin(), kSpecialTokens.end(), id_to_token_.begin())) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary must begin with the special tokens");
  }
  token_to_id_.reserve(id_to_token_.size());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    if (!token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary token: " + id_to_token_[i]);
    }
  }
}

TokenId Vocabulary::id(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.contains(std::string(token));
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json specials = nlohmann::json::object();
  constexpr std::array<const char*, kSpecialCount> kRoles = {
      "pad", "unk", "name_start", "name_end", "code_start", "code_end", "self"};
  for (std::size_t i = 0; i < kSpecialCount; ++i) specials[kRoles[i]] = i;
  return {{"tokens", id_to_token_}, {"specials", specials}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  return Vocabulary(j.at("tokens").get<std::vector<std::string>>());
}

Vocabulary build_vocabulary(const std::vector<MethodExample>& examples, std::size_t min_count) {
  if (examples.empty()) throw Error(ErrorCode::kEmptyCorpus, "no examples to build a vocabulary");
  if (min_count < 1) throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const MethodExample& ex : examples) {
    for (const auto& s : ex.name) ++counts[s];
    for (const auto& s : ex.body) ++counts[s];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, count] : counts) {
    const bool special = std::ranges::find(Vocabulary::kSpecialTokens, token) !=
                         Vocabulary::kSpecialTokens.end();
    if (count >= min_count && !special) kept.emplace_back(token, count);
  }
  // std::map iteration is lexicographic, so a stable sort on count keeps ties ordered.
  std::ranges::stable_sort(kept, [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens = special_tokens();
  for (auto& [token, count] : kept) tokens.push_back(token);
  return Vocabulary(std::move(tokens));
}

}  // namespace codesum
