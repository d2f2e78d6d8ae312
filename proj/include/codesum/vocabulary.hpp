#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "codesum/corpus.hpp"

namespace codesum {

using TokenId = int;

// Bidirectional subtoken <-> id map. The seven special symbols always occupy
// ids 0..6 in the order below.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kNameStart = 2;   // <s>
  static constexpr TokenId kNameEnd = 3;     // </s>
  static constexpr TokenId kCodeStart = 4;   // <S>
  static constexpr TokenId kCodeEnd = 5;     // </S>
  static constexpr TokenId kSelf = 6;
  static constexpr std::size_t kSpecialCount = 7;

  static constexpr std::array<std::string_view, kSpecialCount> kSpecialTokens = {
      "%pad%", "%unk%", "<s>", "</s>", "<S>", "</S>", kSelfMarker};

  Vocabulary();
  // tokens must start with the specials in canonical order.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return id_to_token_.size(); }
  TokenId id(std::string_view token) const;  // kUnk when unmapped
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const { return id_to_token_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const noexcept { return id_to_token_; }

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

inline constexpr std::size_t kDefaultMinCount = 2;

// Counts subtokens over names and bodies jointly. Throws Error(kEmptyCorpus).
Vocabulary build_vocabulary(const std::vector<MethodExample>& examples,
                            std::size_t min_count = kDefaultMinCount);

}  // namespace codesum
