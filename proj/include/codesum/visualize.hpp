#pragma once

#include <string>
#include <vector>

#include "codesum/decoder.hpp"
#include "codesum/model.hpp"
#include "codesum/vocabulary.hpp"

namespace codesum {

std::string html_escape(std::string_view text);

// Standalone HTML page for one suggestion: per emitted subtoken (and the end
// marker) one row colored by alpha / max(alpha) and one by raw kappa, with
// lambda printed per row. Out-of-vocabulary snippet tokens are underlined.
std::string attention_html(const EncodedSnippet& c, const Vocabulary& vocab,
                           const Suggestion& suggestion);

}  // namespace codesum
