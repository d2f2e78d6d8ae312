#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "codesum/corpus.hpp"

namespace codesum {

namespace {

const std::unordered_set<std::string_view>& java_keywords() {
  static const std::unordered_set<std::string_view> keywords = {
      "abstract", "assert",     "boolean",   "break",     "byte",         "case",
      "catch",    "char",       "class",     "const",     "continue",     "default",
      "do",       "double",     "else",      "enum",      "extends",      "final",
      "finally",  "float",      "for",       "goto",      "if",           "implements",
      "import",   "instanceof", "int",       "interface", "long",         "native",
      "new",      "package",    "private",   "protected", "public",       "return",
      "short",    "static",     "strictfp",  "super",     "switch",       "synchronized",
      "this",     "throw",      "throws",    "transient", "try",          "void",
      "volatile", "while",      "true",      "false",     "null",         "var",
      "record",   "yield",      "sealed",    "permits",
  };
  return keywords;
}

// Longest operators first so the greedy match picks them.
constexpr std::string_view kOperators[] = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    ">=",   "+=",  "-=",  "*=",  "/=",  "&=", "|=", "^=", "%=", "<<", ">>",
};

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) { return is_ident_start(c) || std::isdigit(c); }

}  // namespace

std::vector<JavaToken> lex_java(std::string_view src) {
  std::vector<JavaToken> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  auto peek = [&](std::size_t k) -> char { return i + k < n ? src[i + k] : '\0'; };

  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      const auto end = src.find("*/", i + 2);
      i = end == std::string_view::npos ? n : end + 2;
      continue;
    }
    if (is_ident_start(c)) {
      const std::size_t start = i;
      while (i < n && is_ident_part(static_cast<unsigned char>(src[i]))) ++i;
      std::string text(src.substr(start, i - start));
      const auto kind =
          java_keywords().contains(text) ? JavaTokenKind::kKeyword : JavaTokenKind::kIdentifier;
      out.push_back({kind, std::move(text)});
      continue;
    }
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      const std::size_t start = i;
      const bool hex = c == '0' && (peek(1) == 'x' || peek(1) == 'X');
      while (i < n) {
        const unsigned char d = static_cast<unsigned char>(src[i]);
        if (std::isalnum(d) || d == '_' || d == '.') {
          ++i;
        } else if ((d == '+' || d == '-') && i > start) {
          const char prev = src[i - 1];
          const bool exponent = hex ? (prev == 'p' || prev == 'P') : (prev == 'e' || prev == 'E');
          if (!exponent) break;
          ++i;
        } else {
          break;
        }
      }
      out.push_back({JavaTokenKind::kNumber, std::string(src.substr(start, i - start))});
      continue;
    }
    if (c == '"') {
      const std::size_t start = i;
      if (peek(1) == '"' && peek(2) == '"') {
        const auto end = src.find("\"\"\"", i + 3);
        i = end == std::string_view::npos ? n : end + 3;
      } else {
        ++i;
        while (i < n && src[i] != '"' && src[i] != '\n') {
          if (src[i] == '\\') ++i;
          ++i;
        }
        if (i < n && src[i] == '"') ++i;
      }
      out.push_back({JavaTokenKind::kString, std::string(src.substr(start, std::min(i, n) - start))});
      continue;
    }
    if (c == '\'') {
      const std::size_t start = i++;
      while (i < n && src[i] != '\'' && src[i] != '\n') {
        if (src[i] == '\\') ++i;
        ++i;
      }
      if (i < n && src[i] == '\'') ++i;
      out.push_back({JavaTokenKind::kChar, std::string(src.substr(start, std::min(i, n) - start))});
      continue;
    }
    if (c == '@') {
      ++i;
      while (i < n && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
      const std::size_t start = i;
      while (i < n && (is_ident_part(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
      std::string name(src.substr(start, i - start));
      if (name == "interface") {
        out.push_back({JavaTokenKind::kKeyword, "@interface"});
      } else if (name.empty()) {
        out.push_back({JavaTokenKind::kOperator, "@"});
      } else {
        out.push_back({JavaTokenKind::kAnnotation, std::move(name)});
      }
      continue;
    }
    bool matched = false;
    for (std::string_view op : kOperators) {
      if (src.substr(i, op.size()) == op) {
        out.push_back({JavaTokenKind::kOperator, std::string(op)});
        i += op.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      out.push_back({JavaTokenKind::kOperator, std::string(1, src[i])});
      ++i;
    }
  }
  return out;
}

}  // namespace codesum
